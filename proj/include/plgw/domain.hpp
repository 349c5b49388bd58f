#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <variant>

namespace plgw {

struct Interval {
  double a, b;
};

/// One-dimensional radial grid standing for a ball in R^dim; the divergence
/// uses the r^{dim-1} weight and the origin carries a symmetry condition.
struct RadialDomain {
  int dim;
  double r_max;
};

struct RectangleDomain {
  double ax, bx;
  double ay, by;
};

class Domain {
 public:
  enum class Kind { interval, radial, rectangle };

  static Domain interval(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("Domain::interval: requires a < b");
    return Domain(Interval{a, b});
  }
  static Domain radial(int dim, double r_max) {
    if (dim < 1) throw std::invalid_argument("Domain::radial: dimension must be >= 1");
    if (!(r_max > 0.0)) throw std::invalid_argument("Domain::radial: r_max must be positive");
    return Domain(RadialDomain{dim, r_max});
  }
  static Domain rectangle(double ax, double bx, double ay, double by) {
    if (!(ax < bx) || !(ay < by))
      throw std::invalid_argument("Domain::rectangle: requires positive extent");
    return Domain(RectangleDomain{ax, bx, ay, by});
  }

  Kind kind() const { return static_cast<Kind>(v_.index()); }
  const Interval& as_interval() const { return std::get<Interval>(v_); }
  const RadialDomain& as_radial() const { return std::get<RadialDomain>(v_); }
  const RectangleDomain& as_rectangle() const { return std::get<RectangleDomain>(v_); }

  /// Dimension of the coordinates a point needs (1 for interval/radial, 2 for rectangle).
  int coord_dim() const { return kind() == Kind::rectangle ? 2 : 1; }

  /// Distance from an interior point to the Dirichlet boundary. For radial
  /// domains the point is a radius (the outer sphere is the boundary).
  double distance_to_boundary(std::span<const double> x) const {
    switch (kind()) {
      case Kind::interval: {
        const auto& iv = as_interval();
        return std::min(x[0] - iv.a, iv.b - x[0]);
      }
      case Kind::radial:
        return as_radial().r_max - x[0];
      case Kind::rectangle: {
        const auto& r = as_rectangle();
        return std::min(std::min(x[0] - r.ax, r.bx - x[0]), std::min(x[1] - r.ay, r.by - x[1]));
      }
    }
    return 0.0;
  }

  bool same_as(const Domain& o) const {
    if (kind() != o.kind()) return false;
    switch (kind()) {
      case Kind::interval:
        return as_interval().a == o.as_interval().a && as_interval().b == o.as_interval().b;
      case Kind::radial:
        return as_radial().dim == o.as_radial().dim && as_radial().r_max == o.as_radial().r_max;
      case Kind::rectangle: {
        const auto& r = as_rectangle();
        const auto& s = o.as_rectangle();
        return r.ax == s.ax && r.bx == s.bx && r.ay == s.ay && r.by == s.by;
      }
    }
    return false;
  }

  std::string describe() const;

 private:
  template <class T>
  explicit Domain(T&& t) : v_(std::forward<T>(t)) {}
  std::variant<Interval, RadialDomain, RectangleDomain> v_;
};

}  // namespace plgw
