#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace plgw {

enum class BKind { identity, power_root, aquifer_head };

/// Time nonlinearity b(.) of the equation d/dt b(u) - c div(|grad u|^{p-2} grad u) = f.
///
/// Supported families:
///   identity      b(s) = s
///   power_root    b(s) = scale * s^{1/k},            scale, k > 0
///   aquifer_head  b(s) = phi_eff * (p/(p-1))^{p-1} * [(s + H^{p/(p-1)})^{(p-1)/p} - H]
///
/// Every family satisfies b(0) = 0 and b' > 0 on (0, inf).
class BFunction {
 public:
  static BFunction identity();
  static BFunction power_root(double scale, double k);
  static BFunction aquifer_head(double phi_eff, double p, double H);
  /// Leibenson gas-filtration preset: u^{-kappa} du/dt = c Lap_p u is the
  /// b-form with b(u) = u^{1-kappa}/(1-kappa), i.e. power_root with
  /// scale = k = 1/(1-kappa). Default kappa = 1/2.
  static BFunction leibenson(double kappa = 0.5);

  double operator()(double s) const { return eval(s); }
  double eval(double s) const;     // s >= 0, else domain error
  double prime(double s) const;    // s > 0, else domain error
  double inverse(double w) const;  // closed-form b^{-1}; w >= 0, else domain error

  /// Limit of b'(s) as s -> 0+. May be +inf (power_root with k > 1,
  /// aquifer_head with H = 0) or 0 (power_root with k < 1).
  double prime_limit_at_zero() const;

  /// Infimum of b' over (0, s_max]. Zero is a possible answer
  /// (power_root with k < 1); callers needing a positive bound must check.
  double prime_lower_bound(double s_max) const;

  BKind kind() const { return kind_; }
  double scale() const { return scale_; }
  double k() const { return k_; }
  double phi_eff() const { return phi_; }
  double p() const { return p_; }
  double H() const { return H_; }

  bool same_as(const BFunction& other) const;
  std::string describe() const;

 private:
  BFunction() = default;
  BKind kind_ = BKind::identity;
  double scale_ = 1.0, k_ = 1.0;          // power_root
  double phi_ = 0.0, p_ = 2.0, H_ = 0.0;  // aquifer_head
  double Hpow_ = 0.0;                     // cached H^{p/(p-1)}
};

enum class SmpVerdict { holds, fails, inconclusive };

/// Classifies lim_{s->0+} s^{2-p} b'(s) / |log s|^{p-1} for 1 < p < 2:
/// zero limit -> holds, positive or infinite limit -> fails. The limit is
/// evaluated in closed form per family.
SmpVerdict smp_condition(const BFunction& b, double p);

std::string to_string(SmpVerdict v);

/// Power-type flux law q = c (dh/dL)^m; m = 1 is Darcy.
struct ConstitutiveLaw {
  double c;
  double m;
  ConstitutiveLaw(double c_, double m_);

  /// Vector flux: zero for a zero gradient, otherwise -c |g|^{m-1} g.
  std::vector<double> flux_from_gradient(std::span<const double> grad) const;
};

/// Substitution u = hhat^{p/(p-1)} - H^{p/(p-1)} between the water-table
/// equation and the u-form problem.
class HeadTransform {
 public:
  HeadTransform(double p, double H);
  double head_to_u(double hhat) const;  // hhat >= 0
  double u_to_head(double u) const;     // u >= -H^{p/(p-1)}
  double u_min() const { return -Hpow_; }
  double p() const { return p_; }
  double H() const { return H_; }

 private:
  double p_, H_, Hpow_;
};

/// Source transform f = (p/(p-1))^{p-1} ghat; requires p > 1.
double source_to_f(double p, double ghat);

}  // namespace plgw
