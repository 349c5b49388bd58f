#include "plgw/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plgw/numerics.hpp"

namespace plgw {

void ProblemSpec::validate() const {
  if (!(p > 1.0)) throw std::invalid_argument("ProblemSpec: p must exceed 1");
  if (!(c > 0.0)) throw std::invalid_argument("ProblemSpec: c must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("ProblemSpec: T must be positive");
}

void NumericsConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("NumericsConfig: dt must be positive");
  if (!(dt_min > 0.0) || !(dt_min <= dt_max))
    throw std::invalid_argument("NumericsConfig: need 0 < dt_min <= dt_max");
  if (!(tol_nonlinear > 0.0) || !(linear_tol > 0.0) || !(eps_reg_rel >= 0.0))
    throw std::invalid_argument("NumericsConfig: tolerances must be positive");
  if (max_iters < 1) throw std::invalid_argument("NumericsConfig: max_iters must be >= 1");
  if (snapshot_every < 1) throw std::invalid_argument("NumericsConfig: snapshot_every must be >= 1");
}

double b_extended(const BFunction& b, double s) { return s >= 0.0 ? b.eval(s) : -b.eval(-s); }

namespace {

double binv_extended(const BFunction& b, double w) {
  return w >= 0.0 ? b.inverse(w) : -b.inverse(-w);
}

double bprime_floored(const BFunction& b, double s, double floor) {
  return b.prime(std::max(s, floor));
}

struct FluxKernel {
  double p;
  double eps2;
  double value(double g) const { return std::pow(g * g + eps2, 0.5 * (p - 2.0)) * g; }
  double deriv(double g) const {
    return std::pow(g * g + eps2, 0.5 * (p - 4.0)) * ((p - 1.0) * g * g + eps2);
  }
  // 2-d variants taking the full squared gradient magnitude on the face
  double value2(double gn, double m2) const { return std::pow(m2 + eps2, 0.5 * (p - 2.0)) * gn; }
  double deriv2(double gn, double m2) const {
    const double t = m2 + eps2;
    return std::pow(t, 0.5 * (p - 2.0)) * (1.0 + (p - 2.0) * gn * gn / t);
  }
};

// The nonlinear step is solved either in u itself or, when b'(0+) is
// infinite (power roots with k > 1, zero-depth aquifer heads), in the
// conserved variable w = b(u). The w parameterization keeps the time-term
// derivative bounded at degenerate nodes, where u barely moves while w
// evolves freely; the flux chain picks up du/dw = 1/b'(u) instead.
struct IterationVariable {
  const BFunction& b;
  double floor;
  bool w_mode;

  static IterationVariable choose(const BFunction& b, double floor) {
    return {b, floor, !std::isfinite(b.prime_limit_at_zero())};
  }
  double u_at(double x) const { return w_mode ? binv_extended(b, x) : x; }
  double w_at(double x) const { return w_mode ? x : b_extended(b, x); }
  double from_state(double u, double bn) const { return w_mode ? bn : u; }
  // derivative of the time term w.r.t. the iterate
  double time_slope(double x) const {
    return w_mode ? 1.0 : bprime_floored(b, x, floor);
  }
  // derivative of u w.r.t. the iterate (chain factor for the flux terms)
  double chain(double u) const {
    return w_mode ? 1.0 / bprime_floored(b, std::abs(u), floor) : 1.0;
  }
};

// ---------------------------------------------------------------------------
// 1-d discretizations (interval and radial) share the banded machinery via
// face areas A_{i+1/2} and cell volumes V_i.
// ---------------------------------------------------------------------------

struct Mesh1d {
  std::vector<double> x;      // all nodes
  std::vector<double> area;   // face area A_{i+1/2}, i = 0..M-2
  std::vector<double> vol;    // cell volume per node
  size_t first_unknown, last_unknown;  // inclusive range of solved nodes
  double h;
};

Mesh1d build_mesh_interval(const Interval& iv, int M) {
  Mesh1d m;
  m.x.resize(M);
  const double h = (iv.b - iv.a) / (M - 1);
  for (int i = 0; i < M; ++i) m.x[i] = iv.a + h * i;
  m.h = h;
  m.area.assign(M - 1, 1.0);
  m.vol.assign(M, h);
  m.vol.front() = m.vol.back() = 0.5 * h;
  m.first_unknown = 1;
  m.last_unknown = static_cast<size_t>(M) - 2;
  return m;
}

Mesh1d build_mesh_radial(const RadialDomain& rd, int M) {
  Mesh1d m;
  m.x.resize(M);
  const double h = rd.r_max / (M - 1);
  for (int i = 0; i < M; ++i) m.x[i] = h * i;
  m.h = h;
  const double N = rd.dim;
  m.area.resize(M - 1);
  for (int i = 0; i + 1 < M; ++i) m.area[i] = std::pow(m.x[i] + 0.5 * h, N - 1.0);
  m.vol.resize(M);
  for (int i = 0; i < M; ++i) {
    const double rl = std::max(0.0, m.x[i] - 0.5 * h);
    const double rr = std::min(rd.r_max, m.x[i] + 0.5 * h);
    m.vol[i] = (std::pow(rr, N) - std::pow(rl, N)) / N;
  }
  m.first_unknown = 0;  // symmetry condition at r = 0, zero flux through the origin
  m.last_unknown = static_cast<size_t>(M) - 2;
  return m;
}

class Stepper1d {
 public:
  Stepper1d(const ProblemSpec& pb, Mesh1d mesh, const NumericsConfig& cfg, double eps)
      : pb_(pb), mesh_(std::move(mesh)), cfg_(cfg), kern_{pb.p, eps * eps},
        var_(IterationVariable::choose(pb.b, cfg.jacobian_floor)) {}

  const Mesh1d& mesh() const { return mesh_; }

  void u_from_iterate(const std::vector<double>& x, std::vector<double>& u) const {
    u.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) u[i] = var_.u_at(x[i]);
  }

  // residual over unknowns; x is the full nodal iterate
  void residual(const std::vector<double>& x, const std::vector<double>& u,
                const std::vector<double>& bn, const std::vector<double>& fv, double dt,
                std::vector<double>& R) const {
    const size_t i0 = mesh_.first_unknown, i1 = mesh_.last_unknown;
    R.resize(i1 - i0 + 1);
    const double h = mesh_.h;
    for (size_t i = i0; i <= i1; ++i) {
      const double Fr = mesh_.area[i] * kern_.value((u[i + 1] - u[i]) / h);
      const double Fl = (i == 0) ? 0.0 : mesh_.area[i - 1] * kern_.value((u[i] - u[i - 1]) / h);
      R[i - i0] = (var_.w_at(x[i]) - bn[i]) / dt - pb_.c * (Fr - Fl) / mesh_.vol[i] - fv[i];
    }
  }

  // tridiagonal Jacobian over unknowns; chord_override replaces the
  // b'-derived factors during the fallback (u-mode: b' := L, w-mode: du/dw := 1/L)
  void jacobian(const std::vector<double>& x, const std::vector<double>& u, double dt,
                double chord_override, std::vector<double>& lower, std::vector<double>& diag,
                std::vector<double>& upper) const {
    const size_t i0 = mesh_.first_unknown, i1 = mesh_.last_unknown;
    const size_t n = i1 - i0 + 1;
    lower.assign(n, 0.0);
    diag.assign(n, 0.0);
    upper.assign(n, 0.0);
    const double h = mesh_.h;
    auto chain_at = [&](size_t i) {
      if (chord_override > 0.0) return var_.w_mode ? 1.0 / chord_override : 1.0;
      return var_.chain(u[i]);
    };
    auto tslope_at = [&](size_t i) {
      if (chord_override > 0.0 && !var_.w_mode) return chord_override;
      return var_.time_slope(x[i]);
    };
    for (size_t i = i0; i <= i1; ++i) {
      const double Dr = mesh_.area[i] * kern_.deriv((u[i + 1] - u[i]) / h);
      const double Dl = (i == 0) ? 0.0 : mesh_.area[i - 1] * kern_.deriv((u[i] - u[i - 1]) / h);
      const size_t r = i - i0;
      diag[r] = tslope_at(i) / dt + pb_.c * (Dr + Dl) * chain_at(i) / (mesh_.vol[i] * h);
      if (i > i0) lower[r] = -pb_.c * Dl * chain_at(i - 1) / (mesh_.vol[i] * h);
      if (i < i1) upper[r] = -pb_.c * Dr * chain_at(i + 1) / (mesh_.vol[i] * h);
    }
  }

  bool advance(std::vector<double>& u_state, const std::vector<double>& bn,
               const std::vector<double>& fv, double dt, double scale, int& iters,
               double& final_res, bool& fallback_used) const {
    const size_t i0 = mesh_.first_unknown;
    std::vector<double> x(u_state.size());
    for (size_t i = 0; i < x.size(); ++i) x[i] = var_.from_state(u_state[i], bn[i]);
    std::vector<double> u, R, lower, diag, upper;
    auto res_norm = [&](const std::vector<double>& xx, std::vector<double>& uu) {
      u_from_iterate(xx, uu);
      residual(xx, uu, bn, fv, dt, R);
      double rn = 0.0;
      for (double r : R) rn = std::max(rn, std::abs(r));
      return rn;
    };
    double rn = res_norm(x, u);
    const double target = cfg_.tol_nonlinear * scale;
    fallback_used = false;
    double chord = 0.0;  // enabled on fallback
    bool ok = false;
    for (iters = 0; iters < cfg_.max_iters; ++iters) {
      if (rn <= target) {
        ok = true;
        break;
      }
      jacobian(x, u, dt, chord, lower, diag, upper);
      residual(x, u, bn, fv, dt, R);
      for (double& r : R) r = -r;
      std::vector<double> d = tridiagonal_solve(lower, diag, upper, R);
      double theta = 1.0;
      std::vector<double> xtry = x, utry;
      double rtry = rn;
      bool accepted = false;
      while (theta > 1.0 / 4096.0) {
        for (size_t j = 0; j < d.size(); ++j) xtry[i0 + j] = x[i0 + j] + theta * d[j];
        rtry = res_norm(xtry, utry);
        if (rtry <= target || rtry < rn * (1.0 - 0.25 * theta)) {
          accepted = true;
          break;
        }
        theta *= 0.5;
      }
      if (!accepted) {
        if (chord == 0.0) {
          // chord fallback: one conservative slope for every node
          fallback_used = true;
          chord = 1.0;
          for (size_t i = mesh_.first_unknown; i <= mesh_.last_unknown; ++i)
            chord = std::max(chord,
                             bprime_floored(pb_.b, std::abs(u[i]) + 1.0, cfg_.jacobian_floor));
          continue;
        }
        break;
      }
      x.swap(xtry);
      u.swap(utry);
      rn = rtry;
    }
    if (rn <= target) ok = true;
    final_res = rn / scale;
    if (ok)
      for (size_t i = mesh_.first_unknown; i <= mesh_.last_unknown; ++i)
        u_state[i] = var_.u_at(x[i]);
    return ok;
  }

 private:
  const ProblemSpec& pb_;
  Mesh1d mesh_;
  const NumericsConfig& cfg_;
  FluxKernel kern_;
  IterationVariable var_;
};

// ---------------------------------------------------------------------------
// Rectangle discretization: five-point finite volumes with full face
// gradients (transverse component averaged from the four adjacent
// differences). The Newton-type matrix keeps only the normal-direction
// derivative; in u-mode it is symmetric positive definite directly, in
// w-mode after the similarity transform with sqrt(du/dw), and either way
// it is solved by Jacobi-preconditioned CG.
// ---------------------------------------------------------------------------

struct Mesh2d {
  std::vector<double> x, y;
  double hx, hy;
  size_t nx, ny;
  size_t n_unknowns() const { return (nx - 2) * (ny - 2); }
};

class Stepper2d {
 public:
  Stepper2d(const ProblemSpec& pb, Mesh2d mesh, const NumericsConfig& cfg, double eps)
      : pb_(pb), mesh_(std::move(mesh)), cfg_(cfg), kern_{pb.p, eps * eps},
        var_(IterationVariable::choose(pb.b, cfg.jacobian_floor)) {}

  const Mesh2d& mesh() const { return mesh_; }

  double vat(const std::vector<double>& v, size_t i, size_t j) const {
    return v[j * mesh_.nx + i];
  }

  double flux_x(const std::vector<double>& u, size_t i, size_t j) const {
    const double gx = (vat(u, i + 1, j) - vat(u, i, j)) / mesh_.hx;
    const double gy = (vat(u, i, j + 1) - vat(u, i, j - 1) + vat(u, i + 1, j + 1) -
                       vat(u, i + 1, j - 1)) /
                      (4.0 * mesh_.hy);
    return kern_.value2(gx, gx * gx + gy * gy);
  }
  double flux_y(const std::vector<double>& u, size_t i, size_t j) const {
    const double gy = (vat(u, i, j + 1) - vat(u, i, j)) / mesh_.hy;
    const double gx = (vat(u, i + 1, j) - vat(u, i - 1, j) + vat(u, i + 1, j + 1) -
                       vat(u, i - 1, j + 1)) /
                      (4.0 * mesh_.hx);
    return kern_.value2(gy, gx * gx + gy * gy);
  }

  void u_from_iterate(const std::vector<double>& x, std::vector<double>& u) const {
    u.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) u[i] = var_.u_at(x[i]);
  }

  void residual(const std::vector<double>& x, const std::vector<double>& u,
                const std::vector<double>& bn, const std::vector<double>& fv, double dt,
                std::vector<double>& R) const {
    R.resize(mesh_.n_unknowns());
    size_t r = 0;
    for (size_t j = 1; j + 1 < mesh_.ny; ++j) {
      for (size_t i = 1; i + 1 < mesh_.nx; ++i, ++r) {
        const size_t idx = j * mesh_.nx + i;
        const double div = (flux_x(u, i, j) - flux_x(u, i - 1, j)) / mesh_.hx +
                           (flux_y(u, i, j) - flux_y(u, i, j - 1)) / mesh_.hy;
        R[r] = (var_.w_at(x[idx]) - bn[idx]) / dt - pb_.c * div - fv[idx];
      }
    }
  }

  void face_weights(const std::vector<double>& u, std::vector<double>& wx,
                    std::vector<double>& wy) const {
    wx.assign((mesh_.nx - 1) * mesh_.ny, 0.0);
    wy.assign(mesh_.nx * (mesh_.ny - 1), 0.0);
    for (size_t j = 1; j + 1 < mesh_.ny; ++j)
      for (size_t i = 0; i + 1 < mesh_.nx; ++i) {
        const double gx = (vat(u, i + 1, j) - vat(u, i, j)) / mesh_.hx;
        const double gy = (vat(u, i, j + 1) - vat(u, i, j - 1) + vat(u, i + 1, j + 1) -
                           vat(u, i + 1, j - 1)) /
                          (4.0 * mesh_.hy);
        wx[j * (mesh_.nx - 1) + i] = kern_.deriv2(gx, gx * gx + gy * gy);
      }
    for (size_t j = 0; j + 1 < mesh_.ny; ++j)
      for (size_t i = 1; i + 1 < mesh_.nx; ++i) {
        const double gy = (vat(u, i, j + 1) - vat(u, i, j)) / mesh_.hy;
        const double gx = (vat(u, i + 1, j) - vat(u, i - 1, j) + vat(u, i + 1, j + 1) -
                           vat(u, i - 1, j + 1)) /
                          (4.0 * mesh_.hx);
        wy[j * mesh_.nx + i] = kern_.deriv2(gy, gx * gx + gy * gy);
      }
  }

  bool advance(std::vector<double>& u_state, const std::vector<double>& bn,
               const std::vector<double>& fv, double dt, double scale, int& iters,
               double& final_res, bool& fallback_used) const {
    std::vector<double> x(u_state.size());
    for (size_t i = 0; i < x.size(); ++i) x[i] = var_.from_state(u_state[i], bn[i]);
    std::vector<double> u, R;
    auto res_norm = [&](const std::vector<double>& xx, std::vector<double>& uu) {
      u_from_iterate(xx, uu);
      residual(xx, uu, bn, fv, dt, R);
      double rn = 0.0;
      for (double r : R) rn = std::max(rn, std::abs(r));
      return rn;
    };
    double rn = res_norm(x, u);
    const double target = cfg_.tol_nonlinear * scale;
    fallback_used = false;
    double chord = 0.0;
    const size_t n = mesh_.n_unknowns();
    std::vector<double> wx, wy, diag(n), d(n), rhs(n), sqrt_s(n);
    bool ok = false;
    for (iters = 0; iters < cfg_.max_iters; ++iters) {
      if (rn <= target) {
        ok = true;
        break;
      }
      face_weights(u, wx, wy);
      std::vector<double> tslope(n);
      {
        size_t q = 0;
        for (size_t j = 1; j + 1 < mesh_.ny; ++j)
          for (size_t i = 1; i + 1 < mesh_.nx; ++i, ++q) {
            const size_t idx = j * mesh_.nx + i;
            if (var_.w_mode) {
              tslope[q] = 1.0;
              const double s = chord > 0.0 ? 1.0 / chord : var_.chain(u[idx]);
              sqrt_s[q] = std::sqrt(s);
            } else {
              tslope[q] = chord > 0.0 ? chord
                                      : bprime_floored(pb_.b, x[idx], cfg_.jacobian_floor);
              sqrt_s[q] = 1.0;
            }
          }
      }
      // SPD operator: tslope/dt + S^{1/2} A S^{1/2} with A the face-weight
      // five-point stencil; in u-mode S is the identity
      auto apply = [&](std::span<const double> z, std::span<double> out) {
        auto zat = [&](size_t ii, size_t jj) -> double {
          if (ii == 0 || jj == 0 || ii + 1 >= mesh_.nx || jj + 1 >= mesh_.ny) return 0.0;
          const size_t q = (jj - 1) * (mesh_.nx - 2) + (ii - 1);
          return sqrt_s[q] * z[q];
        };
        size_t q = 0;
        for (size_t j = 1; j + 1 < mesh_.ny; ++j)
          for (size_t i = 1; i + 1 < mesh_.nx; ++i, ++q) {
            const double zc = zat(i, j);
            double s = tslope[q] / dt * z[q];
            s += sqrt_s[q] * pb_.c / (mesh_.hx * mesh_.hx) *
                 (wx[j * (mesh_.nx - 1) + i] * (zc - zat(i + 1, j)) +
                  wx[j * (mesh_.nx - 1) + i - 1] * (zc - zat(i - 1, j)));
            s += sqrt_s[q] * pb_.c / (mesh_.hy * mesh_.hy) *
                 (wy[j * mesh_.nx + i] * (zc - zat(i, j + 1)) +
                  wy[(j - 1) * mesh_.nx + i] * (zc - zat(i, j - 1)));
            out[q] = s;
          }
      };
      {
        size_t q = 0;
        for (size_t j = 1; j + 1 < mesh_.ny; ++j)
          for (size_t i = 1; i + 1 < mesh_.nx; ++i, ++q)
            diag[q] = tslope[q] / dt +
                      sqrt_s[q] * sqrt_s[q] *
                          (pb_.c / (mesh_.hx * mesh_.hx) *
                               (wx[j * (mesh_.nx - 1) + i] + wx[j * (mesh_.nx - 1) + i - 1]) +
                           pb_.c / (mesh_.hy * mesh_.hy) *
                               (wy[j * mesh_.nx + i] + wy[(j - 1) * mesh_.nx + i]));
      }
      residual(x, u, bn, fv, dt, rhs);
      for (size_t q = 0; q < n; ++q) rhs[q] = -rhs[q] * sqrt_s[q];  // sqrt_s == 1 in u-mode
      std::fill(d.begin(), d.end(), 0.0);
      conjugate_gradient(apply, diag, rhs, d, cfg_.linear_tol, static_cast<int>(10 * n) + 100);
      // back-transform the CG unknown to an iterate increment
      if (var_.w_mode)
        for (size_t q = 0; q < n; ++q) d[q] /= sqrt_s[q];
      double theta = 1.0;
      std::vector<double> xtry = x, utry;
      double rtry = rn;
      bool accepted = false;
      while (theta > 1.0 / 4096.0) {
        size_t q = 0;
        xtry = x;
        for (size_t j = 1; j + 1 < mesh_.ny; ++j)
          for (size_t i = 1; i + 1 < mesh_.nx; ++i, ++q) xtry[j * mesh_.nx + i] += theta * d[q];
        rtry = res_norm(xtry, utry);
        if (rtry <= target || rtry < rn * (1.0 - 0.25 * theta)) {
          accepted = true;
          break;
        }
        theta *= 0.5;
      }
      if (!accepted) {
        if (chord == 0.0) {
          fallback_used = true;
          chord = 1.0;
          for (size_t j = 1; j + 1 < mesh_.ny; ++j)
            for (size_t i = 1; i + 1 < mesh_.nx; ++i)
              chord = std::max(chord, bprime_floored(pb_.b, std::abs(vat(u, i, j)) + 1.0,
                                                     cfg_.jacobian_floor));
          continue;
        }
        break;
      }
      x.swap(xtry);
      u.swap(utry);
      rn = rtry;
    }
    if (rn <= target) ok = true;
    final_res = rn / scale;
    if (ok)
      for (size_t j = 1; j + 1 < mesh_.ny; ++j)
        for (size_t i = 1; i + 1 < mesh_.nx; ++i)
          u_state[j * mesh_.nx + i] = var_.u_at(x[j * mesh_.nx + i]);
    return ok;
  }

 private:
  const ProblemSpec& pb_;
  Mesh2d mesh_;
  const NumericsConfig& cfg_;
  FluxKernel kern_;
  IterationVariable var_;
};

double source_at(const ProblemSpec& pb, double x, double y, double t) {
  return pb.f ? pb.f(x, y, t) : 0.0;
}
double initial_at(const ProblemSpec& pb, double x, double y) { return pb.u0 ? pb.u0(x, y) : 0.0; }

double gradient_scale_1d(const std::vector<double>& u, double h) {
  double g = 0.0;
  for (size_t i = 0; i + 1 < u.size(); ++i) g = std::max(g, std::abs(u[i + 1] - u[i]) / h);
  return g;
}

}  // namespace

GridField sample_initial(const ProblemSpec& problem, int resolution) {
  return sample_initial(problem, std::array<int, 2>{resolution, resolution});
}

GridField sample_initial(const ProblemSpec& problem, std::array<int, 2> resolution) {
  GridField field;
  field.domain = problem.domain;
  switch (problem.domain.kind()) {
    case Domain::Kind::interval: {
      const auto m = build_mesh_interval(problem.domain.as_interval(), resolution[0]);
      field.xs = m.x;
      field.values.resize(m.x.size());
      for (size_t i = 0; i < m.x.size(); ++i) field.values[i] = initial_at(problem, m.x[i], 0.0);
      field.values.front() = field.values.back() = 0.0;
      break;
    }
    case Domain::Kind::radial: {
      const auto m = build_mesh_radial(problem.domain.as_radial(), resolution[0]);
      field.xs = m.x;
      field.values.resize(m.x.size());
      for (size_t i = 0; i < m.x.size(); ++i) field.values[i] = initial_at(problem, m.x[i], 0.0);
      field.values.back() = 0.0;
      break;
    }
    case Domain::Kind::rectangle: {
      const auto& r = problem.domain.as_rectangle();
      const int nx = resolution[0], ny = resolution[1];
      field.xs.resize(nx);
      field.ys.resize(ny);
      const double hx = (r.bx - r.ax) / (nx - 1), hy = (r.by - r.ay) / (ny - 1);
      for (int i = 0; i < nx; ++i) field.xs[i] = r.ax + hx * i;
      for (int j = 0; j < ny; ++j) field.ys[j] = r.ay + hy * j;
      field.values.assign(static_cast<size_t>(nx) * ny, 0.0);
      for (int j = 1; j + 1 < ny; ++j)
        for (int i = 1; i + 1 < nx; ++i)
          field.values[static_cast<size_t>(j) * nx + i] =
              initial_at(problem, field.xs[i], field.ys[j]);
      break;
    }
  }
  return field;
}

namespace {

template <class Stepper>
Trajectory run_time_loop(const ProblemSpec& pb, const NumericsConfig& cfg, Stepper& stepper,
                         GridField grid_template, std::vector<double> u,
                         const std::function<void(double, std::vector<double>&)>& fill_source) {
  Trajectory traj;
  auto snapshot = [&](double t) {
    traj.times.push_back(t);
    GridField f = grid_template;
    f.values = u;
    traj.fields.push_back(std::move(f));
  };
  snapshot(0.0);

  double t = 0.0;
  double dt = cfg.adaptive ? std::clamp(cfg.dt, cfg.dt_min, cfg.dt_max) : cfg.dt;
  int step = 0, easy_streak = 0, steps_since_snapshot = 0;
  std::vector<double> bn(u.size()), fv(u.size());
  std::vector<double> history;
  const double t_end = pb.T;
  while (t < t_end * (1.0 - 1e-14)) {
    const double dt_step = std::min(dt, t_end - t);
    for (size_t i = 0; i < u.size(); ++i) bn[i] = b_extended(pb.b, u[i]);
    fill_source(t + dt_step, fv);
    double scale = 1.0;
    for (size_t i = 0; i < u.size(); ++i)
      scale = std::max(scale, std::abs(bn[i] / dt_step + fv[i]));
    std::vector<double> v = u;
    int iters = 0;
    double final_res = 0.0;
    bool fallback = false;
    const bool ok = stepper.advance(v, bn, fv, dt_step, scale, iters, final_res, fallback);
    bool finite = ok;
    if (ok)
      for (double w : v)
        if (!std::isfinite(w)) {
          finite = false;
          break;
        }
    if (!finite) {
      history.push_back(final_res);
      if (cfg.adaptive && dt_step > cfg.dt_min * (1.0 + 1e-12)) {
        dt = std::max(cfg.dt_min, 0.5 * dt_step);
        easy_streak = 0;
        continue;
      }
      throw SolveFailure(ok ? "solve: non-finite values in the updated field"
                            : "solve: nonlinear iteration failed",
                         step, t, history);
    }
    u = std::move(v);
    t += dt_step;
    ++step;
    StepDiagnostics diag;
    diag.t = t;
    diag.dt = dt_step;
    diag.nonlinear_iterations = iters;
    diag.residual_norm = final_res;
    diag.fallback_used = fallback;
    {
      GridField tmp = grid_template;
      tmp.values = u;
      diag.mass = mass(tmp, pb.b);
      diag.support = support_measure(tmp, 0.0);
    }
    traj.steps.push_back(diag);
    history.push_back(final_res);
    if (cfg.adaptive) {
      if (iters <= 6 && !fallback) {
        if (++easy_streak >= 3) {
          dt = std::min(cfg.dt_max, dt * 1.2);
          easy_streak = 0;
        }
      } else {
        easy_streak = 0;
      }
    }
    if (++steps_since_snapshot >= cfg.snapshot_every || t >= t_end * (1.0 - 1e-14)) {
      snapshot(t);
      steps_since_snapshot = 0;
    }
  }
  return traj;
}

}  // namespace

Trajectory solve(const ProblemSpec& problem, int resolution, const NumericsConfig& numerics) {
  return solve(problem, std::array<int, 2>{resolution, resolution}, numerics);
}

Trajectory solve(const ProblemSpec& problem, std::array<int, 2> resolution,
                 const NumericsConfig& numerics) {
  problem.validate();
  numerics.validate();
  if (resolution[0] < 16 || (problem.domain.kind() == Domain::Kind::rectangle && resolution[1] < 16))
    throw std::invalid_argument("solve: need at least 16 nodes per direction");

  GridField init = sample_initial(problem, resolution);
  switch (problem.domain.kind()) {
    case Domain::Kind::interval:
    case Domain::Kind::radial: {
      Mesh1d mesh = problem.domain.kind() == Domain::Kind::interval
                        ? build_mesh_interval(problem.domain.as_interval(), resolution[0])
                        : build_mesh_radial(problem.domain.as_radial(), resolution[0]);
      const double gscale = std::max(1.0, gradient_scale_1d(init.values, mesh.h));
      const double eps = numerics.eps_reg_abs.value_or(numerics.eps_reg_rel * gscale);
      Stepper1d stepper(problem, mesh, numerics, eps);
      auto fill = [&](double t, std::vector<double>& fv) {
        for (size_t i = 0; i < stepper.mesh().x.size(); ++i)
          fv[i] = source_at(problem, stepper.mesh().x[i], 0.0, t);
      };
      return run_time_loop(problem, numerics, stepper, init, init.values, fill);
    }
    case Domain::Kind::rectangle: {
      const auto& r = problem.domain.as_rectangle();
      Mesh2d mesh;
      mesh.nx = resolution[0];
      mesh.ny = resolution[1];
      mesh.hx = (r.bx - r.ax) / (mesh.nx - 1);
      mesh.hy = (r.by - r.ay) / (mesh.ny - 1);
      mesh.x = init.xs;
      mesh.y = init.ys;
      double gscale = 1.0;
      for (size_t j = 0; j < mesh.ny; ++j)
        for (size_t i = 0; i + 1 < mesh.nx; ++i)
          gscale = std::max(gscale, std::abs(init.values[j * mesh.nx + i + 1] -
                                             init.values[j * mesh.nx + i]) /
                                        mesh.hx);
      for (size_t j = 0; j + 1 < mesh.ny; ++j)
        for (size_t i = 0; i < mesh.nx; ++i)
          gscale = std::max(gscale, std::abs(init.values[(j + 1) * mesh.nx + i] -
                                             init.values[j * mesh.nx + i]) /
                                        mesh.hy);
      const double eps = numerics.eps_reg_abs.value_or(numerics.eps_reg_rel * gscale);
      Stepper2d stepper(problem, mesh, numerics, eps);
      auto fill = [&](double t, std::vector<double>& fv) {
        for (size_t j = 0; j < mesh.ny; ++j)
          for (size_t i = 0; i < mesh.nx; ++i)
            fv[j * mesh.nx + i] = source_at(problem, mesh.x[i], mesh.y[j], t);
      };
      return run_time_loop(problem, numerics, stepper, init, init.values, fill);
    }
  }
  throw std::logic_error("solve: unhandled domain kind");
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

namespace {

std::vector<double> cell_measures(const GridField& field) {
  std::vector<double> w;
  switch (field.domain.kind()) {
    case Domain::Kind::interval: {
      const double h = field.xs[1] - field.xs[0];
      w.assign(field.xs.size(), h);
      w.front() = w.back() = 0.5 * h;
      break;
    }
    case Domain::Kind::radial: {
      const double N = field.domain.as_radial().dim;
      const double h = field.xs[1] - field.xs[0];
      const double rmax = field.domain.as_radial().r_max;
      w.resize(field.xs.size());
      for (size_t i = 0; i < field.xs.size(); ++i) {
        const double rl = std::max(0.0, field.xs[i] - 0.5 * h);
        const double rr = std::min(rmax, field.xs[i] + 0.5 * h);
        w[i] = (std::pow(rr, N) - std::pow(rl, N)) / N;
      }
      break;
    }
    case Domain::Kind::rectangle: {
      const double hx = field.xs[1] - field.xs[0];
      const double hy = field.ys[1] - field.ys[0];
      w.resize(field.values.size());
      for (size_t j = 0; j < field.ny(); ++j)
        for (size_t i = 0; i < field.nx(); ++i) {
          const double wx = (i == 0 || i + 1 == field.nx()) ? 0.5 * hx : hx;
          const double wy = (j == 0 || j + 1 == field.ny()) ? 0.5 * hy : hy;
          w[j * field.nx() + i] = wx * wy;
        }
      break;
    }
  }
  return w;
}

}  // namespace

double support_measure(const GridField& field, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("support_measure: threshold must be >= 0");
  const auto w = cell_measures(field);
  double total = 0.0;
  for (size_t i = 0; i < field.values.size(); ++i)
    if (field.values[i] > threshold) total += w[i];
  return total;
}

double mass(const GridField& field, const BFunction& b) {
  switch (field.domain.kind()) {
    case Domain::Kind::interval: {
      std::vector<double> ys(field.values.size());
      for (size_t i = 0; i < ys.size(); ++i) ys[i] = b_extended(b, field.values[i]);
      return trapezoid(field.xs, ys);
    }
    case Domain::Kind::radial: {
      const double N = field.domain.as_radial().dim;
      std::vector<double> ys(field.values.size());
      for (size_t i = 0; i < ys.size(); ++i)
        ys[i] = b_extended(b, field.values[i]) * std::pow(field.xs[i], N - 1.0);
      return trapezoid(field.xs, ys);
    }
    case Domain::Kind::rectangle: {
      const double hx = field.xs[1] - field.xs[0];
      const double hy = field.ys[1] - field.ys[0];
      double total = 0.0;
      for (size_t j = 0; j < field.ny(); ++j)
        for (size_t i = 0; i < field.nx(); ++i) {
          const double wx = (i == 0 || i + 1 == field.nx()) ? 0.5 * hx : hx;
          const double wy = (j == 0 || j + 1 == field.ny()) ? 0.5 * hy : hy;
          total += wx * wy * b_extended(b, field.at(i, j));
        }
      return total;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Finite-difference residual of an arbitrary candidate
// ---------------------------------------------------------------------------

namespace {

template <class F>
double fd_deriv(F&& f, double x, double h, int order) {
  return order >= 4 ? deriv_central4(f, x, h) : deriv_central(f, x, h);
}

}  // namespace

ResidualNorms residual_norms(const SpaceTimeFn& candidate, const ProblemSpec& problem,
                             const FdSamplePlan& plan) {
  problem.validate();
  if (!(plan.h > 0.0)) throw std::invalid_argument("residual_norms: h must be positive");
  const double p = problem.p;
  const double h = plan.h;
  const int order = plan.order;
  auto psi = [&](double g) { return std::pow(std::abs(g), p - 2.0) * g; };

  double max_abs = 0.0, sum2 = 0.0;
  size_t count = 0;
  auto accumulate = [&](double r) {
    max_abs = std::max(max_abs, std::abs(r));
    sum2 += r * r;
    ++count;
  };

  switch (problem.domain.kind()) {
    case Domain::Kind::interval: {
      for (double t : plan.ts)
        for (double x : plan.xs) {
          auto u_of_x = [&](double xx) { return candidate(xx, 0.0, t); };
          auto flux = [&](double xx) { return psi(fd_deriv(u_of_x, xx, h, order)); };
          const double div = fd_deriv(flux, x, h, order);
          auto bu = [&](double tt) { return b_extended(problem.b, candidate(x, 0.0, tt)); };
          const double dt_term = fd_deriv(bu, t, h, order);
          accumulate(dt_term - problem.c * div - source_at(problem, x, 0.0, t));
        }
      break;
    }
    case Domain::Kind::radial: {
      const double N = problem.domain.as_radial().dim;
      for (double t : plan.ts)
        for (double x : plan.xs) {
          auto u_of_r = [&](double rr) { return candidate(std::abs(rr), 0.0, t); };
          auto flux = [&](double rr) {
            return std::pow(std::abs(rr), N - 1.0) * psi(fd_deriv(u_of_r, rr, h, order));
          };
          const double div = std::pow(x, 1.0 - N) * fd_deriv(flux, x, h, order);
          auto bu = [&](double tt) { return b_extended(problem.b, candidate(x, 0.0, tt)); };
          const double dt_term = fd_deriv(bu, t, h, order);
          accumulate(dt_term - problem.c * div - source_at(problem, x, 0.0, t));
        }
      break;
    }
    case Domain::Kind::rectangle: {
      for (double t : plan.ts)
        for (double y : plan.ys)
          for (double x : plan.xs) {
            auto phix = [&](double xx) {
              auto ux = [&](double xxx) { return candidate(xxx, y, t); };
              auto uy = [&](double yyy) { return candidate(xx, yyy, t); };
              const double gx = fd_deriv(ux, xx, h, order);
              const double gy = fd_deriv(uy, y, h, order);
              return std::pow(gx * gx + gy * gy, 0.5 * (p - 2.0)) * gx;
            };
            auto phiy = [&](double yy) {
              auto ux = [&](double xxx) { return candidate(xxx, yy, t); };
              auto uy = [&](double yyy) { return candidate(x, yyy, t); };
              const double gx = fd_deriv(ux, x, h, order);
              const double gy = fd_deriv(uy, yy, h, order);
              return std::pow(gx * gx + gy * gy, 0.5 * (p - 2.0)) * gy;
            };
            const double div = fd_deriv(phix, x, h, order) + fd_deriv(phiy, y, h, order);
            auto bu = [&](double tt) { return b_extended(problem.b, candidate(x, y, tt)); };
            const double dt_term = fd_deriv(bu, t, h, order);
            accumulate(dt_term - problem.c * div - source_at(problem, x, y, t));
          }
      break;
    }
  }
  ResidualNorms norms;
  norms.max_abs = max_abs;
  norms.l2 = count ? std::sqrt(sum2 / static_cast<double>(count)) : 0.0;
  return norms;
}

}  // namespace plgw
