#include "plgw/principles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plgw/numerics.hpp"

namespace plgw {

SmpCounterexample::SmpCounterexample(double p_, double beta_, double gamma_, BFunction b_,
                                     double range_max_)
    : p(p_), beta(beta_), gamma(gamma_), b(std::move(b_)), range_max(range_max_) {
  if (!(p > 2.0))
    throw std::invalid_argument(
        "SmpCounterexample: requires p > 2 (for 1 < p < 2 the strong maximum principle holds "
        "whenever the b-condition is satisfied)");
  const double beta_min = std::max(2.0, p / (p - 2.0));
  if (!(beta > beta_min))
    throw std::invalid_argument("SmpCounterexample: requires beta > max(2, p/(p-2))");
  if (!(gamma > 0.0) || !(gamma <= beta))
    throw std::invalid_argument("SmpCounterexample: requires 0 < gamma <= beta");
  if (!((beta - 1.0) * (p - 2.0) - 2.0 > 0.0))
    throw std::invalid_argument("SmpCounterexample: requires (beta-1)(p-2) - 2 > 0");
  if (!(range_max > 0.0)) throw std::invalid_argument("SmpCounterexample: range_max must be positive");
  kmin = b.prime_lower_bound(range_max);
  if (!(kmin > 0.0))
    throw std::invalid_argument(
        "SmpCounterexample: b' has no positive lower bound on the requested range");
}

double SmpCounterexample::v(double x, double t) const {
  if (x <= 0.0) return 0.0;
  return t * std::pow(x, beta) * (1.0 - std::pow(x, gamma));
}

double SmpCounterexample::v_t(double x) const {
  if (x <= 0.0) return 0.0;
  return std::pow(x, beta) * (1.0 - std::pow(x, gamma));
}

double SmpCounterexample::v_x(double x, double t) const {
  if (x <= 0.0) return 0.0;
  return t * std::pow(x, beta - 1.0) * (beta - (beta + gamma) * std::pow(x, gamma));
}

double SmpCounterexample::v_xx(double x, double t) const {
  if (x <= 0.0) return 0.0;
  return t * std::pow(x, beta - 2.0) *
         (beta * (beta - 1.0) - (beta + gamma) * (beta + gamma - 1.0) * std::pow(x, gamma));
}

double SmpCounterexample::rhs(double x, double t) const {
  if (!(x > -1.0) || !(x < 1.0)) throw std::domain_error("SmpCounterexample::rhs: x outside (-1,1)");
  if (t < 0.0) throw std::domain_error("SmpCounterexample::rhs: negative time");
  if (x <= 0.0) return 0.0;
  const double vt = v_t(x);
  const double vv = v(x, t);
  const double bp = vv > 0.0 ? b.prime(vv) : b.prime_limit_at_zero();
  if (!std::isfinite(bp))
    throw std::domain_error("SmpCounterexample::rhs: b'(0+) is infinite for this b");
  const double vx = v_x(x, t);
  const double flux_dx = (p - 1.0) * std::pow(std::abs(vx), p - 2.0) * v_xx(x, t);
  return bp * vt - flux_dx;
}

double SmpCounterexample::positivity_factor(double x, double t) const {
  const double xg = std::pow(x, gamma);
  const double amp = (p - 1.0) * std::pow(beta, p - 1.0) * (beta - 1.0) / kmin;
  const double shape = std::pow(x, (beta - 1.0) * (p - 2.0) - 2.0) *
                       std::pow(std::abs(1.0 - (beta + gamma) / beta * xg), p - 2.0) *
                       (1.0 - (beta + gamma) * (beta + gamma - 1.0) / (beta * (beta - 1.0)) * xg);
  return (1.0 - xg) - amp * std::pow(t, p - 1.0) * shape;
}

double positivity_horizon(const SmpCounterexample& ce, int grid_nodes) {
  if (grid_nodes < 3) throw std::invalid_argument("positivity_horizon: grid too small");
  std::vector<double> xs(grid_nodes);
  for (int i = 0; i < grid_nodes; ++i)
    xs[i] = (i + 1.0) / (grid_nodes + 1.0);  // interior of (0,1)
  auto grid_min = [&](double t) {
    double m = std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::min(m, ce.positivity_factor(x, t));
    return m;
  };
  const double t_tiny = 1e-12;
  if (!(grid_min(t_tiny) > 0.0))
    throw std::runtime_error("positivity_horizon: factor nonpositive at vanishing time");
  double hi = 1e-3;
  int guard = 0;
  while (grid_min(hi) > 0.0 && guard++ < 80) hi *= 2.0;
  if (guard >= 80) return hi;  // positive on any practical horizon
  double lo = hi * 0.5;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (grid_min(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    if ((hi - lo) <= 1e-3 * lo) break;
  }
  return lo;
}

nlohmann::json SmpFailureReport::to_json() const {
  return nlohmann::json{{"t_horizon", t_horizon},
                        {"t0", t0},
                        {"kmin", kmin},
                        {"range_max", range_max},
                        {"attained_max", attained_max},
                        {"analytic_residual_max", analytic_residual_max},
                        {"rhs_grid_min", rhs_grid_min},
                        {"max_left", max_left},
                        {"max_right_final", max_right_final},
                        {"residual_ok", residual_ok},
                        {"left_ok", left_ok},
                        {"right_ok", right_ok},
                        {"violated", violated},
                        {"verdict", verdict}};
}

SmpFailureReport demonstrate_smp_failure(const SmpCounterexample& ce,
                                         const SolverSettings& settings, double t_horizon) {
  SmpFailureReport rep;
  rep.t0 = positivity_horizon(ce);
  rep.kmin = ce.kmin;
  rep.range_max = ce.range_max;
  if (!(t_horizon > 0.0) || t_horizon > rep.t0 * (1.0 + 1e-9))
    throw std::invalid_argument("demonstrate_smp_failure: t_horizon must lie in (0, t0]");
  rep.t_horizon = t_horizon;

  ProblemSpec pb;
  pb.domain = Domain::interval(-1.0, 1.0);
  pb.p = ce.p;
  pb.c = 1.0;
  pb.b = ce.b;
  // rhs extends by zero onto the Dirichlet nodes at x = +-1
  pb.f = [&ce](double x, double, double t) {
    return (x > -1.0 && x < 1.0) ? ce.rhs(x, t) : 0.0;
  };
  pb.u0 = SpaceFn{};  // zero initial data
  pb.T = t_horizon;

  // (a) the analytic v solves the PDE with the constructed f
  {
    FdSamplePlan plan;
    for (double x = 0.10; x <= 0.901; x += 0.05) plan.xs.push_back(x);
    const double tlo = std::min(0.01, 0.1 * t_horizon);
    for (int i = 0; i <= 10; ++i) plan.ts.push_back(tlo + (t_horizon - tlo) * i / 10.0);
    plan.h = 1e-4;
    plan.order = 4;
    auto cand = [&ce](double x, double, double t) { return ce.v(x, t); };
    rep.analytic_residual_max = residual_norms(cand, pb, plan).max_abs;
            rep.residual_ok = rep.analytic_residual_max < 1e-6;
  }

  // nonnegativity of the constructed f on the horizon
  {
    double fmin = std::numeric_limits<double>::infinity();
    for (int i = 1; i < 2001; ++i) {
      const double x = -1.0 + 2.0 * i / 2001.0;
      for (int j = 1; j <= 8; ++j) fmin = std::min(fmin, ce.rhs(x, t_horizon * j / 8.0));
    }
    rep.rhs_grid_min = fmin;
  }

  // (b) solver run from zero data; keep every step so the left-side bound
  // is checked on the whole horizon
  NumericsConfig numerics = settings.numerics;
  numerics.snapshot_every = 1;
  Trajectory traj = solve(pb, settings.resolution, numerics);
  double max_left = 0.0, attained = 0.0;
  for (const auto& field : traj.fields)
    for (size_t i = 0; i < field.xs.size(); ++i) {
      attained = std::max(attained, field.values[i]);
      if (field.xs[i] <= -0.05) max_left = std::max(max_left, std::abs(field.values[i]));
    }
  const auto& last = traj.fields.back();
  double max_right = 0.0;
  for (size_t i = 0; i < last.xs.size(); ++i)
    if (last.xs[i] > 0.0 && last.xs[i] < 1.0) max_right = std::max(max_right, last.values[i]);
  rep.max_left = max_left;
  rep.max_right_final = max_right;
  rep.attained_max = attained;
  rep.left_ok = max_left <= 1e-6;
  rep.right_ok = max_right > 1e-3 * t_horizon;
  rep.violated = rep.left_ok && rep.right_ok && rep.rhs_grid_min >= 0.0;
  rep.verdict = rep.violated
                    ? "SMP violated: nonnegative f, zero initial data, solution not everywhere "
                      "positive"
                    : "inconclusive";
  if (attained > ce.range_max)
    throw std::runtime_error("demonstrate_smp_failure: solution exceeded the kmin range");
  return rep;
}

// ---------------------------------------------------------------------------

ScpInstance::ScpInstance(double p_, double alpha_, double beta_, double C_, BFunction b_,
                         SpaceTimeFn psi1_, SpaceTimeFn psi2_, double range_max_)
    : p(p_), alpha(alpha_), beta(beta_), gamma(beta_ - alpha_), C(C_), b(std::move(b_)),
      range_max(range_max_), psi1(std::move(psi1_)), psi2(std::move(psi2_)) {
  if (!(p > 2.0)) throw std::invalid_argument("ScpInstance: requires p > 2");
  const double alpha_min = std::max(2.0, p / (p - 2.0));
  if (!(alpha >= alpha_min))
    throw std::invalid_argument("ScpInstance: requires alpha >= max(2, p/(p-2))");
  if (!(beta > alpha)) throw std::invalid_argument("ScpInstance: requires beta > alpha");
  if (!(C > 0.0)) throw std::invalid_argument("ScpInstance: requires C > 0");
  if (!psi1 || !psi2) throw std::invalid_argument("ScpInstance: psi1 and psi2 must be set");
  kmin = b.prime_lower_bound(range_max);
  if (!(kmin > 0.0))
    throw std::invalid_argument("ScpInstance: b' has no positive lower bound on the range");
}

double ScpInstance::f_s(double x) const {
  return (p - 1.0) * std::pow(alpha, p - 1.0) * (alpha - 1.0) *
         std::pow(std::abs(x), (alpha - 1.0) * (p - 2.0) + alpha - 2.0);
}

double ScpInstance::v_hat(double x, double t) const {
  const double ax = std::abs(x);
  return 1.0 - std::pow(ax, alpha) + t * std::pow(ax, beta) * (1.0 - std::pow(ax, gamma));
}

std::pair<double, bool> ScpInstance::hat_g(double x, double t) const {
  const double ax = std::abs(x);
  const double sgn = x >= 0.0 ? 1.0 : -1.0;
  const double dvdt = std::pow(ax, beta) * (1.0 - std::pow(ax, gamma));
  const double vh = v_hat(x, t);
  const double bp = vh > 0.0 ? b.prime(vh) : b.prime_limit_at_zero();

  auto vx = [&](double xx) {
    const double axx = std::abs(xx);
    const double s = xx >= 0.0 ? 1.0 : -1.0;
    return s * (-alpha * std::pow(axx, alpha - 1.0) +
                t * (beta * std::pow(axx, beta - 1.0) -
                     (beta + gamma) * std::pow(axx, beta + gamma - 1.0)));
  };
  auto flux = [&](double xx) {
    const double g = vx(xx);
    return std::pow(std::abs(g), p - 2.0) * g;
  };

  double flux_dx;
  const double kink_band = 5e-3;
  if (ax < kink_band) {
    // one-sided stencil pointing away from the kink at x = 0
    flux_dx = deriv_onesided4(flux, x, 1e-4, x >= 0.0 ? +1 : -1);
  } else if (ax > 1.0 - kink_band) {
    flux_dx = deriv_onesided4(flux, x, 1e-4, x >= 0.0 ? -1 : +1);
  } else {
    const double g = vx(x);
    const double vxx = -alpha * (alpha - 1.0) * std::pow(ax, alpha - 2.0) +
                       t * (beta * (beta - 1.0) * std::pow(ax, beta - 2.0) -
                            (beta + gamma) * (beta + gamma - 1.0) *
                                std::pow(ax, beta + gamma - 2.0));
    flux_dx = (p - 1.0) * std::pow(std::abs(g), p - 2.0) * vxx;
    (void)sgn;
  }
  const double ghat = bp * dvdt - flux_dx;
  const double bound =
      0.5 * std::pow(ax, beta) * (1.0 - std::pow(ax, gamma) + (C / kmin) * t);
  return {ghat, ghat - f_s(x) >= bound};
}

double ScpInstance::bound_horizon(int grid_nodes) const {
  std::vector<double> xs(grid_nodes);
  for (int i = 0; i < grid_nodes; ++i) xs[i] = -1.0 + 2.0 * (i + 1.0) / (grid_nodes + 1.0);
  auto holds_at = [&](double t) {
    for (double x : xs)
      if (!hat_g(x, t).second) return false;
    return true;
  };
  auto holds_up_to = [&](double t) {
    for (int j = 1; j <= 8; ++j)
      if (!holds_at(t * j / 8.0)) return false;
    return true;
  };
  double lo = 1e-9;
  if (!holds_up_to(lo))
    throw std::runtime_error("ScpInstance::bound_horizon: bound fails at vanishing time");
  double hi = 1e-3;
  int guard = 0;
  while (holds_up_to(hi) && guard++ < 60) {
    lo = hi;
    hi *= 2.0;
  }
  if (guard >= 60) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (holds_up_to(mid))
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-3 * lo) break;
  }
  return lo;
}

std::string ScpInstance::check_psi(int grid_nodes, double t_horizon) const {
  std::ostringstream problems;
  bool psi_differs = false;
  for (int j = 0; j <= 10; ++j) {
    const double t = t_horizon * j / 10.0;
    for (int i = 0; i < grid_nodes; ++i) {
      const double x = -1.0 + 2.0 * (i + 1.0) / (grid_nodes + 1.0);
      const double p1 = psi1(x, 0.0, t), p2 = psi2(x, 0.0, t);
      if (p1 < 0.0) {
        problems << "psi1 negative at x=" << x << ", t=" << t << "; ";
        return problems.str();
      }
      if (p1 > p2 + 1e-14) {
        problems << "psi1 > psi2 at x=" << x << ", t=" << t << "; ";
        return problems.str();
      }
      const double ax = std::abs(x);
      const double cap = 0.5 * std::pow(ax, beta) * (1.0 - std::pow(ax, gamma) + C * t);
      if (p2 > cap + 1e-14) {
        problems << "hypothesis (i) violated: psi2 exceeds (1/2)|x|^beta(1-|x|^gamma+Ct) at x=" << x
                 << ", t=" << t << "; ";
        return problems.str();
      }
      if (j <= 2 && p2 - p1 > 1e-14) psi_differs = true;
    }
  }
  if (!psi_differs) return "psi1 == psi2 on the initial time slab (hypothesis (ii) violated)";
  return {};
}

nlohmann::json WaitingTimeReport::to_json() const {
  return nlohmann::json{{"t_horizon", t_horizon},
                        {"tol", tol},
                        {"hypothesis_ok", hypothesis_ok},
                        {"hypothesis_message", hypothesis_message},
                        {"ordered_ok", ordered_ok},
                        {"max_diff", max_diff},
                        {"separated_ok", separated_ok},
                        {"max_pin_diff", max_pin_diff},
                        {"pinned_ok", pinned_ok},
                        {"left_diff", left_diff},
                        {"left_dev_from_u", left_dev_from_u},
                        {"left_ok", left_ok},
                        {"psi_cap_ok", psi_cap_ok},
                        {"margin_ok", margin_ok},
                        {"all_ok", all_ok}};
}

WaitingTimeReport demonstrate_waiting_time(const ScpInstance& inst, const SolverSettings& settings,
                                           double t_horizon) {
  WaitingTimeReport rep;
  rep.t_horizon = t_horizon;
  rep.tol = 1e-6;  // scale: max |u0| = 1

  const std::string psi_problem = inst.check_psi(501, t_horizon);
  rep.hypothesis_ok = psi_problem.empty();
  rep.hypothesis_message = psi_problem;
  rep.psi_cap_ok = rep.hypothesis_ok;
  if (!rep.hypothesis_ok) return rep;

  // supersolution margin: checked on the demonstration horizon
  rep.margin_ok = inst.bound_horizon(501) >= t_horizon;

  ProblemSpec base;
  base.domain = Domain::interval(-1.0, 1.0);
  base.p = inst.p;
  base.c = 1.0;
  base.b = inst.b;
  base.u0 = [&inst](double x, double) { return inst.u_stationary(x); };
  base.T = t_horizon;

  ProblemSpec pb1 = base, pb2 = base;
  pb1.f = [&inst](double x, double, double t) {
    return inst.f_s(x) + std::pow(std::abs(x), inst.beta) * inst.psi1(x, 0.0, t);
  };
  pb2.f = [&inst](double x, double, double t) {
    return inst.f_s(x) + std::pow(std::abs(x), inst.beta) * inst.psi2(x, 0.0, t);
  };

  NumericsConfig numerics = settings.numerics;
  numerics.snapshot_every = 1;  // the pinning assertion covers every step
  Trajectory t1 = solve(pb1, settings.resolution, numerics);
  Trajectory t2 = solve(pb2, settings.resolution, numerics);
  if (t1.times.size() != t2.times.size())
    throw std::runtime_error("demonstrate_waiting_time: trajectories lost step alignment");

  const auto& xs = t1.fields.front().xs;
  const size_t mid = (xs.size() - 1) / 2;  // x = 0 for an odd node count
  if (std::abs(xs[mid]) > 1e-12)
    throw std::invalid_argument("demonstrate_waiting_time: use an odd node count so x=0 is a node");

  double max_diff = 0.0, min_diff = 0.0, pin = 0.0, left_diff = 0.0, left_dev = 0.0;
  double attained = 0.0;
  for (size_t s = 0; s < t1.fields.size(); ++s) {
    const auto& w1 = t1.fields[s].values;
    const auto& w2 = t2.fields[s].values;
    for (size_t i = 0; i < xs.size(); ++i) {
      const double d = w2[i] - w1[i];
      max_diff = std::max(max_diff, d);
      min_diff = std::min(min_diff, d);
      attained = std::max({attained, std::abs(w1[i]), std::abs(w2[i])});
      if (i == mid) pin = std::max(pin, std::abs(d));
      if (xs[i] <= 1e-12) {
        left_diff = std::max(left_diff, std::abs(d));
        const double u = inst.u_stationary(xs[i]);
        left_dev = std::max({left_dev, std::abs(w1[i] - u), std::abs(w2[i] - u)});
      }
    }
  }
  rep.ordered_ok = min_diff >= -rep.tol;
  rep.max_diff = max_diff;
  rep.separated_ok = max_diff > 10.0 * rep.tol;
  rep.max_pin_diff = pin;
  rep.pinned_ok = pin <= rep.tol;
  rep.left_diff = left_diff;
  rep.left_dev_from_u = left_dev;
  rep.left_ok = left_diff <= rep.tol;
  rep.all_ok = rep.ordered_ok && rep.separated_ok && rep.pinned_ok && rep.left_ok;
  if (attained > inst.range_max)
    throw std::runtime_error("demonstrate_waiting_time: solution exceeded the kmin range");
  return rep;
}

bool comparison_check(const ProblemSpec& a, const ProblemSpec& b, int resolution,
                      const NumericsConfig& numerics) {
  if (!a.domain.same_as(b.domain) || a.p != b.p || a.c != b.c || !a.b.same_as(b.b) || a.T != b.T)
    throw std::invalid_argument("comparison_check: specs differ beyond (f, u0)");
  Trajectory ta = solve(a, resolution, numerics);
  Trajectory tb = solve(b, resolution, numerics);
  double scale = 1.0;
  for (const auto& f : ta.fields)
    for (double v : f.values) scale = std::max(scale, std::abs(v));
  for (const auto& f : tb.fields)
    for (double v : f.values) scale = std::max(scale, std::abs(v));
  const double tol = 1e-8 * scale;
  for (size_t s = 0; s < ta.fields.size(); ++s)
    for (size_t i = 0; i < ta.fields[s].values.size(); ++i)
      if (ta.fields[s].values[i] > tb.fields[s].values[i] + tol) return false;
  return true;
}

}  // namespace plgw
