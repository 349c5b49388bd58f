#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "plgw/constitutive.hpp"
#include "plgw/solver.hpp"

namespace plgw {

/// Evolutionary solution v(x,t) = t x^beta (1 - x^gamma) on (0,1), zero on
/// (-1,0], together with the nonnegative right-hand side
/// f = b'(v) dv/dt - d/dx(|v_x|^{p-2} v_x) that turns it into a solution of
/// the zero-initial-data problem. Requires p > 2 and
/// beta > max(2, p/(p-2)), 0 < gamma <= beta, which make v C^1 across x = 0
/// and (beta-1)(p-2) - 2 > 0.
struct SmpCounterexample {
  double p, beta, gamma;
  BFunction b;
  double range_max;  // b' lower bound is taken over (0, range_max]
  double kmin;

  SmpCounterexample(double p_, double beta_, double gamma_, BFunction b_, double range_max_ = 1.0);

  double v(double x, double t) const;
  double v_t(double x) const;
  double v_x(double x, double t) const;
  double v_xx(double x, double t) const;

  /// f(x,t); domain error outside (-1,1). Zero for x <= 0.
  double rhs(double x, double t) const;

  /// The bracketed positivity factor with b' replaced by kmin:
  /// (1-x^gamma) - (p-1) beta^{p-1} (beta-1) kmin^{-1} t^{p-1}
  ///   x^{(beta-1)(p-2)-2} |1-((beta+gamma)/beta) x^gamma|^{p-2}
  ///   (1-((beta+gamma)(beta+gamma-1))/(beta(beta-1)) x^gamma).
  double positivity_factor(double x, double t) const;
};

/// Largest t (relative bisection tolerance 1e-3) with the positivity factor
/// strictly positive on a uniform grid over (0,1); f >= 0 on (0,1) x (0,t0]
/// follows. Throws when the factor is already nonpositive at tiny times.
double positivity_horizon(const SmpCounterexample& ce, int grid_nodes = 2001);

struct SolverSettings {
  int resolution = 801;
  NumericsConfig numerics;
};

struct SmpFailureReport {
  double t_horizon = 0.0;
  double t0 = 0.0;
  double kmin = 0.0;
  double range_max = 0.0;
  double attained_max = 0.0;        // max of the numerical solution
  double analytic_residual_max = 0.0;
  double rhs_grid_min = 0.0;        // min of f over the check grid, t <= horizon
  double max_left = 0.0;            // max |u| on (-1, -0.05] over all steps
  double max_right_final = 0.0;     // max u on (0,1) at the final time
  bool residual_ok = false;
  bool left_ok = false;
  bool right_ok = false;
  bool violated = false;
  std::string verdict;
  nlohmann::json to_json() const;
};

/// End-to-end SMP failure demonstration: analytic residual check, then a
/// solver run from zero initial data with f = rhs. The left half must stay
/// below 1e-6 while the right half rises above 1e-3 * t_horizon.
SmpFailureReport demonstrate_smp_failure(const SmpCounterexample& ce,
                                         const SolverSettings& settings, double t_horizon);

/// Waiting-time instance at the degeneracy point x = 0: stationary
/// u = 1 - |x|^alpha with source f_s, perturbed through
/// h_i = f_s + |x|^beta psi_i. Requires p > 2,
/// max(2, p/(p-2)) <= alpha < beta, gamma = beta - alpha.
struct ScpInstance {
  double p, alpha, beta, gamma, C;
  BFunction b;
  double range_max;
  double kmin;
  SpaceTimeFn psi1, psi2;

  ScpInstance(double p_, double alpha_, double beta_, double C_, BFunction b_, SpaceTimeFn psi1_,
              SpaceTimeFn psi2_, double range_max_ = 2.0);

  double f_s(double x) const;
  double u_stationary(double x) const { return 1.0 - std::pow(std::abs(x), alpha); }
  double v_hat(double x, double t) const;

  /// (ghat, bound_ok): ghat = b'(v_hat) dv_hat/dt - d/dx(|v_hat_x|^{p-2} v_hat_x)
  /// with the flux derivative by one-sided 4th-order differences near the |x|
  /// kinks at 0 and +-1; bound_ok checks
  /// ghat - f_s >= 1/2 |x|^beta (1 - |x|^gamma + (C/kmin) t).
  std::pair<double, bool> hat_g(double x, double t) const;

  /// Largest t such that the hat_g bound holds on a grid for sampled times
  /// up to t (relative bisection tolerance 1e-3).
  double bound_horizon(int grid_nodes = 2001) const;

  /// Validates psi admissibility on a grid: 0 <= psi1 <= psi2,
  /// psi2 under the admissibility cap, psi1 != psi2 on early slabs.
  /// Returns a human-readable failure, or empty when admissible.
  std::string check_psi(int grid_nodes, double t_horizon) const;
};

struct WaitingTimeReport {
  double t_horizon = 0.0;
  double tol = 0.0;
  bool hypothesis_ok = false;        // psi admissibility
  std::string hypothesis_message;
  bool ordered_ok = false;           // w1 <= w2 + tol everywhere
  double max_diff = 0.0;             // max (w2 - w1)
  bool separated_ok = false;         // max_diff > 10 tol
  double max_pin_diff = 0.0;         // max_t |w1(0,t) - w2(0,t)|
  bool pinned_ok = false;
  double left_diff = 0.0;            // max |w1 - w2| on (-1, 0]
  double left_dev_from_u = 0.0;      // max |w_i - u| on (-1, 0]
  bool left_ok = false;
  bool psi_cap_ok = false;     // psi2 <= 1/2 |x|^beta (1-|x|^gamma + C t)
  bool margin_ok = false;     // hat_g - f_s >= 1/2 |x|^beta (1-|x|^gamma + (C/kmin) t)
  bool all_ok = false;
  nlohmann::json to_json() const;
};

WaitingTimeReport demonstrate_waiting_time(const ScpInstance& inst, const SolverSettings& settings,
                                           double t_horizon);

/// Solves both problems (identical up to ordered f and u0) and checks the
/// discrete weak comparison u_A <= u_B + 1e-8 * scale at every node and step.
bool comparison_check(const ProblemSpec& a, const ProblemSpec& b, int resolution,
                      const NumericsConfig& numerics);

}  // namespace plgw
