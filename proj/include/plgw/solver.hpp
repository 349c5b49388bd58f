#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "plgw/constitutive.hpp"
#include "plgw/domain.hpp"
#include "plgw/grid.hpp"

namespace plgw {

/// Scalar field of space and time; the y argument is ignored on 1-d domains.
using SpaceTimeFn = std::function<double(double x, double y, double t)>;
using SpaceFn = std::function<double(double x, double y)>;

/// Initial-boundary value problem d/dt b(u) - c div(|grad u|^{p-2} grad u) = f
/// with homogeneous Dirichlet boundary values.
struct ProblemSpec {
  Domain domain = Domain::interval(0.0, 1.0);
  double p = 2.0;
  double c = 1.0;
  BFunction b = BFunction::identity();
  SpaceTimeFn f;  // null means zero
  SpaceFn u0;     // null means zero
  double T = 1.0;

  void validate() const;
};

struct NumericsConfig {
  double dt = 1e-3;
  bool adaptive = false;
  double dt_min = 1e-8;
  double dt_max = 1e-1;
  double eps_reg_rel = 1e-8;                // regularization relative to the gradient scale
  std::optional<double> eps_reg_abs;        // overrides the relative rule when set
  double tol_nonlinear = 1e-10;             // relative nonlinear residual tolerance
  int max_iters = 50;
  double jacobian_floor = 1e-12;            // b' evaluated at max(u, floor)
  double linear_tol = 1e-12;
  int snapshot_every = 1;                   // keep every k-th step in the trajectory

  void validate() const;
};

class SolveFailure : public std::runtime_error {
 public:
  SolveFailure(const std::string& what, int step, double t, std::vector<double> history)
      : std::runtime_error(what), step_index(step), time(t), residual_history(std::move(history)) {}
  int step_index;
  double time;
  std::vector<double> residual_history;
};

/// Implicit Euler in the conservative form
///   (b(u^{n+1}) - b(u^n)) / dt = c div_h(|grad_h u^{n+1}|_eps^{p-2} grad_h u^{n+1}) + f^{n+1}
/// solved per step by damped Newton with an L-scheme fallback. Direct
/// tridiagonal solves on interval/radial grids, Jacobi-preconditioned CG on
/// rectangles. Identical inputs produce bit-identical trajectories.
Trajectory solve(const ProblemSpec& problem, int resolution, const NumericsConfig& numerics);
Trajectory solve(const ProblemSpec& problem, std::array<int, 2> resolution,
                 const NumericsConfig& numerics);

struct ResidualNorms {
  double max_abs = 0.0;
  double l2 = 0.0;  // root mean square over the samples
};

/// Finite-difference sampling plan for residual_norms: interior sample
/// coordinates, stencil width h, and the difference order (2 or 4).
struct FdSamplePlan {
  std::vector<double> xs;
  std::vector<double> ys;  // empty on 1-d domains
  std::vector<double> ts;
  double h = 1e-4;
  int order = 4;
};

/// PDE residual of an arbitrary candidate u(x[,y],t) measured by finite
/// differences; independent of the solver's discretization.
ResidualNorms residual_norms(const SpaceTimeFn& candidate, const ProblemSpec& problem,
                             const FdSamplePlan& plan);

/// Total cell measure where the nodal value exceeds the threshold
/// (length, r^{N-1}-weighted volume, or area depending on the domain).
double support_measure(const GridField& field, double threshold);

/// Trapezoidal integral of b(u) over the domain (r^{N-1}-weighted on radial
/// grids). Slightly negative nodal values are handled by the odd extension
/// of b.
double mass(const GridField& field, const BFunction& b);

/// b extended to negative arguments as an odd function; the solver iterates
/// may briefly leave the nonnegative range.
double b_extended(const BFunction& b, double s);

/// Uniform grid with the problem's Dirichlet values imposed; fields[0] of a
/// trajectory equals sample_initial(problem, resolution...).
GridField sample_initial(const ProblemSpec& problem, int resolution);
GridField sample_initial(const ProblemSpec& problem, std::array<int, 2> resolution);

}  // namespace plgw
