#pragma once

#include <vector>

#include "plgw/domain.hpp"

namespace plgw {

/// Nodal values on a uniform grid over a Domain. For rectangles the layout is
/// row-major with x fastest: values[j * nx + i] at (xs[i], ys[j]).
struct GridField {
  Domain domain = Domain::interval(0.0, 1.0);
  std::vector<double> xs;
  std::vector<double> ys;  // empty for 1-d domains
  std::vector<double> values;

  bool two_d() const { return !ys.empty(); }
  size_t nx() const { return xs.size(); }
  size_t ny() const { return ys.size(); }
  double& at(size_t i) { return values[i]; }
  double at(size_t i) const { return values[i]; }
  double& at(size_t i, size_t j) { return values[j * xs.size() + i]; }
  double at(size_t i, size_t j) const { return values[j * xs.size() + i]; }
};

struct StepDiagnostics {
  double t = 0.0;
  double dt = 0.0;
  int nonlinear_iterations = 0;
  double residual_norm = 0.0;  // relative, at acceptance of the step
  double mass = 0.0;           // integral of b(u)
  double support = 0.0;        // measure of {u > 0}
  bool fallback_used = false;
};

struct Trajectory {
  std::vector<double> times;        // snapshot stamps, starting at 0
  std::vector<GridField> fields;    // one per stamp; fields[0] is u0 on the grid
  std::vector<StepDiagnostics> steps;  // one per time step taken
};

}  // namespace plgw
