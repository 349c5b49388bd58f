#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace plgw {

/// Solves a tridiagonal system in place (Thomas algorithm).
/// lower[0] and upper[n-1] are ignored. Throws on a zero pivot.
std::vector<double> tridiagonal_solve(std::span<const double> lower,
                                      std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs);

struct CgResult {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradient with a diagonal (Jacobi) preconditioner.
/// `apply` computes y = A x for the SPD operator A. Iteration order is fixed,
/// so results are bit-reproducible for identical inputs.
CgResult conjugate_gradient(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                            std::span<const double> diag_precond,
                            std::span<const double> rhs,
                            std::span<double> x,
                            double rel_tol,
                            int max_iterations);

/// Adaptive Simpson quadrature with an absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 60);

/// Root of a continuous function on [lo, hi] by bisection; requires a sign
/// change between the endpoints.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double rel_tol, int max_iterations = 200);

/// Ordinary least squares fit y = intercept + slope * x.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
};
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

/// Centered first derivative, O(h^2).
template <class F>
double deriv_central(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Centered first derivative, O(h^4).
template <class F>
double deriv_central4(F&& f, double x, double h) {
  return (8.0 * (f(x + h) - f(x - h)) - (f(x + 2.0 * h) - f(x - 2.0 * h))) / (12.0 * h);
}

/// One-sided first derivative, O(h^4); side = +1 uses nodes x, x+h, ..., x+4h.
template <class F>
double deriv_onesided4(F&& f, double x, double h, int side) {
  const double s = side >= 0 ? 1.0 : -1.0;
  const double hh = s * h;
  return s *
         (-25.0 * f(x) + 48.0 * f(x + hh) - 36.0 * f(x + 2.0 * hh) + 16.0 * f(x + 3.0 * hh) -
          3.0 * f(x + 4.0 * hh)) /
         (12.0 * h);
}

/// Trapezoidal rule over sample pairs (x_i, y_i) with x strictly increasing.
double trapezoid(std::span<const double> xs, std::span<const double> ys);

inline double sqr(double x) { return x * x; }

}  // namespace plgw
