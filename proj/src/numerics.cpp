#include "plgw/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace plgw {

std::vector<double> tridiagonal_solve(std::span<const double> lower,
                                      std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs) {
  const size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n)
    throw std::invalid_argument("tridiagonal_solve: size mismatch");
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> r(rhs.begin(), rhs.end());
  for (size_t i = 1; i < n; ++i) {
    if (d[i - 1] == 0.0) throw std::runtime_error("tridiagonal_solve: zero pivot");
    const double m = lower[i] / d[i - 1];
    d[i] -= m * upper[i - 1];
    r[i] -= m * r[i - 1];
  }
  if (d[n - 1] == 0.0) throw std::runtime_error("tridiagonal_solve: zero pivot");
  std::vector<double> x(n);
  x[n - 1] = r[n - 1] / d[n - 1];
  for (size_t i = n - 1; i-- > 0;) x[i] = (r[i] - upper[i] * x[i + 1]) / d[i];
  return x;
}

CgResult conjugate_gradient(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                            std::span<const double> diag_precond,
                            std::span<const double> rhs,
                            std::span<double> x,
                            double rel_tol,
                            int max_iterations) {
  const size_t n = rhs.size();
  std::vector<double> r(n), z(n), p(n), ap(n);
  apply(x, ap);
  double rhs_norm2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    r[i] = rhs[i] - ap[i];
    rhs_norm2 += rhs[i] * rhs[i];
  }
  const double stop2 = std::max(rhs_norm2, 1e-300) * rel_tol * rel_tol;
  auto precond = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (size_t i = 0; i < n; ++i) out[i] = v[i] / diag_precond[i];
  };
  precond(r, z);
  p = z;
  double rz = 0.0, rr = 0.0;
  for (size_t i = 0; i < n; ++i) {
    rz += r[i] * z[i];
    rr += r[i] * r[i];
  }
  CgResult res;
  for (int it = 0; it < max_iterations; ++it) {
    if (rr <= stop2) {
      res.converged = true;
      break;
    }
    apply(p, ap);
    double pap = 0.0;
    for (size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (pap <= 0.0) throw std::runtime_error("conjugate_gradient: operator not positive definite");
    const double alpha = rz / pap;
    for (size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    precond(r, z);
    double rz_new = 0.0;
    rr = 0.0;
    for (size_t i = 0; i < n; ++i) {
      rz_new += r[i] * z[i];
      rr += r[i] * r[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    res.iterations = it + 1;
  }
  if (rr <= stop2) res.converged = true;
  res.residual = std::sqrt(rr);
  return res;
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                            double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                   int max_iterations) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw std::invalid_argument("bisect_root: no sign change on bracket");
  for (int it = 0; it < max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("linear_fit: need at least two points");
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::runtime_error("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

double trapezoid(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("trapezoid: need at least two samples");
  double sum = 0.0;
  for (size_t i = 0; i + 1 < xs.size(); ++i)
    sum += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
  return sum;
}

}  // namespace plgw
