#include <cmath>
#include <random>

#include "doctest.h"
#include "plgw/numerics.hpp"

using namespace plgw;

TEST_CASE("tridiagonal solve reproduces a known solution") {
  // A x = r with A = tridiag(-1, 2, -1), x = (1, 2, 3)
  std::vector<double> lower{0, -1, -1}, diag{2, 2, 2}, upper{-1, -1, 0};
  std::vector<double> x_true{1, 2, 3};
  std::vector<double> rhs{2 * 1 - 2, -1 + 4 - 3, -2 + 6};
  auto x = tridiagonal_solve(lower, diag, upper, rhs);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-14));
}

TEST_CASE("conjugate gradient matches the direct solve") {
  const int n = 40;
  std::vector<double> lower(n, -1.0), diag(n, 3.0), upper(n, -1.0);
  lower[0] = upper[n - 1] = 0.0;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> rhs(n);
  for (auto& v : rhs) v = uni(rng);
  auto direct = tridiagonal_solve(lower, diag, upper, rhs);
  auto apply = [&](std::span<const double> v, std::span<double> out) {
    for (int i = 0; i < n; ++i) {
      out[i] = 3.0 * v[i];
      if (i > 0) out[i] -= v[i - 1];
      if (i + 1 < n) out[i] -= v[i + 1];
    }
  };
  std::vector<double> x(n, 0.0);
  auto res = conjugate_gradient(apply, diag, rhs, x, 1e-14, 1000);
  CHECK(res.converged);
  for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(direct[i]).epsilon(1e-10));
}

TEST_CASE("adaptive Simpson integrates to the requested tolerance") {
  auto one = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
  CHECK(one == doctest::Approx(2.0).epsilon(1e-11));
  auto gauss = adaptive_simpson([](double x) { return std::exp(-x * x / 4.0); }, 0.0, 40.0, 1e-12);
  CHECK(gauss == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
}

TEST_CASE("bisect_root finds the bracketed root") {
  auto r = bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14, 200);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(bisect_root([](double x) { return x * x + 1.0; }, 0.0, 1.0, 1e-12, 50),
                  std::invalid_argument);
}

TEST_CASE("linear fit recovers slope and intercept") {
  std::vector<double> xs{0, 1, 2, 3, 4}, ys;
  for (double x : xs) ys.push_back(3.5 - 2.0 * x);
  auto fit = linear_fit(xs, ys);
  CHECK(fit.intercept == doctest::Approx(3.5).epsilon(1e-13));
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-13));
}

TEST_CASE("finite difference helpers hit their orders") {
  auto f = [](double x) { return std::sin(x); };
  const double x = 0.7, exact = std::cos(0.7);
  const double e2 = std::abs(deriv_central(f, x, 1e-3) - exact);
  const double e2h = std::abs(deriv_central(f, x, 5e-4) - exact);
  CHECK(e2 / e2h > 3.0);  // second order
  CHECK(std::abs(deriv_central4(f, x, 1e-2) - exact) < 1e-9);
  CHECK(std::abs(deriv_onesided4(f, x, 1e-3, +1) - exact) < 1e-9);
  CHECK(std::abs(deriv_onesided4(f, x, 1e-3, -1) - exact) < 1e-9);
}
