#include <cmath>
#include <random>

#include "doctest.h"
#include "plgw/barenblatt.hpp"
#include "plgw/numerics.hpp"

using namespace plgw;

namespace {

// sample parameter sets per regime, all with a positive similarity exponent
struct Params {
  int N;
  double k, p;
};
const Params kCompact[] = {{1, 1.0, 3.0}, {2, 2.0, 1.8}, {3, 1.5, 2.5}};
const Params kExponential[] = {{1, 1.0, 2.0}, {2, 2.0, 1.5}, {3, 4.0, 1.25}};
const Params kFatTail[] = {{1, 0.5, 2.2}, {2, 0.4, 2.5}, {1, 0.8, 2.0}};

}  // namespace

TEST_CASE("similarity exponents") {
  auto heat = similarity_exponents(1, 1.0, 2.0);
  CHECK(heat.lambda == doctest::Approx(0.5));
  CHECK(heat.mu == doctest::Approx(0.5));
  // k(p-1) = 1 forces 1/lambda = p
  auto caseii = similarity_exponents(2, 2.0, 1.5);
  CHECK(1.0 / caseii.lambda == doctest::Approx(1.5).epsilon(1e-13));
  auto six = similarity_exponents(1, 2.0, 3.0);
  CHECK(six.lambda == doctest::Approx(1.0 / 6.0));
  CHECK(six.mu == doctest::Approx(2.0 / 6.0));
  SUBCASE("mu = N k lambda for valid triples") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uk(0.3, 4.0), up(1.1, 3.5);
    for (int i = 0; i < 100; ++i) {
      const int N = 1 + static_cast<int>(rng() % 3);
      const double k = uk(rng), p = up(rng);
      if ((N * k + 1.0) * (p - 1.0) + 1.0 - N <= 0.0) {
        CHECK_THROWS_AS(similarity_exponents(N, k, p), std::invalid_argument);
        continue;
      }
      auto e = similarity_exponents(N, k, p);
      CHECK(e.lambda > 0.0);
      CHECK(e.mu == doctest::Approx(N * k * e.lambda).epsilon(1e-13));
    }
  }
  CHECK_THROWS_WITH_AS(similarity_exponents(3, 0.1, 1.05),
                       doctest::Contains("no positive similarity exponent"),
                       std::invalid_argument);
}

TEST_CASE("profile parameters per regime") {
  SUBCASE("heat kernel: exponential with coefficient 1/4") {
    auto pp = profile_params(1, 1.0, 2.0);
    CHECK(pp.regime == Regime::exponential);
    CHECK(pp.kappa == doctest::Approx(0.25));
  }
  SUBCASE("compact (1,1,3)") {
    auto pp = profile_params(1, 1.0, 3.0);
    CHECK(pp.regime == Regime::compact);
    CHECK(pp.gamma_exp == doctest::Approx(2.0));
    CHECK(pp.kappa == doctest::Approx(1.0 / 6.0));
  }
  SUBCASE("fat tail has a negative outer exponent") {
    for (const auto& q : kFatTail) {
      auto pp = profile_params(q.N, q.k, q.p);
      CHECK(pp.regime == Regime::fat_tail);
      CHECK(pp.gamma_exp < 0.0);
      CHECK(pp.kappa > 0.0);
    }
  }
  SUBCASE("compact support endpoint") {
    SelfSimilarSolution sol(2, 2.0, 1.8, MassNormalization::explicit_c, 0.7);
    const double s_end = sol.profile_support_end();
    CHECK(sol.profile(s_end * 0.999) > 0.0);
    CHECK(sol.profile(s_end) == 0.0);
    CHECK(sol.profile(s_end * 1.5) == 0.0);
  }
}

TEST_CASE("profile first integral |B'|^{p-2} B' + lambda s B^{1/k} = 0") {
  std::mt19937 rng(17);
  auto check_params = [&](const Params& q) {
    SelfSimilarSolution sol(q.N, q.k, q.p, MassNormalization::explicit_c, 0.9);
    const double s_max =
        sol.regime() == Regime::compact ? sol.profile_support_end() * 0.999 : 3.0;
    std::uniform_real_distribution<double> us(1e-3, s_max);
    for (int i = 0; i < 100; ++i) {
      const double s = us(rng);
      const double Bp = sol.profile_derivative(s);
      const double B = sol.profile(s);
      const double lhs = std::pow(std::abs(Bp), q.p - 2.0) * Bp +
                         sol.lambda() * s * std::pow(B, 1.0 / q.k);
      CHECK(std::abs(lhs) < 1e-9);
    }
  };
  for (const auto& q : kCompact) check_params(q);
  for (const auto& q : kExponential) check_params(q);
  for (const auto& q : kFatTail) check_params(q);
}

TEST_CASE("mass normalization") {
  SUBCASE("conserved-mass mode for the heat kernel: C = 1/sqrt(pi)") {
    SelfSimilarSolution sol(1, 1.0, 2.0, MassNormalization::conserved_mass);
    CHECK(sol.C() == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-8));
  }
  SUBCASE("solution-mass mode for (1,1,3): closed-form C") {
    // B = (C - s^{3/2}/6)^2, mass = C^{8/3} 6^{2/3} (9/20) = 1
    const double expected = std::pow(1.0 / 6.0, 0.25) * std::pow(20.0 / 9.0, 3.0 / 8.0);
    SelfSimilarSolution sol(1, 1.0, 3.0, MassNormalization::solution_mass);
    CHECK(sol.C() == doctest::Approx(expected).epsilon(1e-8));
  }
  SUBCASE("doubling C strictly increases the compact-regime mass") {
    const double m1 = profile_mass(1, 1.0, 3.0, 0.5, MassNormalization::solution_mass);
    const double m2 = profile_mass(1, 1.0, 3.0, 1.0, MassNormalization::solution_mass);
    CHECK(m2 > m1);
  }
  SUBCASE("mass at the returned C is 1 within 1e-8, all regimes") {
    for (auto mode : {MassNormalization::solution_mass, MassNormalization::conserved_mass}) {
      for (const auto& q : {kCompact[0], kCompact[1], kExponential[0], kExponential[2]}) {
        SelfSimilarSolution sol(q.N, q.k, q.p, mode);
        CHECK(sol.mass(mode) == doctest::Approx(1.0).epsilon(1e-8));
      }
      // fat tail: mass decreases in C; convergence needs q |gamma| w > N
      SelfSimilarSolution ft(1, 0.5, 2.2, mode);
      CHECK(ft.mass(mode) == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
  SUBCASE("divergent fat tail is rejected") {
    // (1, 0.25, 2.0): gamma_exp = -1/3, tail decay q|gamma| = 2/3 < N = 1
    CHECK_THROWS_WITH_AS(profile_mass(1, 0.25, 2.0, 1.0, MassNormalization::solution_mass),
                         doctest::Contains("diverges"), std::runtime_error);
  }
}

TEST_CASE("eval_solution") {
  SelfSimilarSolution sol(1, 1.0, 3.0, MassNormalization::explicit_c, 0.5);
  SUBCASE("zero beyond the front") {
    const double t = 2.0;
    CHECK(sol.value(sol.front_radius(t) * 1.01, t) == 0.0);
    CHECK(sol.value(sol.front_radius(t) * 0.99, t) > 0.0);
  }
  SUBCASE("value at the origin") {
    const double t = 1.7;
    CHECK(sol.value(0.0, t) ==
          doctest::Approx(std::pow(t, -sol.mu()) * std::pow(sol.C(), sol.gamma_exp())));
    SelfSimilarSolution expo(1, 1.0, 2.0, MassNormalization::explicit_c, 0.8);
    CHECK(expo.value(0.0, t) == doctest::Approx(std::pow(t, -expo.mu()) * 0.8));
  }
  SUBCASE("self-scaling identity") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> uc(0.1, 5.0), ur(0.0, 2.0), ut(0.5, 3.0);
    for (int i = 0; i < 100; ++i) {
      const double c = uc(rng), r = ur(rng), t = ut(rng);
      const double lhs = sol.value(std::pow(c, sol.lambda()) * r, c * t);
      const double rhs = std::pow(c, -sol.mu()) * sol.value(r, t);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(sol.value(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(sol.value(1.0, -2.0), std::domain_error);
}

TEST_CASE("front radius") {
  SelfSimilarSolution sol(1, 1.0, 3.0, MassNormalization::explicit_c, 1.0);
  // kappa = 1/6, so the front at t=1 sits at 6^{(p-1)/p} = 6^{2/3}
  CHECK(sol.front_radius(1.0) == doctest::Approx(std::pow(6.0, 2.0 / 3.0)).epsilon(1e-13));
  CHECK(sol.front_radius(2.0) / sol.front_radius(1.0) ==
        doctest::Approx(std::pow(2.0, sol.lambda())).epsilon(1e-13));
  CHECK(sol.front_radius(1.0) ==
        doctest::Approx(std::pow(sol.C() / sol.kappa(), (sol.p() - 1.0) / sol.p())));
  SelfSimilarSolution expo(1, 1.0, 2.0, MassNormalization::solution_mass);
  CHECK_THROWS_WITH_AS(expo.front_radius(1.0), doctest::Contains("no finite front"),
                       std::runtime_error);
}

TEST_CASE("pde residual vanishes on closed-form solutions") {
  SUBCASE("heat case below 1e-6 at h = 1e-3") {
    SelfSimilarSolution sol(1, 1.0, 2.0, MassNormalization::solution_mass);
    std::vector<double> rs{0.3, 0.6, 1.0, 1.5}, ts{0.8, 1.0, 1.3};
    CHECK(pde_residual(sol, rs, ts, 1e-3) < 1e-6);
  }
  SUBCASE("compact case: Richardson slope at least 1.5") {
    SelfSimilarSolution sol(1, 1.0, 3.0, MassNormalization::solution_mass);
    std::vector<double> rs{0.3, 0.8, 1.4}, ts{1.0, 1.5};
    const double r1 = pde_residual(sol, rs, ts, 2e-3);
    const double r2 = pde_residual(sol, rs, ts, 1e-3);
    CHECK(std::log2(r1 / r2) >= 1.5);
  }
  SUBCASE("random regime samples decrease monotonically over refinements") {
    std::mt19937 rng(41);
    const Params pool[] = {kCompact[1], kExponential[1], kFatTail[0]};
    for (const auto& q : pool) {
      SelfSimilarSolution sol(q.N, q.k, q.p, MassNormalization::explicit_c, 0.8);
      const double s_ref = sol.regime() == Regime::compact ? sol.profile_support_end() : 2.0;
      std::uniform_real_distribution<double> ur(0.2 * s_ref, 0.7 * s_ref);
      std::vector<double> rs{ur(rng), ur(rng)}, ts{1.0, 1.4};
      double prev = std::numeric_limits<double>::infinity();
      for (double h : {4e-3, 2e-3, 1e-3}) {
        const double r = pde_residual(sol, rs, ts, h);
        CHECK(r < prev);
        prev = r;
      }
    }
  }
  SUBCASE("front standoff is enforced") {
    SelfSimilarSolution sol(1, 1.0, 3.0, MassNormalization::solution_mass);
    const double h = 1e-3;
    std::vector<double> rs{sol.front_radius(1.0)}, ts{1.0};
    CHECK_THROWS_AS(pde_residual(sol, rs, ts, h), std::invalid_argument);
    std::vector<double> rs2{h / 2.0};
    CHECK_THROWS_AS(pde_residual(sol, rs2, ts, h), std::invalid_argument);
  }
}

TEST_CASE("shifted solution") {
  SelfSimilarSolution sol(1, 1.0, 3.0, MassNormalization::explicit_c, 0.5);
  const Domain domain = Domain::interval(-1.0, 1.0);
  const double sigma = 0.01;
  ShiftedSolution shifted(sol, domain, {0.0}, sigma);

  SUBCASE("initial data positive exactly on the front ball") {
    const double r0 = shifted.support_radius(0.0);
    for (double x = -0.99; x < 1.0; x += 0.03) {
      const double u0 = shifted.initial(std::vector<double>{x});
      if (std::abs(x) < r0 * 0.999)
        CHECK(u0 > 0.0);
      else if (std::abs(x) > r0 * 1.001)
        CHECK(u0 == 0.0);
    }
  }
  SUBCASE("zero outside the moving front") {
    const double t = 0.5 * shifted.horizon();
    const double rt = shifted.support_radius(t);
    CHECK(shifted.value(std::vector<double>{rt * 1.01}, t) == 0.0);
    CHECK(shifted.value(std::vector<double>{-rt * 1.01}, t) == 0.0);
    CHECK(shifted.value(std::vector<double>{rt * 0.98}, t) > 0.0);
  }
  SUBCASE("mass of b(u) = u is constant in time (quadrature oracle)") {
    auto mass_at = [&](double t) {
      return adaptive_simpson(
          [&](double x) { return shifted.value(std::vector<double>{x}, t); }, -1.0, 1.0, 1e-10);
    };
    const double m0 = mass_at(0.0);
    const double m1 = mass_at(0.5 * shifted.horizon());
    CHECK(std::abs(m1 - m0) < 1e-6);
  }
  SUBCASE("horizon errors carry the admissible value") {
    CHECK_THROWS_WITH_AS(shifted.ensure_valid_until(10.0 * shifted.horizon()),
                         doctest::Contains("maximal admissible horizon"), std::runtime_error);
    CHECK_NOTHROW(shifted.ensure_valid_until(0.9 * shifted.horizon()));
  }
  SUBCASE("construction guards") {
    CHECK_THROWS_AS(ShiftedSolution(SelfSimilarSolution(1, 1.0, 2.0, MassNormalization::solution_mass),
                                    domain, {0.0}, 0.01),
                    std::invalid_argument);  // not compact
    CHECK_THROWS_AS(ShiftedSolution(sol, domain, {0.0}, 1e6), std::invalid_argument);  // sigma
  }
}
