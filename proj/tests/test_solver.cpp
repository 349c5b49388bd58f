#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "doctest.h"
#include "plgw/artifacts.hpp"
#include "plgw/barenblatt.hpp"
#include "plgw/numerics.hpp"
#include "plgw/solver.hpp"

using namespace plgw;

namespace {

ProblemSpec heat_problem(double T = 0.1) {
  ProblemSpec pb;
  pb.domain = Domain::interval(0.0, 1.0);
  pb.p = 2.0;
  pb.c = 1.0;
  pb.b = BFunction::identity();
  pb.u0 = [](double x, double) { return std::sin(M_PI * x); };
  pb.T = T;
  return pb;
}

double heat_exact(double x, double t) { return std::exp(-M_PI * M_PI * t) * std::sin(M_PI * x); }

double linf_vs(const GridField& f, const std::function<double(double, double)>& exact, double t) {
  double worst = 0.0;
  for (size_t i = 0; i < f.xs.size(); ++i)
    worst = std::max(worst, std::abs(f.values[i] - exact(f.xs[i], t)));
  return worst;
}

}  // namespace

TEST_CASE("heat benchmark: accuracy and spatial order") {
  auto error_at = [&](int nodes) {
    ProblemSpec pb = heat_problem();
    NumericsConfig cfg;
    const double h = 1.0 / (nodes - 1);
    cfg.dt = 0.4 * h * h;  // time error scales with the spatial one
    cfg.snapshot_every = 1 << 20;
    Trajectory traj = solve(pb, nodes, cfg);
    return linf_vs(traj.fields.back(), heat_exact, traj.times.back());
  };
  const double e64 = error_at(65), e128 = error_at(129), e256 = error_at(257);
  CHECK(e256 < 1e-3);
  const double order1 = std::log2(e64 / e128);
  const double order2 = std::log2(e128 / e256);
  CHECK(0.5 * (order1 + order2) >= 1.8);
}

TEST_CASE("zero data is an exact fixed point") {
  ProblemSpec pb;
  pb.domain = Domain::interval(-1.0, 1.0);
  pb.p = 3.0;
  pb.c = 1.0;
  pb.b = BFunction::power_root(1.0, 2.0);
  pb.T = 0.05;
  NumericsConfig cfg;
  cfg.dt = 1e-3;
  Trajectory traj = solve(pb, 64, cfg);
  for (const auto& f : traj.fields)
    for (double v : f.values) CHECK(v == 0.0);
}

TEST_CASE("nonnegative data keep the solution nonnegative") {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> amp(0.1, 1.5), fs(0.0, 0.5);
  const BFunction bs[] = {BFunction::identity(), BFunction::aquifer_head(0.3, 1.7, 1.0),
                          BFunction::power_root(1.0, 1.5)};
  const double ps[] = {1.7, 2.0, 2.8};
  for (int trial = 0; trial < 6; ++trial) {
    ProblemSpec pb;
    pb.domain = Domain::interval(0.0, 1.0);
    pb.p = ps[trial % 3];
    pb.c = 1.0;
    pb.b = bs[trial % 3];
    if (pb.b.kind() == BKind::aquifer_head) pb.p = 1.7;
    const double a = amp(rng), fconst = fs(rng);
    pb.u0 = [a](double x, double) { return a * std::sin(M_PI * x); };
    pb.f = [fconst](double, double, double) { return fconst; };
    pb.T = 0.02;
    NumericsConfig cfg;
    cfg.dt = 5e-4;
    Trajectory traj = solve(pb, 80, cfg);
    double scale = 1.0;
    for (const auto& f : traj.fields)
      for (double v : f.values) scale = std::max(scale, std::abs(v));
    for (const auto& f : traj.fields)
      for (double v : f.values) CHECK(v >= -1e-10 * scale);
  }
}

TEST_CASE("conservation: zero source, interior support") {
  SelfSimilarSolution sol(1, 1.0, 3.0, MassNormalization::explicit_c, 0.5);
  ShiftedSolution shifted(sol, Domain::interval(-1.0, 1.0), {0.0}, 0.01);
  ProblemSpec pb;
  pb.domain = Domain::interval(-1.0, 1.0);
  pb.p = 3.0;
  pb.c = 1.0;
  pb.b = BFunction::identity();
  pb.u0 = [&](double x, double) { return shifted.initial(std::vector<double>{x}); };
  pb.T = 0.02;
  shifted.ensure_valid_until(pb.T);
  NumericsConfig cfg;
  cfg.dt = 2e-4;
  Trajectory traj = solve(pb, 257, cfg);
  const double m0 = traj.steps.front().mass;
  for (const auto& s : traj.steps) CHECK(std::abs(s.mass - m0) / m0 < 0.005);
}

TEST_CASE("identical inputs give bit-identical trajectories") {
  ProblemSpec pb = heat_problem(0.02);
  pb.p = 2.5;
  pb.b = BFunction::aquifer_head(0.4, 2.5, 1.0);
  NumericsConfig cfg;
  cfg.dt = 5e-4;
  Trajectory a = solve(pb, 96, cfg);
  Trajectory b = solve(pb, 96, cfg);
  REQUIRE(a.fields.size() == b.fields.size());
  for (size_t s = 0; s < a.fields.size(); ++s)
    CHECK(std::memcmp(a.fields[s].values.data(), b.fields[s].values.data(),
                      a.fields[s].values.size() * sizeof(double)) == 0);
}

TEST_CASE("radial heat kernel in two dimensions") {
  // (N,k,p) = (2,1,2) gives w = C/t exp(-r^2/(4t)), the 2-d heat kernel
  SelfSimilarSolution sol(2, 1.0, 2.0, MassNormalization::explicit_c, 1.0);
  ProblemSpec pb;
  pb.domain = Domain::radial(2, 12.0);
  pb.p = 2.0;
  pb.c = 1.0;
  pb.b = BFunction::identity();
  pb.u0 = [&](double r, double) { return sol.value(r, 1.0); };
  pb.T = 0.5;
  NumericsConfig cfg;
  cfg.dt = 1e-3;
  cfg.snapshot_every = 1 << 20;
  Trajectory traj = solve(pb, 385, cfg);
  const auto& f = traj.fields.back();
  double worst = 0.0;
  for (size_t i = 0; i < f.xs.size(); ++i)
    worst = std::max(worst, std::abs(f.values[i] - sol.value(f.xs[i], 1.0 + pb.T)));
  CHECK(worst < 2e-3);  // relative to the unit peak at t=1
}

TEST_CASE("radial degenerate benchmark against the compactly supported solution") {
  // (N,k,p) = (2,1,3): front at t^{1/5} (C/kappa)^{2/3}, inside r_max = 4
  SelfSimilarSolution sol(2, 1.0, 3.0, MassNormalization::explicit_c, 0.5);
  ProblemSpec pb;
  pb.domain = Domain::radial(2, 4.0);
  pb.p = 3.0;
  pb.c = 1.0;
  pb.b = BFunction::identity();
  pb.u0 = [&](double r, double) { return sol.value(r, 1.0); };
  pb.T = 0.3;
  NumericsConfig cfg;
  cfg.dt = 1e-3;
  cfg.snapshot_every = 1 << 20;
  Trajectory traj = solve(pb, 385, cfg);
  const auto& f = traj.fields.back();
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i + 1 < f.xs.size(); ++i) {
    const double r = 0.5 * (f.xs[i] + f.xs[i + 1]);
    const double approx = 0.5 * (f.values[i] + f.values[i + 1]);
    const double exact = sol.value(r, 1.0 + pb.T);
    num += std::abs(approx - exact) * r;
    den += std::abs(exact) * r;
  }
  CHECK(num / den < 0.02);
}

TEST_CASE("steep time nonlinearity: gas-filtration benchmark in the conserved variable") {
  // b(u) = u^{1/2} (infinite slope at zero) with singular p = 3/2 in three
  // dimensions; the exact solution is positive everywhere with a Gaussian-like
  // tail, so the Dirichlet truncation at r_max is negligible
  SelfSimilarSolution sol(3, 2.0, 1.5, MassNormalization::explicit_c, 1.0);
  ProblemSpec pb;
  pb.domain = Domain::radial(3, 6.0);
  pb.p = 1.5;
  pb.c = 1.0;
  pb.b = BFunction::power_root(1.0, 2.0);
  pb.u0 = [&](double r, double) { return sol.value(r, 1.0); };
  pb.T = 0.05;
  NumericsConfig cfg;
  cfg.dt = 2.5e-4;
  cfg.snapshot_every = 1 << 20;
  Trajectory traj = solve(pb, 385, cfg);
  const auto& f = traj.fields.back();
  double worst = 0.0;
  for (size_t i = 0; i < f.xs.size(); ++i)
    worst = std::max(worst, std::abs(f.values[i] - sol.value(f.xs[i], 1.0 + pb.T)));
  CHECK(worst < 5e-3);  // relative to the unit-scale peak
  SUBCASE("compact bump with the same nonlinearity stays nonnegative and conservative") {
    pb.u0 = [](double r, double) {
      const double z = 1.0 - (r / 3.0) * (r / 3.0);
      return z > 0.0 ? 0.5 * z * z : 0.0;
    };
    Trajectory bump = solve(pb, 129, cfg);
    const double m0 = bump.steps.front().mass;
    for (const auto& s : bump.steps) CHECK(std::abs(s.mass - m0) / m0 < 0.005);
    for (const auto& fld : bump.fields)
      for (double v : fld.values) CHECK(v >= -1e-12);
  }
}

TEST_CASE("rectangle heat equation matches the product solution") {
  ProblemSpec pb;
  pb.domain = Domain::rectangle(0.0, 1.0, 0.0, 1.0);
  pb.p = 2.0;
  pb.c = 1.0;
  pb.b = BFunction::identity();
  pb.u0 = [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); };
  pb.T = 0.05;
  NumericsConfig cfg;
  cfg.dt = 2.5e-4;
  cfg.snapshot_every = 1 << 20;
  Trajectory traj = solve(pb, {65, 65}, cfg);
  const auto& f = traj.fields.back();
  double worst = 0.0;
  for (size_t j = 0; j < f.ny(); ++j)
    for (size_t i = 0; i < f.nx(); ++i) {
      const double exact = std::exp(-2.0 * M_PI * M_PI * pb.T) * std::sin(M_PI * f.xs[i]) *
                           std::sin(M_PI * f.ys[j]);
      worst = std::max(worst, std::abs(f.at(i, j) - exact));
    }
  CHECK(worst < 2e-3);
}

TEST_CASE("rectangle p-Laplacian: manufactured solution convergence") {
  // u = e^{-t} sin(pi x) sin(pi y), f from a high-order FD oracle
  const double p = 3.0;
  const BFunction b = BFunction::aquifer_head(0.5, p, 1.0);
  auto manufactured = [](double x, double y, double t) {
    return std::exp(-t) * std::sin(M_PI * x) * std::sin(M_PI * y);
  };
  auto source = [&](double x, double y, double t) {
    const double h = 1e-4;
    auto bu = [&](double tt) { return b(manufactured(x, y, tt)); };
    auto phix = [&](double xx) {
      const double gx = deriv_central4([&](double s) { return manufactured(s, y, t); }, xx, h);
      const double gy = deriv_central4([&](double s) { return manufactured(xx, s, t); }, y, h);
      return std::pow(gx * gx + gy * gy, 0.5 * (p - 2.0)) * gx;
    };
    auto phiy = [&](double yy) {
      const double gx = deriv_central4([&](double s) { return manufactured(s, yy, t); }, x, h);
      const double gy = deriv_central4([&](double s) { return manufactured(x, s, t); }, yy, h);
      return std::pow(gx * gx + gy * gy, 0.5 * (p - 2.0)) * gy;
    };
    return deriv_central4(bu, t, h) - deriv_central4(phix, x, h) - deriv_central4(phiy, y, h);
  };
  auto error_at = [&](int nodes) {
    ProblemSpec pb;
    pb.domain = Domain::rectangle(0.0, 1.0, 0.0, 1.0);
    pb.p = p;
    pb.c = 1.0;
    pb.b = b;
    pb.u0 = [&](double x, double y) { return manufactured(x, y, 0.0); };
    pb.f = source;
    pb.T = 0.05;
    NumericsConfig cfg;
    cfg.dt = pb.T / (nodes - 1);
    cfg.snapshot_every = 1 << 20;
    Trajectory traj = solve(pb, {nodes, nodes}, cfg);
    const auto& f = traj.fields.back();
    double worst = 0.0;
    for (size_t j = 0; j < f.ny(); ++j)
      for (size_t i = 0; i < f.nx(); ++i)
        worst = std::max(worst, std::abs(f.at(i, j) - manufactured(f.xs[i], f.ys[j], pb.T)));
    return worst;
  };
  const double e17 = error_at(17), e33 = error_at(33);
  CHECK(e33 < e17);
  CHECK(e33 < 5e-3);
}

TEST_CASE("residual_norms") {
  SUBCASE("the exact heat solution has a vanishing residual") {
    ProblemSpec pb = heat_problem();
    FdSamplePlan plan;
    plan.xs = {0.2, 0.4, 0.6, 0.8};
    plan.ts = {0.02, 0.05, 0.08};
    plan.h = 1e-4;
    auto cand = [](double x, double, double t) { return heat_exact(x, t); };
    CHECK(residual_norms(cand, pb, plan).max_abs < 1e-6);
  }
  SUBCASE("zero candidate with zero source") {
    ProblemSpec pb;
    pb.domain = Domain::interval(0.0, 1.0);
    pb.p = 2.5;
    pb.c = 1.0;
    pb.b = BFunction::identity();
    pb.T = 1.0;
    FdSamplePlan plan;
    plan.xs = {0.5};
    plan.ts = {0.5};
    auto zero = [](double, double, double) { return 0.0; };
    const auto norms = residual_norms(zero, pb, plan);
    CHECK(norms.max_abs == 0.0);
    CHECK(norms.l2 == 0.0);
  }
}

TEST_CASE("support measure") {
  GridField f;
  f.domain = Domain::interval(0.0, 1.0);
  const int n = 101;
  for (int i = 0; i < n; ++i) f.xs.push_back(i / 100.0);
  f.values.assign(n, 0.0);
  CHECK(support_measure(f, 0.0) == 0.0);
  f.values.assign(n, 2.0);
  CHECK(support_measure(f, 0.0) == doctest::Approx(1.0));
  SUBCASE("barenblatt field matches the front-ball measure within two cells") {
    SelfSimilarSolution sol(1, 1.0, 3.0, MassNormalization::explicit_c, 0.5);
    for (int i = 0; i < n; ++i) f.values[i] = sol.value(f.xs[i], 1.0);
    const double measured = support_measure(f, 0.0);
    const double analytic = std::min(1.0, sol.front_radius(1.0));
    CHECK(std::abs(measured - analytic) <= 2.0 / 100.0 + 1e-12);
  }
}

TEST_CASE("mass diagnostics") {
  GridField f;
  f.domain = Domain::interval(0.0, 1.0);
  const int n = 51;
  for (int i = 0; i < n; ++i) f.xs.push_back(i / 50.0);
  f.values.assign(n, 0.0);
  CHECK(mass(f, BFunction::identity()) == 0.0);
  f.values.assign(n, 1.0);
  CHECK(mass(f, BFunction::identity()) == doctest::Approx(1.0));
  CHECK(mass(f, BFunction::power_root(2.0, 2.0)) == doctest::Approx(2.0));
}

TEST_CASE("regularization refinement: the eps error is controlled") {
  SelfSimilarSolution sol(1, 1.0, 3.0, MassNormalization::explicit_c, 0.5);
  ShiftedSolution shifted(sol, Domain::interval(-1.0, 1.0), {0.0}, 0.01);
  auto run_with_eps = [&](double eps) {
    ProblemSpec pb;
    pb.domain = Domain::interval(-1.0, 1.0);
    pb.p = 3.0;
    pb.c = 1.0;
    pb.b = BFunction::identity();
    pb.u0 = [&](double x, double) { return shifted.initial(std::vector<double>{x}); };
    pb.T = 0.01;
    NumericsConfig cfg;
    cfg.dt = 2e-4;
    cfg.eps_reg_abs = eps;
    cfg.snapshot_every = 1 << 20;
    return solve(pb, 129, cfg).fields.back().values;
  };
  const auto coarse = run_with_eps(1e-4);
  const auto mid = run_with_eps(1e-6);
  const auto fine = run_with_eps(1e-8);
  double d1 = 0.0, d2 = 0.0;
  for (size_t i = 0; i < fine.size(); ++i) {
    d1 = std::max(d1, std::abs(coarse[i] - fine[i]));
    d2 = std::max(d2, std::abs(mid[i] - fine[i]));
  }
  CHECK(d2 < d1);
  CHECK(d2 < 1e-6);
}

TEST_CASE("nonlinear failure reports the step and residual history") {
  ProblemSpec pb;
  pb.domain = Domain::interval(0.0, 1.0);
  pb.p = 4.0;
  pb.c = 1.0;
  pb.b = BFunction::power_root(1.0, 3.0);
  pb.u0 = [](double x, double) { return std::sin(M_PI * x); };
  pb.T = 0.1;
  NumericsConfig cfg;
  cfg.dt = 0.05;
  cfg.max_iters = 1;  // starve the iteration
  cfg.tol_nonlinear = 1e-14;
  try {
    solve(pb, 64, cfg);
    FAIL("expected SolveFailure");
  } catch (const SolveFailure& e) {
    CHECK(e.step_index == 0);
    CHECK_FALSE(e.residual_history.empty());
  }
}

TEST_CASE("adaptive stepping recovers by halving dt") {
  ProblemSpec pb;
  pb.domain = Domain::interval(0.0, 1.0);
  pb.p = 4.0;
  pb.c = 1.0;
  pb.b = BFunction::power_root(1.0, 3.0);
  pb.u0 = [](double x, double) { return std::sin(M_PI * x); };
  pb.T = 0.02;
  NumericsConfig cfg;
  cfg.dt = 0.02;  // too coarse to converge in few iterations
  cfg.adaptive = true;
  cfg.dt_min = 1e-6;
  cfg.dt_max = 0.02;
  cfg.max_iters = 3;
  cfg.tol_nonlinear = 1e-12;
  Trajectory traj = solve(pb, 64, cfg);
  CHECK(traj.times.back() == doctest::Approx(pb.T).epsilon(1e-12));
  bool halved = false;
  for (const auto& s : traj.steps) halved = halved || s.dt < 0.02 * 0.99;
  CHECK(halved);
}

TEST_CASE("trajectory starts from u0 and stamps cover [0, T]") {
  ProblemSpec pb = heat_problem(0.01);
  NumericsConfig cfg;
  cfg.dt = 1e-3;
  cfg.snapshot_every = 3;
  Trajectory traj = solve(pb, 64, cfg);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(0.01).epsilon(1e-12));
  const GridField init = sample_initial(pb, 64);
  for (size_t i = 0; i < init.values.size(); ++i)
    CHECK(traj.fields.front().values[i] == init.values[i]);
  for (size_t s = 1; s < traj.times.size(); ++s) CHECK(traj.times[s] > traj.times[s - 1]);
  SUBCASE("Dirichlet rows are exact and step residuals sit below tolerance") {
    for (const auto& f : traj.fields) {
      CHECK(f.values.front() == 0.0);
      CHECK(f.values.back() == 0.0);
    }
    for (const auto& s : traj.steps) {
      CHECK(s.residual_norm <= cfg.tol_nonlinear);
      CHECK(s.nonlinear_iterations >= 1);
    }
  }
}

TEST_CASE("gridded csv source feeds the solver") {
  const std::string path = "/tmp/plgw_test_source.csv";
  {
    std::ofstream out(path);
    out << "x,value\n0.0,0.3\n0.5,0.3\n1.0,0.3\n";
  }
  GriddedField g = GriddedField::from_csv(path);
  CHECK(g(0.25, 0.0) == doctest::Approx(0.3));
  ProblemSpec pb;
  pb.domain = Domain::interval(0.0, 1.0);
  pb.p = 2.0;
  pb.c = 1.0;
  pb.b = BFunction::identity();
  pb.f = [g](double x, double y, double) { return g(x, y); };
  pb.T = 0.01;
  NumericsConfig cfg;
  cfg.dt = 1e-3;
  Trajectory traj = solve(pb, 64, cfg);
  // steady heating from a constant source keeps the field positive inside
  const auto& f = traj.fields.back();
  for (size_t i = 1; i + 1 < f.xs.size(); ++i) CHECK(f.values[i] > 0.0);
}
