#include <cmath>
#include <fstream>

#include "doctest.h"
#include "plgw/lawfit.hpp"
#include "plgw/numerics.hpp"

using namespace plgw;

TEST_CASE("embedded datasets are intact") {
  const auto& d2 = embedded_dataset("spic-2d");
  REQUIRE(d2.rows.size() == 20);
  CHECK(d2.rows.front().v_inlet == 0.0001);
  CHECK(d2.rows.front().e_grad == 0.11832);
  CHECK(d2.A_inlet == doctest::Approx(9.9987e-3));
  CHECK(d2.phi_eff == doctest::Approx(0.0347));
  const auto& d3 = embedded_dataset("spic-3d");
  REQUIRE(d3.rows.size() == 25);
  CHECK(d3.rows.back().v_inlet == 1.0);
  CHECK(d3.rows.back().e_grad == 9895.35284);
  CHECK(d3.A_inlet == doctest::Approx(0.006));
  CHECK(d3.phi_eff == doctest::Approx(0.04728));
  CHECK_THROWS_AS(embedded_dataset("nope"), std::invalid_argument);
}

TEST_CASE("dataset CSV parsing and validation") {
  const auto ds = parse_dataset_csv("v_inlet,e_grad\n0.1,2.0\n0.2,3.5\n0.3,6.0\n", "t");
  CHECK(ds.rows.size() == 3);
  CHECK_THROWS_WITH_AS(parse_dataset_csv("v_inlet,e_grad\n-0.1,2.0\n", "t"),
                       doctest::Contains("row 1"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_dataset_csv("v_inlet,e_grad\n0.2,2.0\n0.1,3.0\n", "t"),
                       doctest::Contains("row 2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dataset_csv("bad,header\n1,2\n", "t"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dataset_csv("v_inlet,e_grad\n0.1,abc\n", "t"), std::invalid_argument);
}

TEST_CASE("load_dataset falls back to CSV paths") {
  const std::string path = "/tmp/plgw_test_dataset.csv";
  {
    std::ofstream out(path);
    out << "v_inlet,e_grad\n0.5,1.0\n1.0,2.5\n2.0,7.0\n";
  }
  const auto ds = load_dataset(path);
  CHECK(ds.rows.size() == 3);
  CHECK_THROWS_AS(load_dataset("/tmp/definitely-not-here.csv"), std::invalid_argument);
}

TEST_CASE("darcy fit reproduces the reported coefficients") {
  const auto f2 = fit_darcy(embedded_dataset("spic-2d"));
  CHECK(f2.alpha == doctest::Approx(17232.004).epsilon(0.0005));
  const auto f3 = fit_darcy(embedded_dataset("spic-3d"));
  CHECK(f3.alpha == doctest::Approx(7932.011).epsilon(0.0005));
  SUBCASE("single row") {
    FlowDataset one;
    one.label = "one";
    one.rows = {{1.0, 5.0}};
    CHECK(fit_darcy(one).alpha == doctest::Approx(5.0));
  }
}

TEST_CASE("darcy alpha is the exact closed-form minimizer") {
  const auto ds = embedded_dataset("spic-2d");
  const auto fit = fit_darcy(ds);
  auto ssr = [&](double a) {
    double s = 0.0;
    for (const auto& r : ds.rows) s += sqr(a * r.v_inlet - r.e_grad);
    return s;
  };
  const double base = ssr(fit.alpha);
  CHECK(ssr(fit.alpha * (1.0 + 1e-6)) > base);
  CHECK(ssr(fit.alpha * (1.0 - 1e-6)) > base);
}

TEST_CASE("power fit reproduces the reported coefficients") {
  const auto f2 = fit_power(embedded_dataset("spic-2d"));
  CHECK(f2.beta == doctest::Approx(37969.871).epsilon(0.005));
  CHECK(f2.gamma == doctest::Approx(1.852982).epsilon(0.005));
  const auto f3 = fit_power(embedded_dataset("spic-3d"));
  CHECK(f3.beta == doctest::Approx(9899.873).epsilon(0.005));
  CHECK(f3.gamma == doctest::Approx(1.888399).epsilon(0.005));
  CHECK_FALSE(f2.trace.empty());
}

TEST_CASE("power fit recovers a synthetic law exactly") {
  FlowDataset ds;
  ds.label = "synthetic";
  for (double u : {0.1, 0.4, 0.9, 1.7, 2.2, 3.0}) ds.rows.push_back({u, 2.0 * std::pow(u, 1.5)});
  const auto fit = fit_power(ds);
  CHECK(fit.beta == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.gamma == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(fit.rmse == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  SUBCASE("needs three rows") {
    ds.rows.resize(2);
    CHECK_THROWS_AS(fit_power(ds), std::invalid_argument);
  }
}

TEST_CASE("power fit sits at a local minimum of the raw-scale objective") {
  const auto ds = embedded_dataset("spic-3d");
  const auto fit = fit_power(ds);
  auto ssr = [&](double b, double g) {
    double s = 0.0;
    for (const auto& r : ds.rows) s += sqr(b * std::pow(r.v_inlet, g) - r.e_grad);
    return s;
  };
  const double s0 = ssr(fit.beta, fit.gamma);
  const double hb = fit.beta * 1e-6, hg = fit.gamma * 1e-6;
  const double grad_b = (ssr(fit.beta + hb, fit.gamma) - ssr(fit.beta - hb, fit.gamma)) / (2 * hb);
  const double grad_g = (ssr(fit.beta, fit.gamma + hg) - ssr(fit.beta, fit.gamma - hg)) / (2 * hg);
  CHECK(std::abs(grad_b) * fit.beta < 1e-6 * s0 * 1e3);  // gradient scaled by parameter
  CHECK(std::abs(grad_g) * fit.gamma < 1e-6 * s0 * 1e3);
}

TEST_CASE("rmse conventions") {
  std::vector<double> zeros(5, 0.0);
  CHECK(rmse(zeros) == 0.0);
  CHECK_THROWS_AS(rmse(std::vector<double>{1.0}), std::invalid_argument);
  // the 2-d table reproduces under the n-1 convention, the 3-d one under n
  const auto d2_darcy = fit_darcy(embedded_dataset("spic-2d"));
  CHECK(d2_darcy.rmse == doctest::Approx(776.396).epsilon(0.01));
  const auto d2_power = fit_power(embedded_dataset("spic-2d"));
  CHECK(d2_power.rmse == doctest::Approx(17.1324).epsilon(0.02));
  const auto d3_darcy = fit_darcy(embedded_dataset("spic-3d"));
  CHECK(d3_darcy.rmse_n == doctest::Approx(748.39).epsilon(0.01));
  const auto d3_power = fit_power(embedded_dataset("spic-3d"));
  CHECK(d3_power.rmse_n == doctest::Approx(12.44).epsilon(0.02));
  CHECK(rmse(d2_darcy.residuals) == doctest::Approx(d2_darcy.rmse));
  CHECK(rmse_population(d2_darcy.residuals) == doctest::Approx(d2_darcy.rmse_n));
}

TEST_CASE("power beats darcy by a wide margin on both tables") {
  for (const char* id : {"spic-2d", "spic-3d"}) {
    const auto& ds = embedded_dataset(id);
    CHECK(fit_power(ds).rmse < fit_darcy(ds).rmse / 20.0);
  }
}

TEST_CASE("law evaluation round trip") {
  const auto fit = fit_power(embedded_dataset("spic-2d"));
  for (double u : {0.001, 0.05, 0.3}) {
    CHECK(law_invert(fit, law_eval(fit, u)) == doctest::Approx(u).epsilon(1e-10));
  }
  const auto darcy = fit_darcy(embedded_dataset("spic-2d"));
  CHECK(law_invert(darcy, law_eval(darcy, 0.2)) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("total energy and piezometric head") {
  CHECK(total_energy(0, 0, 0, 1000, 9.8066) == 0.0);
  CHECK(total_energy(1, 0, 0, 1000, 9.8066) == doctest::Approx(9806.6));
  // h_T = E_T / (rho g) = z + P/(rho g) + v^2/(2g)
  const double z = 1.3, P = 2200.0, v = 0.4, rho = 1000.0, g = 9.8066;
  CHECK(total_energy(z, P, v, rho, g) / (rho * g) ==
        doctest::Approx(z + P / (rho * g) + v * v / (2 * g)).epsilon(1e-13));
  CHECK(piezometric_head(2.0, 0.0, rho, g) == 2.0);
  CHECK(piezometric_head(0.0, 9806.6, 1000, 9.8066) == doctest::Approx(1.0));
  CHECK(piezometric_head(3.0, 500.0, rho, g) ==
        doctest::Approx(piezometric_head(0.0, 500.0, rho, g) + 3.0));
}

TEST_CASE("average total energy over interval unions") {
  EnergyProfile constant{{{0.0, 7.0}, {0.5, 7.0}, {1.0, 7.0}}};
  CHECK(average_total_energy(std::vector{constant}) == doctest::Approx(7.0));
  EnergyProfile linear{{{0.0, 0.0}, {1.0, 1.0}}};
  CHECK(average_total_energy(std::vector{linear}) == doctest::Approx(0.5));
  EnergyProfile a{{{0.0, 1.0}, {1.0, 1.0}}}, b{{{2.0, 3.0}, {3.0, 3.0}}};
  CHECK(average_total_energy(std::vector{a, b}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(average_total_energy(std::vector<EnergyProfile>{}), std::invalid_argument);
  EnergyProfile tooFew{{{0.0, 1.0}}};
  CHECK_THROWS_AS(average_total_energy(std::vector{tooFew}), std::invalid_argument);
}

TEST_CASE("derived aquifer laws reproduce the reported coefficients") {
  const double rho = 1000.0, g = 9.8066;
  const auto law2 = derive_aquifer_law(fit_power(embedded_dataset("spic-2d")), 9.9987e-3, rho, g);
  CHECK(law2.K == doctest::Approx(0.004815).epsilon(0.01));
  CHECK(law2.e == doctest::Approx(0.5397).epsilon(0.005));
  const auto law3 = derive_aquifer_law(fit_power(embedded_dataset("spic-3d")), 0.006, rho, g);
  CHECK(law3.K == doctest::Approx(0.00597).epsilon(0.01));
  CHECK(law3.e == doctest::Approx(0.529549).epsilon(0.005));
  SUBCASE("identity composition") {
    FlowDataset ds;
    ds.label = "identity";
    for (double u : {0.5, 1.0, 1.5, 2.0}) ds.rows.push_back({u, rho * g * u});
    const auto law = derive_aquifer_law(fit_power(ds), 1.0, rho, g);
    CHECK(law.K == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(law.e == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("darcy source gives e = 1") {
    const auto law = derive_aquifer_law(fit_darcy(embedded_dataset("spic-2d")), 1.0, rho, g);
    CHECK(law.e == 1.0);
    CHECK(law.K == doctest::Approx(rho * g / 17232.004).epsilon(1e-4));
  }
  SUBCASE("exponent identity e * gamma = 1") {
    const auto fit = fit_power(embedded_dataset("spic-2d"));
    CHECK(law2.e * fit.gamma == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("groundwater PDE coefficients follow the derived laws") {
  const double rho = 1000.0, g = 9.8066;
  const auto pde2 =
      build_groundwater_pde(derive_aquifer_law(fit_power(embedded_dataset("spic-2d")),
                                               9.9987e-3, rho, g),
                            0.0347);
  CHECK(pde2.phi_eff == doctest::Approx(0.0347));
  CHECK(pde2.K == doctest::Approx(0.004815).epsilon(0.01));
  CHECK(pde2.grad_exponent == doctest::Approx(-0.4603).epsilon(0.002));
  CHECK(pde2.p() == doctest::Approx(1.5397).epsilon(0.002));
  CHECK(pde2.p() < 2.0);  // the fitted aquifer sits in the singular regime
  const auto pde3 = build_groundwater_pde(
      derive_aquifer_law(fit_power(embedded_dataset("spic-3d")), 0.006, rho, g), 0.04728);
  CHECK(pde3.phi_eff == doctest::Approx(0.04728));
  CHECK(pde3.K == doctest::Approx(0.00597).epsilon(0.01));
  CHECK(pde3.grad_exponent == doctest::Approx(-0.4704).epsilon(0.002));
  SUBCASE("darcy law gives the porous-medium form") {
    const auto law = derive_aquifer_law(fit_darcy(embedded_dataset("spic-2d")), 1.0, rho, g);
    CHECK(build_groundwater_pde(law, 0.5).grad_exponent == 0.0);
  }
}
