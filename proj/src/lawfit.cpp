#include "plgw/lawfit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "plgw/numerics.hpp"

namespace plgw {

void FlowDataset::validate() const {
  if (rows.empty()) throw std::invalid_argument("FlowDataset: empty dataset");
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].v_inlet > 0.0)) {
      std::ostringstream os;
      os << "FlowDataset: nonpositive v_inlet at row " << i + 1;
      throw std::invalid_argument(os.str());
    }
    if (!(rows[i].e_grad > 0.0)) {
      std::ostringstream os;
      os << "FlowDataset: nonpositive e_grad at row " << i + 1;
      throw std::invalid_argument(os.str());
    }
    if (i > 0 && !(rows[i].v_inlet > rows[i - 1].v_inlet)) {
      std::ostringstream os;
      os << "FlowDataset: v_inlet not strictly increasing at row " << i + 1;
      throw std::invalid_argument(os.str());
    }
  }
}

nlohmann::json FitResult::to_json() const {
  nlohmann::json j{{"law", kind == LawKind::darcy ? "darcy" : "power"},
                   {"rmse", rmse},
                   {"rmse_n", rmse_n},
                   {"n", n},
                   {"residuals", residuals},
                   {"dataset", dataset_label}};
  if (kind == LawKind::darcy) {
    j["alpha"] = alpha;
  } else {
    j["beta"] = beta;
    j["gamma"] = gamma;
    nlohmann::json tr = nlohmann::json::array();
    for (const auto& t : trace)
      tr.push_back({{"iteration", t.iteration},
                    {"beta", t.beta},
                    {"gamma", t.gamma},
                    {"ssr", t.ssr},
                    {"step_scale", t.step_scale}});
    j["trace"] = tr;
  }
  return j;
}

namespace {

void finalize_rmse(FitResult& fit) {
  double ssr = 0.0;
  for (double r : fit.residuals) ssr += r * r;
  fit.rmse = fit.n >= 2 ? std::sqrt(ssr / (fit.n - 1)) : 0.0;
  fit.rmse_n = fit.n >= 1 ? std::sqrt(ssr / fit.n) : 0.0;
}

}  // namespace

FitResult fit_darcy(const FlowDataset& ds) {
  ds.validate();
  double suy = 0.0, suu = 0.0;
  for (const auto& r : ds.rows) {
    suy += r.v_inlet * r.e_grad;
    suu += r.v_inlet * r.v_inlet;
  }
  if (suu == 0.0) throw std::runtime_error("fit_darcy: degenerate dataset");
  FitResult fit;
  fit.kind = LawKind::darcy;
  fit.alpha = suy / suu;
  fit.n = static_cast<int>(ds.rows.size());
  fit.dataset_label = ds.label;
  fit.residuals.reserve(ds.rows.size());
  for (const auto& r : ds.rows) fit.residuals.push_back(fit.alpha * r.v_inlet - r.e_grad);
  finalize_rmse(fit);
  return fit;
}

FitResult fit_power(const FlowDataset& ds) {
  ds.validate();
  if (ds.rows.size() < 3) throw std::invalid_argument("fit_power: need at least 3 rows");
  const size_t n = ds.rows.size();
  std::vector<double> lu(n), ly(n);
  for (size_t i = 0; i < n; ++i) {
    lu[i] = std::log(ds.rows[i].v_inlet);
    ly[i] = std::log(ds.rows[i].e_grad);
  }
  const LinearFit init = linear_fit(lu, ly);
  double beta = std::exp(init.intercept);
  double gamma = init.slope;

  auto ssr_at = [&](double b, double g) {
    double s = 0.0;
    for (const auto& r : ds.rows) s += sqr(b * std::pow(r.v_inlet, g) - r.e_grad);
    return s;
  };

  FitResult fit;
  fit.kind = LawKind::power;
  fit.n = static_cast<int>(n);
  fit.dataset_label = ds.label;

  double ssr = ssr_at(beta, gamma);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    // Gauss-Newton normal equations for r_i = beta u^gamma - y
    double j11 = 0.0, j12 = 0.0, j22 = 0.0, g1 = 0.0, g2 = 0.0;
    for (const auto& row : ds.rows) {
      const double m = std::pow(row.v_inlet, gamma);
      const double r = beta * m - row.e_grad;
      const double d_beta = m;
      const double d_gamma = beta * m * std::log(row.v_inlet);
      j11 += d_beta * d_beta;
      j12 += d_beta * d_gamma;
      j22 += d_gamma * d_gamma;
      g1 += d_beta * r;
      g2 += d_gamma * r;
    }
    const double det = j11 * j22 - j12 * j12;
    if (det == 0.0) throw std::runtime_error("fit_power: singular normal equations");
    double db = -(j22 * g1 - j12 * g2) / det;
    double dg = -(-j12 * g1 + j11 * g2) / det;

    double step = 1.0;
    double beta_new = beta, gamma_new = gamma, ssr_new = ssr;
    for (int halving = 0; halving <= 30; ++halving) {
      beta_new = beta + step * db;
      gamma_new = gamma + step * dg;
      if (beta_new > 0.0 && gamma_new > 0.0) {
        ssr_new = ssr_at(beta_new, gamma_new);
        if (ssr_new <= ssr) break;
      }
      step *= 0.5;
    }
    fit.trace.push_back({it, beta_new, gamma_new, ssr_new, step});
    const double rel_change = std::max(std::abs(beta_new - beta) / std::max(std::abs(beta), 1e-300),
                                       std::abs(gamma_new - gamma) / std::max(std::abs(gamma), 1e-300));
    beta = beta_new;
    gamma = gamma_new;
    ssr = ssr_new;
    if (rel_change < 1e-10) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "fit_power: no convergence in 200 iterations (dataset " << ds.label << "); last ssr "
       << ssr;
    throw std::runtime_error(os.str());
  }
  fit.beta = beta;
  fit.gamma = gamma;
  fit.residuals.reserve(n);
  for (const auto& r : ds.rows) fit.residuals.push_back(beta * std::pow(r.v_inlet, gamma) - r.e_grad);
  finalize_rmse(fit);
  return fit;
}

double law_eval(const FitResult& fit, double u) {
  return fit.kind == LawKind::darcy ? fit.alpha * u : fit.beta * std::pow(u, fit.gamma);
}

double law_invert(const FitResult& fit, double y) {
  return fit.kind == LawKind::darcy ? y / fit.alpha : std::pow(y / fit.beta, 1.0 / fit.gamma);
}

double rmse(std::span<const double> residuals) {
  if (residuals.size() < 2) throw std::invalid_argument("rmse: need at least two residuals");
  double s = 0.0;
  for (double r : residuals) s += r * r;
  return std::sqrt(s / static_cast<double>(residuals.size() - 1));
}

double rmse_population(std::span<const double> residuals) {
  if (residuals.empty()) throw std::invalid_argument("rmse_population: empty residuals");
  double s = 0.0;
  for (double r : residuals) s += r * r;
  return std::sqrt(s / static_cast<double>(residuals.size()));
}

double total_energy(double z, double P, double v, double rho, double g) {
  if (!(rho > 0.0) || !(g > 0.0))
    throw std::invalid_argument("total_energy: rho and g must be positive");
  return z * rho * g + P + 0.5 * rho * v * v;
}

double piezometric_head(double z, double P, double rho, double g) {
  if (!(rho > 0.0) || !(g > 0.0))
    throw std::invalid_argument("piezometric_head: rho and g must be positive");
  return z + P / (rho * g);
}

double average_total_energy(std::span<const EnergyProfile> intervals) {
  if (intervals.empty()) throw std::invalid_argument("average_total_energy: no intervals");
  double num = 0.0, den = 0.0;
  for (const auto& iv : intervals) {
    if (iv.samples.size() < 2)
      throw std::invalid_argument("average_total_energy: each interval needs >= 2 samples");
    for (size_t i = 0; i + 1 < iv.samples.size(); ++i) {
      const double dz = iv.samples[i + 1].first - iv.samples[i].first;
      if (!(dz > 0.0))
        throw std::invalid_argument("average_total_energy: coordinates must increase");
      num += 0.5 * (iv.samples[i].second + iv.samples[i + 1].second) * dz;
      den += dz;
    }
  }
  if (den == 0.0) throw std::invalid_argument("average_total_energy: empty interval union");
  return num / den;
}

nlohmann::json AquiferLaw::to_json() const {
  return nlohmann::json{{"K", K},       {"e", e},           {"rho", rho},
                        {"g", g},       {"A_inlet", A_inlet}, {"fit", fit_label}};
}

AquiferLaw derive_aquifer_law(const FitResult& fit, double A_inlet, double rho, double g) {
  if (!(A_inlet > 0.0) || !(rho > 0.0) || !(g > 0.0))
    throw std::invalid_argument("derive_aquifer_law: A_inlet, rho, g must be positive");
  AquiferLaw law;
  law.rho = rho;
  law.g = g;
  law.A_inlet = A_inlet;
  law.fit_label = fit.dataset_label;
  if (fit.kind == LawKind::power) {
    // q = A f^{-1}(rho g dh/dL) = A (rho g / beta)^{1/gamma} (dh/dL)^{1/gamma}
    law.e = 1.0 / fit.gamma;
    law.K = A_inlet * std::pow(rho * g / fit.beta, 1.0 / fit.gamma);
  } else {
    law.e = 1.0;
    law.K = A_inlet * rho * g / fit.alpha;
  }
  return law;
}

nlohmann::json GroundwaterPde::to_json() const {
  return nlohmann::json{
      {"phi_eff", phi_eff}, {"K", K}, {"grad_exponent", grad_exponent}, {"p", p()}};
}

GroundwaterPde build_groundwater_pde(const AquiferLaw& law, double phi_eff) {
  if (!(law.K > 0.0) || !(law.e > 0.0)) throw std::invalid_argument("build_groundwater_pde: bad law");
  if (!(phi_eff > 0.0) || !(phi_eff < 1.0))
    throw std::invalid_argument("build_groundwater_pde: phi_eff must lie in (0,1)");
  GroundwaterPde pde;
  pde.phi_eff = phi_eff;
  pde.K = law.K;
  pde.grad_exponent = law.e - 1.0;
  return pde;
}

FlowDataset parse_dataset_csv(const std::string& text, const std::string& label) {
  FlowDataset ds;
  ds.label = label;
  ds.source_id = label;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      std::string h = line;
      h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return std::isspace(c); }), h.end());
      if (h != "v_inlet,e_grad") {
        std::ostringstream os;
        os << "dataset CSV: expected header 'v_inlet,e_grad' at line " << lineno;
        throw std::invalid_argument(os.str());
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b)) {
      std::ostringstream os;
      os << "dataset CSV: malformed row at line " << lineno;
      throw std::invalid_argument(os.str());
    }
    try {
      ds.rows.push_back({std::stod(a), std::stod(b)});
    } catch (const std::exception&) {
      std::ostringstream os;
      os << "dataset CSV: non-numeric value at line " << lineno;
      throw std::invalid_argument(os.str());
    }
  }
  if (!header_seen) throw std::invalid_argument("dataset CSV: missing header");
  ds.validate();
  return ds;
}

FlowDataset load_dataset(const std::string& source) {
  for (const auto& id : embedded_dataset_ids())
    if (id == source) return embedded_dataset(id);
  std::ifstream in(source);
  if (!in) throw std::invalid_argument("load_dataset: unknown id or unreadable path: " + source);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset_csv(buf.str(), source);
}

}  // namespace plgw
