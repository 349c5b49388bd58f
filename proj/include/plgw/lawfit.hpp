#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace plgw {

/// One flow measurement: prescribed inlet velocity and the resulting average
/// total-energy loss per length.
struct FlowRow {
  double v_inlet;  // m/s
  double e_grad;   // Delta E_T / Delta L, energy per volume per meter
};

struct FlowDataset {
  std::vector<FlowRow> rows;
  std::string label;
  std::string source_id;
  double A_inlet = 0.0;   // m^2 (the 2-d model carries area per unit thickness)
  double phi_eff = 0.0;   // fracture volume fraction
  std::optional<double> delta_L;  // m

  void validate() const;  // strictly increasing positive v, positive e_grad
};

enum class LawKind { darcy, power };

struct GaussNewtonTrace {
  int iteration;
  double beta, gamma, ssr;
  double step_scale;
};

struct FitResult {
  LawKind kind = LawKind::darcy;
  double alpha = 0.0;          // darcy
  double beta = 0.0, gamma = 0.0;  // power
  double rmse = 0.0;           // sqrt(SSR / (n-1))
  double rmse_n = 0.0;         // sqrt(SSR / n); the 3-d table in the source data
                               // reproduces under this convention
  int n = 0;
  std::vector<double> residuals;          // fitted - observed
  std::vector<GaussNewtonTrace> trace;    // power fits only
  std::string dataset_label;

  nlohmann::json to_json() const;
};

/// Exact least-squares line through the origin: alpha = sum(u y) / sum(u^2).
FitResult fit_darcy(const FlowDataset& ds);

/// Least squares for y = beta u^gamma on the raw scale: log-log start,
/// damped Gauss-Newton to relative parameter change < 1e-10. Deterministic;
/// throws after 200 iterations with the trace attached to the exception text.
FitResult fit_power(const FlowDataset& ds);

double law_eval(const FitResult& fit, double u);
double law_invert(const FitResult& fit, double y);

/// sqrt(sum r^2 / (n-1)); requires n >= 2.
double rmse(std::span<const double> residuals);
/// sqrt(sum r^2 / n).
double rmse_population(std::span<const double> residuals);

/// Total mechanical energy per volume: z rho g + P + rho v^2 / 2.
double total_energy(double z, double P, double v, double rho, double g);

/// Piezometric head z + P / (rho g).
double piezometric_head(double z, double P, double rho, double g);

/// Cross-section profile of E_T over one interval: (coordinate, E_T) samples.
struct EnergyProfile {
  std::vector<std::pair<double, double>> samples;
};

/// Trapezoidal average of E_T over a union of cross-section intervals.
double average_total_energy(std::span<const EnergyProfile> intervals);

/// Aquifer-scale law q = K (dh/dL)^e obtained by composing the fitted law
/// with the head relation E = rho g h and the inlet area.
struct AquiferLaw {
  double K = 0.0;
  double e = 0.0;
  double rho = 0.0, g = 0.0, A_inlet = 0.0;
  std::string fit_label;
  nlohmann::json to_json() const;
};

AquiferLaw derive_aquifer_law(const FitResult& fit, double A_inlet, double rho, double g);

/// Coefficients of phi_eff dh/dt - K div(h |grad h|^{e-1} grad h) = g_hat,
/// with the solver mapping p = e + 1.
struct GroundwaterPde {
  double phi_eff = 0.0;
  double K = 0.0;
  double grad_exponent = 0.0;  // e - 1
  double p() const { return grad_exponent + 2.0; }
  nlohmann::json to_json() const;
};

GroundwaterPde build_groundwater_pde(const AquiferLaw& law, double phi_eff);

/// Loads a dataset from an embedded id ("spic-2d", "spic-3d") or a CSV path
/// with header "v_inlet,e_grad". Malformed rows and non-monotone velocities
/// are rejected with the offending row index.
FlowDataset load_dataset(const std::string& source);

/// Embedded fixtures transcribed from the source flow tables.
const FlowDataset& embedded_dataset(const std::string& id);
std::vector<std::string> embedded_dataset_ids();

/// Parses dataset CSV text (used by load_dataset for paths).
FlowDataset parse_dataset_csv(const std::string& text, const std::string& label);

}  // namespace plgw
