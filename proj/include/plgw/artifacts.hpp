#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "plgw/grid.hpp"

namespace plgw {

/// Shortest round-trip decimal representation; deterministic across runs.
std::string format_double(double v);

/// CSV with comment lines carrying the tool version and a config echo,
/// followed by the header (t, x [, y], u) and one row per node per stamp.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::string& config_echo);

/// Two-column CSV (first, second) with the same comment preamble.
void write_pairs_csv(const std::string& path, const std::string& header,
                     const std::vector<std::pair<double, double>>& rows,
                     const std::string& config_echo);

/// General numeric CSV with the same comment preamble.
void write_table_csv(const std::string& path, const std::string& header,
                     const std::vector<std::vector<double>>& rows,
                     const std::string& config_echo);

/// Plain numeric columns, one row per tuple; consumable by generic plotting
/// tools (comment lines start with '#').
void write_columns_txt(const std::string& path, const std::vector<std::vector<double>>& rows,
                       const std::string& comment);

/// Run manifest skeleton: version, config echo, and per-step diagnostic
/// series; the wall-clock stamp lives in the single "generated_at" field so
/// that everything else is byte-reproducible.
nlohmann::json run_manifest(const std::string& command, const std::string& config_echo,
                            const Trajectory& traj);

void write_json(const std::string& path, const nlohmann::json& j);

std::string read_text_file(const std::string& path);

/// Loads gridded samples "x[,y],value" (CSV with header) and interpolates
/// piecewise-linearly (bilinearly in 2-d); constant extrapolation outside.
class GriddedField {
 public:
  static GriddedField from_csv(const std::string& path);
  double operator()(double x, double y) const;
  bool two_d() const { return two_d_; }

 private:
  bool two_d_ = false;
  std::vector<double> xs_, ys_, values_;  // 2-d: rectangular grid, x fastest
};

}  // namespace plgw
