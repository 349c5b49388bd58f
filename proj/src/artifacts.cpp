#include "plgw/artifacts.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "plgw/version.hpp"

namespace plgw {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

namespace {

void write_preamble(std::ofstream& out, const std::string& config_echo) {
  out << "# plgw " << kVersion << "\n";
  if (!config_echo.empty()) {
    std::istringstream echo(config_echo);
    std::string line;
    while (std::getline(echo, line)) out << "# config: " << line << "\n";
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::string& config_echo) {
  auto out = open_out(path);
  write_preamble(out, config_echo);
  const bool two_d = !traj.fields.empty() && traj.fields.front().two_d();
  out << (two_d ? "t,x,y,u\n" : "t,x,u\n");
  for (size_t s = 0; s < traj.fields.size(); ++s) {
    const auto& f = traj.fields[s];
    const std::string ts = format_double(traj.times[s]);
    if (two_d) {
      for (size_t j = 0; j < f.ny(); ++j)
        for (size_t i = 0; i < f.nx(); ++i)
          out << ts << ',' << format_double(f.xs[i]) << ',' << format_double(f.ys[j]) << ','
              << format_double(f.at(i, j)) << '\n';
    } else {
      for (size_t i = 0; i < f.xs.size(); ++i)
        out << ts << ',' << format_double(f.xs[i]) << ',' << format_double(f.values[i]) << '\n';
    }
  }
}

void write_pairs_csv(const std::string& path, const std::string& header,
                     const std::vector<std::pair<double, double>>& rows,
                     const std::string& config_echo) {
  auto out = open_out(path);
  write_preamble(out, config_echo);
  out << header << '\n';
  for (const auto& [a, b] : rows) out << format_double(a) << ',' << format_double(b) << '\n';
}

void write_table_csv(const std::string& path, const std::string& header,
                     const std::vector<std::vector<double>>& rows,
                     const std::string& config_echo) {
  auto out = open_out(path);
  write_preamble(out, config_echo);
  out << header << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
}

void write_columns_txt(const std::string& path, const std::vector<std::vector<double>>& rows,
                       const std::string& comment) {
  auto out = open_out(path);
  out << "# plgw " << kVersion << (comment.empty() ? "" : ": ") << comment << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ' ';
      out << format_double(row[i]);
    }
    out << '\n';
  }
}

nlohmann::json run_manifest(const std::string& command, const std::string& config_echo,
                            const Trajectory& traj) {
  nlohmann::json diag = nlohmann::json::array();
  for (const auto& s : traj.steps)
    diag.push_back({{"t", s.t},
                    {"dt", s.dt},
                    {"nonlinear_iterations", s.nonlinear_iterations},
                    {"residual_norm", s.residual_norm},
                    {"mass", s.mass},
                    {"support", s.support},
                    {"fallback_used", s.fallback_used}});
  nlohmann::json mass_series = nlohmann::json::array();
  nlohmann::json support_series = nlohmann::json::array();
  for (const auto& s : traj.steps) {
    mass_series.push_back({s.t, s.mass});
    support_series.push_back({s.t, s.support});
  }
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  return nlohmann::json{
      {"command", command},
      {"version", kVersion},
      {"config_echo", config_echo},
      {"snapshots", traj.times},
      {"steps", diag},
      {"mass_series", mass_series},
      {"support_series", support_series},
      {"generated_at", std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

GriddedField GriddedField::from_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  int cols = 0;
  std::vector<std::array<double, 3>> entries;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      std::string h = line;
      h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return std::isspace(c); }), h.end());
      if (h == "x,value")
        cols = 2;
      else if (h == "x,y,value")
        cols = 3;
      else
        throw std::invalid_argument("gridded CSV: header must be 'x,value' or 'x,y,value' (line " +
                                    std::to_string(lineno) + ")");
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::array<double, 3> e{0.0, 0.0, 0.0};
    std::string tok;
    for (int c = 0; c < cols; ++c) {
      if (!std::getline(row, tok, ','))
        throw std::invalid_argument("gridded CSV: malformed row at line " + std::to_string(lineno));
      e[c] = std::stod(tok);
    }
    entries.push_back(e);
  }
  if (entries.empty()) throw std::invalid_argument("gridded CSV: no data rows");

  GriddedField g;
  g.two_d_ = cols == 3;
  if (!g.two_d_) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    for (const auto& e : entries) {
      g.xs_.push_back(e[0]);
      g.values_.push_back(e[1]);
    }
    return g;
  }
  std::set<double> xs, ys;
  for (const auto& e : entries) {
    xs.insert(e[0]);
    ys.insert(e[1]);
  }
  g.xs_.assign(xs.begin(), xs.end());
  g.ys_.assign(ys.begin(), ys.end());
  if (entries.size() != g.xs_.size() * g.ys_.size())
    throw std::invalid_argument("gridded CSV: samples do not form a rectangular grid");
  g.values_.assign(entries.size(), 0.0);
  auto xi = [&](double v) {
    return std::lower_bound(g.xs_.begin(), g.xs_.end(), v) - g.xs_.begin();
  };
  auto yi = [&](double v) {
    return std::lower_bound(g.ys_.begin(), g.ys_.end(), v) - g.ys_.begin();
  };
  for (const auto& e : entries) g.values_[yi(e[1]) * g.xs_.size() + xi(e[0])] = e[2];
  return g;
}

double GriddedField::operator()(double x, double y) const {
  auto locate = [](const std::vector<double>& axis, double v, size_t& i, double& w) {
    if (v <= axis.front()) {
      i = 0;
      w = 0.0;
      return;
    }
    if (v >= axis.back()) {
      i = axis.size() - 2;
      w = 1.0;
      return;
    }
    i = static_cast<size_t>(std::upper_bound(axis.begin(), axis.end(), v) - axis.begin()) - 1;
    w = (v - axis[i]) / (axis[i + 1] - axis[i]);
  };
  if (!two_d_) {
    if (xs_.size() == 1) return values_[0];
    size_t i;
    double w;
    locate(xs_, x, i, w);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
  }
  size_t i, j;
  double wx, wy;
  locate(xs_, x, i, wx);
  locate(ys_, y, j, wy);
  const size_t nx = xs_.size();
  const double v00 = values_[j * nx + i], v10 = values_[j * nx + i + 1];
  const double v01 = values_[(j + 1) * nx + i], v11 = values_[(j + 1) * nx + i + 1];
  return (1.0 - wy) * ((1.0 - wx) * v00 + wx * v10) + wy * ((1.0 - wx) * v01 + wx * v11);
}

}  // namespace plgw
