#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "photocount/count_density.hpp"
#include "photocount/exponent_fit.hpp"
#include "photocount/response_curve.hpp"

namespace photocount::io {

using nlohmann::json;

/// Scientific notation with 17 significant digits, '.' as decimal separator.
inline std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::string to_string(DensityMethod m)
{
  return m == DensityMethod::deterministic ? "deterministic" : "monte_carlo";
}

inline std::string to_string(NodeKind k)
{
  switch (k) {
  case NodeKind::regular:
    return "regular";
  case NodeKind::matched:
    return "matched";
  case NodeKind::singular:
    return "singular";
  }
  return "regular";
}

inline std::string to_string(ThresholdClass c)
{
  return c == ThresholdClass::above_ensemble ? "above_ensemble" : "below_ensemble";
}

/// Writes "# <json>" followed by the header row and the rows.
class CsvWriter
{
public:
  CsvWriter(const std::filesystem::path& path, const json& provenance, std::vector<std::string> columns)
      : out_(path, std::ios::binary)
  {
    if (!out_) {
      throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out_ << "# " << provenance.dump() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) {
      out_ << (i ? "," : "") << columns[i];
    }
    out_ << '\n';
  }

  template <class... Cells>
  void row(const Cells&... cells)
  {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(std::string_view s) { return std::string(s); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v)
  {
    return std::to_string(v);
  }

  std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const json& doc)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << doc.dump(2) << '\n';
}

inline json to_json(const Peak& p) { return {{"gamma_star", p.gamma_star}, {"mu_max", p.mu_max}}; }

inline json to_json(const ResponseCurve& c)
{
  json branches = json::array();
  for (const auto& b : c.branches) {
    branches.push_back({{"first", b.first},
                        {"last", b.last},
                        {"direction", b.direction == Direction::increasing ? "increasing" : "decreasing"},
                        {"open_ended", b.open_ended}});
  }
  json maxima = json::array();
  for (const auto& p : c.maxima) {
    maxima.push_back(to_json(p));
  }
  return {{"moment_order_r", c.moment_order_r},
          {"grid_points", c.gamma_grid.size()},
          {"gamma_max", c.gamma_grid.back()},
          {"branches", branches},
          {"peak", c.peak ? to_json(*c.peak) : json(nullptr)},
          {"maxima", maxima},
          {"multiple_maxima", c.multiple_maxima},
          {"monotone", !c.peak.has_value()},
          {"plateau_estimate", c.plateau_estimate},
          {"grid_supremum", c.grid_supremum},
          {"mu_max", c.mu_max}};
}

/// CSV columns: gamma, gamma_over_A, mu_r, branch_id.
inline void write_curve_csv(const std::filesystem::path& path, const ResponseCurve& c, const json& provenance)
{
  CsvWriter csv(path, provenance, {"gamma", "gamma_over_A", "mu_r", "branch_id"});
  for (std::size_t i = 0; i < c.gamma_grid.size(); ++i) {
    csv.row(c.gamma_grid[i], c.gamma_grid[i] / c.params.gain_A, c.mu_values[i], c.branch_of(i));
  }
}

inline json to_json(const CountDensity& d, bool with_table)
{
  json singular = json::array();
  for (const auto& s : d.singular_points) {
    singular.push_back({{"location", s.location}, {"exponent", s.exponent}, {"kind", s.kind}});
  }
  json doc = {{"moment_order_r", d.moment_order_r},
              {"method", to_string(d.method)},
              {"mu_max", d.mu_max},
              {"mass_check", d.mass_check},
              {"singular_points", singular},
              {"flags", d.flags},
              {"nodes", d.mu_grid.size()}};
  if (d.method == DensityMethod::monte_carlo) {
    doc["seed"] = d.seed;
    doc["samples"] = d.samples;
    doc["bins"] = d.density.size();
  }
  if (with_table) {
    json rows = json::array();
    for (std::size_t i = 0; i < d.mu_grid.size(); ++i) {
      rows.push_back({d.mu_grid[i], d.mu_grid[i] / d.mu_max, d.density[i], to_string(d.node_kind[i])});
    }
    doc["columns"] = {"mu", "mu_over_mu_max", "density", "flag"};
    doc["rows"] = rows;
  }
  return doc;
}

/// CSV columns: mu, mu_over_mu_max, density, method, flag.
inline void write_density_csv(const std::filesystem::path& path, const CountDensity& d, const json& provenance)
{
  CsvWriter csv(path, provenance, {"mu", "mu_over_mu_max", "density", "method", "flag"});
  const std::string method = to_string(d.method);
  for (std::size_t i = 0; i < d.mu_grid.size(); ++i) {
    csv.row(d.mu_grid[i], d.mu_grid[i] / d.mu_max, d.density[i], method, to_string(d.node_kind[i]));
  }
}

inline json to_json(const ExponentFit& f, double target, double tolerance)
{
  const bool pass = std::abs(f.exponent - target) <= tolerance;
  return {{"exponent", f.exponent},
          {"stderr", f.standard_error},
          {"window", {f.window.first, f.window.second}},
          {"n_points", f.n_points},
          {"target", target},
          {"tolerance", tolerance},
          {"pass", pass}};
}

} // namespace photocount::io
