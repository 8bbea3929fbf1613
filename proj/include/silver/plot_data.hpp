#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "silver/data_io.hpp"
#include "silver/errors.hpp"
#include "silver/matrix.hpp"
#include "silver/numeric.hpp"
#include "silver/stats.hpp"

// Tab-separated plot-data files for external plotters. Numbers are written at
// full precision so exported matrices and curves round-trip exactly.

namespace silver::io {

// Heatmap grid: header "id <col ids...>", then one row per line.
inline void save_heatmap(const Matrix& sim, const std::vector<std::string>& row_ids,
                         const std::vector<std::string>& col_ids, const std::string& path) {
  if (sim.rows() == 0 || sim.cols() == 0) throw Error("save_heatmap: empty matrix");
  if (!sim.all_finite()) throw Error("save_heatmap: non-finite values");
  if (row_ids.size() != sim.rows() || col_ids.size() != sim.cols()) {
    throw Error("save_heatmap: id counts do not match matrix shape");
  }
  std::string out = "id";
  for (const auto& c : col_ids) {
    out += '\t';
    out += c;
  }
  out += '\n';
  for (std::size_t i = 0; i < sim.rows(); ++i) {
    out += row_ids[i];
    for (std::size_t j = 0; j < sim.cols(); ++j) {
      out += '\t';
      out += fmt_full(sim(i, j));
    }
    out += '\n';
  }
  detail::write_file(path, out);
}

struct Heatmap {
  Matrix values;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
};

inline Heatmap load_heatmap(const std::string& path) {
  const std::string bytes = detail::read_file(path);
  std::istringstream in(bytes);
  std::string raw;
  if (!std::getline(in, raw)) throw ParseError(path + ":1: empty heatmap file");
  auto header = detail::split_tabs(detail::strip_cr(raw));
  if (header.size() < 2 || header[0] != "id") {
    throw ParseError(path + ":1: expected header starting with 'id'");
  }
  Heatmap h;
  h.col_ids.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (line.empty()) continue;
    const auto fields = detail::split_tabs(line);
    if (fields.size() != header.size()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    h.row_ids.push_back(fields[0]);
    std::vector<double> row;
    row.reserve(fields.size() - 1);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(fields[j], &used));
        if (used != fields[j].size()) throw std::invalid_argument(fields[j]);
      } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": bad number '" + fields[j] +
                         "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");
  h.values = Matrix::from_rows(rows);
  return h;
}

// Score dump consumed by kde-export: one "metric<TAB>condition<TAB>value"
// line per item.
inline void save_scores(const std::vector<ScoreDistribution>& dists, const std::string& path) {
  std::string out;
  for (const auto& d : dists) {
    for (double v : d.values) {
      out += d.metric;
      out += '\t';
      out += d.condition;
      out += '\t';
      out += fmt_full(v);
      out += '\n';
    }
  }
  detail::write_file(path, out);
}

// Groups lines by (metric, condition) preserving first-appearance order.
inline std::vector<ScoreDistribution> load_scores(const std::string& path) {
  const std::string bytes = detail::read_file(path);
  std::istringstream in(bytes);
  std::vector<ScoreDistribution> dists;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (line.empty()) continue;
    const auto fields = detail::split_tabs(line);
    if (fields.size() != 3) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected metric<TAB>condition<TAB>value");
    }
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument(fields[2]);
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": bad number '" + fields[2] + "'");
    }
    if (!std::isfinite(v)) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": non-finite value");
    }
    auto it = std::find_if(dists.begin(), dists.end(), [&](const ScoreDistribution& d) {
      return d.metric == fields[0] && d.condition == fields[1];
    });
    if (it == dists.end()) {
      dists.push_back({fields[0], fields[1], {}, 0});
      it = dists.end() - 1;
    }
    it->values.push_back(v);
  }
  return dists;
}

// Long-format density curves: one "metric condition grid density" line per
// grid point, per (metric, condition) block.
inline void save_density_curves(
    const std::vector<std::pair<ScoreDistribution, DensityCurve>>& curves,
    const std::string& path) {
  std::string out = "metric\tcondition\tgrid\tdensity\n";
  for (const auto& [dist, curve] : curves) {
    for (std::size_t g = 0; g < curve.grid.size(); ++g) {
      out += dist.metric;
      out += '\t';
      out += dist.condition;
      out += '\t';
      out += fmt_full(curve.grid[g]);
      out += '\t';
      out += fmt_full(curve.density[g]);
      out += '\n';
    }
  }
  detail::write_file(path, out);
}

}  // namespace silver::io
