#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "silver/experiments.hpp"
#include "silver/numeric.hpp"
#include "silver/stats.hpp"
#include "silver/version.hpp"

// Analysis reports and their three renderings: a human table (4 significant
// digits), tab-delimited blocks for plotting, and structured JSON at full
// precision. All renderings are deterministic functions of the report, so
// identical inputs, flags, and seeds reproduce them byte for byte.

namespace silver {

struct InputDigest {
  std::string path;
  std::string fnv1a64_hex;
};

struct SeparabilityRow {
  std::string metric;
  SeparabilityResult result;
  std::size_t dropped = 0;  // items removed because a side was undefined
};

struct ProsodyMetricRow {
  std::string metric;
  ProsodyReport report;
  std::size_t dropped = 0;
};

struct AnalysisReport {
  std::string command;
  std::vector<InputDigest> inputs;
  std::vector<std::pair<std::string, std::string>> options;  // echoed flags, in order

  // Separability sections (correct-vs-random, reorder).
  std::string first_condition;
  std::string second_condition;
  std::vector<SeparabilityRow> separability;

  // Prosody section.
  std::array<ProsodyCategoryStats, 3> category_counts{};
  bool has_categories = false;
  std::vector<ProsodyMetricRow> prosody;

  // Retrieval section.
  std::vector<RecallTable> recall;
};

namespace detail {

inline std::string align_columns(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (row.size() > widths.size()) widths.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      if (c + 1 < row.size()) {
        out.append(widths[c] - row[c].size() + 2, ' ');
      }
    }
    out += '\n';
  }
  return out;
}

inline const std::array<const char*, 3> kCategoryNames = {
    "no-intensity", "low-intensity", "high-intensity"};

}  // namespace detail

inline std::string render_table(const AnalysisReport& r) {
  std::string out;
  out += std::string(kToolName) + " " + kToolVersion + " | " + r.command + "\n";
  for (const auto& in : r.inputs) {
    out += "input: " + in.path + " (fnv1a64 " + in.fnv1a64_hex + ")\n";
  }
  for (const auto& [k, v] : r.options) out += "option: " + k + "=" + v + "\n";

  if (!r.separability.empty()) {
    out += "\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"metric", "n_" + r.first_condition, "n_" + r.second_condition, "dropped",
                    "overlap%", "auc"});
    for (const auto& row : r.separability) {
      rows.push_back({row.metric, std::to_string(row.result.n_pos),
                      std::to_string(row.result.n_neg), std::to_string(row.dropped),
                      fmt_sig4(row.result.overlap_percent), fmt_sig4(row.result.roc_auc)});
    }
    out += detail::align_columns(rows);
  }

  if (r.has_categories) {
    out += "\nprosody categories\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"category", "count", "percent"});
    for (std::size_t c = 0; c < 3; ++c) {
      rows.push_back({detail::kCategoryNames[c], std::to_string(r.category_counts[c].count),
                      fmt_sig4(r.category_counts[c].percent)});
    }
    out += detail::align_columns(rows);
  }
  if (!r.prosody.empty()) {
    out += "\ncorrelation with prosody intensity\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"metric", "n", "dropped", "r", "p"});
    for (const auto& row : r.prosody) {
      rows.push_back({row.metric, std::to_string(row.report.n), std::to_string(row.dropped),
                      row.report.correlation ? fmt_sig4(row.report.correlation->r) : "-",
                      row.report.correlation ? fmt_sig4(row.report.correlation->p) : "-"});
    }
    out += detail::align_columns(rows);

    out += "\nscores by category\n";
    rows.clear();
    rows.push_back({"metric", "category", "count", "median", "q1", "q3"});
    for (const auto& row : r.prosody) {
      for (std::size_t c = 0; c < 3; ++c) {
        const auto& cat = row.report.categories[c];
        rows.push_back({row.metric, detail::kCategoryNames[c], std::to_string(cat.count),
                        cat.box ? fmt_sig4(cat.box->median) : "-",
                        cat.box ? fmt_sig4(cat.box->q1) : "-",
                        cat.box ? fmt_sig4(cat.box->q3) : "-"});
      }
    }
    out += detail::align_columns(rows);
  }

  if (!r.recall.empty()) {
    out += "\nretrieval recall\n";
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"direction"};
    for (std::size_t k : r.recall.front().ks) header.push_back("R@" + std::to_string(k));
    rows.push_back(header);
    for (const auto& table : r.recall) {
      std::vector<std::string> row{to_string(table.direction)};
      for (double rec : table.recalls) row.push_back(fmt_sig4(rec));
      rows.push_back(row);
    }
    out += detail::align_columns(rows);
  }
  return out;
}

inline std::string render_delimited(const AnalysisReport& r) {
  std::string out;
  out += "# " + std::string(kToolName) + "\t" + kToolVersion + "\n";
  out += "# command\t" + r.command + "\n";
  for (const auto& in : r.inputs) {
    out += "# input\t" + in.path + "\t" + in.fnv1a64_hex + "\n";
  }
  for (const auto& [k, v] : r.options) out += "# option\t" + k + "\t" + v + "\n";

  if (!r.separability.empty()) {
    out += "metric\tn_" + r.first_condition + "\tn_" + r.second_condition +
           "\tdropped\toverlap_percent\troc_auc\n";
    for (const auto& row : r.separability) {
      out += row.metric + "\t" + std::to_string(row.result.n_pos) + "\t" +
             std::to_string(row.result.n_neg) + "\t" + std::to_string(row.dropped) + "\t" +
             fmt_full(row.result.overlap_percent) + "\t" + fmt_full(row.result.roc_auc) + "\n";
    }
  }

  if (r.has_categories) {
    out += "category\tcount\tpercent\n";
    for (std::size_t c = 0; c < 3; ++c) {
      out += std::string(detail::kCategoryNames[c]) + "\t" +
             std::to_string(r.category_counts[c].count) + "\t" +
             fmt_full(r.category_counts[c].percent) + "\n";
    }
  }
  if (!r.prosody.empty()) {
    out += "metric\tn\tdropped\tpearson_r\tpearson_p\n";
    for (const auto& row : r.prosody) {
      out += row.metric + "\t" + std::to_string(row.report.n) + "\t" +
             std::to_string(row.dropped) + "\t" +
             (row.report.correlation ? fmt_full(row.report.correlation->r) : "-") + "\t" +
             (row.report.correlation ? fmt_full(row.report.correlation->p) : "-") + "\n";
    }
    out += "metric\tcategory\tcount\tmedian\tq1\tq3\twhisker_lo\twhisker_hi\toutliers\n";
    for (const auto& row : r.prosody) {
      for (std::size_t c = 0; c < 3; ++c) {
        const auto& cat = row.report.categories[c];
        out += row.metric + "\t" + detail::kCategoryNames[c] + "\t" + std::to_string(cat.count);
        if (cat.box) {
          out += "\t" + fmt_full(cat.box->median) + "\t" + fmt_full(cat.box->q1) + "\t" +
                 fmt_full(cat.box->q3) + "\t" + fmt_full(cat.box->whisker_lo) + "\t" +
                 fmt_full(cat.box->whisker_hi) + "\t" + std::to_string(cat.box->outliers.size());
        } else {
          out += "\t-\t-\t-\t-\t-\t0";
        }
        out += "\n";
      }
    }
  }

  if (!r.recall.empty()) {
    out += "direction\tk\trecall\n";
    for (const auto& table : r.recall) {
      for (std::size_t i = 0; i < table.ks.size(); ++i) {
        out += std::string(to_string(table.direction)) + "\t" + std::to_string(table.ks[i]) +
               "\t" + fmt_full(table.recalls[i]) + "\n";
      }
    }
  }
  return out;
}

inline std::string render_structured(const AnalysisReport& r) {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = r.command;
  j["inputs"] = nlohmann::json::array();
  for (const auto& in : r.inputs) {
    j["inputs"].push_back({{"path", in.path}, {"fnv1a64", in.fnv1a64_hex}});
  }
  nlohmann::json opts = nlohmann::json::object();
  for (const auto& [k, v] : r.options) opts[k] = v;
  j["options"] = opts;

  if (!r.separability.empty()) {
    j["conditions"] = {r.first_condition, r.second_condition};
    auto rows = nlohmann::json::array();
    for (const auto& row : r.separability) {
      rows.push_back({{"metric", row.metric},
                      {"n_first", row.result.n_pos},
                      {"n_second", row.result.n_neg},
                      {"dropped", row.dropped},
                      {"overlap_percent", row.result.overlap_percent},
                      {"roc_auc", row.result.roc_auc}});
    }
    j["separability"] = rows;
  }

  if (r.has_categories) {
    auto cats = nlohmann::json::array();
    for (std::size_t c = 0; c < 3; ++c) {
      cats.push_back({{"category", detail::kCategoryNames[c]},
                      {"count", r.category_counts[c].count},
                      {"percent", r.category_counts[c].percent}});
    }
    j["prosody_categories"] = cats;
  }
  if (!r.prosody.empty()) {
    auto rows = nlohmann::json::array();
    for (const auto& row : r.prosody) {
      nlohmann::json m;
      m["metric"] = row.metric;
      m["n"] = row.report.n;
      m["dropped"] = row.dropped;
      if (row.report.correlation) {
        m["pearson_r"] = row.report.correlation->r;
        m["pearson_p"] = row.report.correlation->p;
      }
      auto cats = nlohmann::json::array();
      for (std::size_t c = 0; c < 3; ++c) {
        const auto& cat = row.report.categories[c];
        nlohmann::json cj;
        cj["category"] = detail::kCategoryNames[c];
        cj["count"] = cat.count;
        if (cat.box) {
          cj["median"] = cat.box->median;
          cj["q1"] = cat.box->q1;
          cj["q3"] = cat.box->q3;
          cj["whisker_lo"] = cat.box->whisker_lo;
          cj["whisker_hi"] = cat.box->whisker_hi;
          cj["outliers"] = cat.box->outliers;
        }
        cats.push_back(cj);
      }
      m["categories"] = cats;
      rows.push_back(m);
    }
    j["prosody_metrics"] = rows;
  }

  if (!r.recall.empty()) {
    auto tables = nlohmann::json::array();
    for (const auto& table : r.recall) {
      nlohmann::json t;
      t["direction"] = to_string(table.direction);
      t["ks"] = table.ks;
      t["recalls"] = table.recalls;
      tables.push_back(t);
    }
    j["retrieval"] = tables;
  }
  return j.dump(2) + "\n";
}

enum class ReportFormat { Table, Delimited, Structured };

inline std::string render(const AnalysisReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::Table: return render_table(r);
    case ReportFormat::Delimited: return render_delimited(r);
    default: return render_structured(r);
  }
}

}  // namespace silver
