#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "silver/embedding.hpp"
#include "silver/errors.hpp"
#include "silver/matrix.hpp"
#include "silver/rng.hpp"
#include "silver/stats.hpp"
#include "silver/text_metrics.hpp"

// Experiment protocols: correct-vs-random discrimination, reordering
// robustness, prosody-stratified analysis, and cross-modal retrieval recall.

namespace silver {

// A fixed-point-free permutation pairing every item with a different item, so
// every "random" pair is genuinely misaligned.
struct PairingPlan {
  std::size_t n = 0;
  std::vector<std::size_t> mapping;
  std::uint64_t seed = 0;
};

// Uniform among derangements by rejection: shuffle until no index maps to
// itself. Deterministic for a fixed seed.
inline PairingPlan derangement(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw TooSmallError("derangement: need n >= 2");
  PairingPlan plan;
  plan.n = n;
  plan.seed = seed;
  plan.mapping.resize(n);
  std::iota(plan.mapping.begin(), plan.mapping.end(), std::size_t{0});
  Rng rng(seed);
  for (;;) {
    rng.shuffle(plan.mapping);
    bool fixed_point = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (plan.mapping[i] == i) {
        fixed_point = true;
        break;
      }
    }
    if (!fixed_point) return plan;
  }
}

struct SeparabilityResult {
  double overlap_percent = 0.0;
  double roc_auc = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

// Overlap and AUC of a metric's correct-pair scores against its mismatched
// ones (correct = positive class). With normalize set, both samples are
// min-max scaled over their pooled range first; AUC is rank-based and does
// not change, overlap may.
inline SeparabilityResult discrimination_analysis(const ScoreDistribution& correct,
                                                  const ScoreDistribution& random,
                                                  bool normalize = true) {
  if (correct.values.size() < 2 || random.values.size() < 2) {
    throw DegenerateSampleError("discrimination_analysis: need >= 2 values per condition");
  }
  SeparabilityResult res;
  res.n_pos = correct.values.size();
  res.n_neg = random.values.size();
  std::vector<double> pos = correct.values;
  std::vector<double> neg = random.values;
  if (normalize) {
    double lo = pos.front(), hi = pos.front();
    for (double v : pos) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (double v : neg) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    pos = min_max_normalize(pos, lo, hi);
    neg = min_max_normalize(neg, lo, hi);
  }
  res.overlap_percent = overlap_percent(pos, neg);
  res.roc_auc = roc_auc(pos, neg);
  return res;
}

// Same machinery, inverted reading: high overlap / low AUC between original
// and reordered scores means the metric tolerates meaning-preserving
// reorderings.
inline SeparabilityResult reorder_analysis(const ScoreDistribution& original,
                                           const ScoreDistribution& reordered,
                                           bool normalize = true) {
  return discrimination_analysis(original, reordered, normalize);
}

// Seeded uniform shuffle guaranteed to differ from the original ordering.
inline TokenList shuffle_reorder(const TokenList& sentence, std::uint64_t seed) {
  if (sentence.size() < 2) throw TooShortError("shuffle_reorder: need >= 2 tokens");
  const bool all_equal =
      std::all_of(sentence.begin(), sentence.end(),
                  [&](const std::string& t) { return t == sentence.front(); });
  if (all_equal) {
    throw TooShortError("shuffle_reorder: all tokens identical, no distinct reordering");
  }
  Rng rng(seed);
  TokenList shuffled = sentence;
  do {
    rng.shuffle(shuffled);
  } while (shuffled == sentence);
  return shuffled;
}

// Row-order shuffle for embedding matrices, mirroring shuffle_reorder on the
// token axis. Single-row matrices pass through unchanged (nothing to reorder).
inline Matrix shuffle_rows(const Matrix& m, std::uint64_t seed) {
  if (m.rows() < 2) return m;
  std::vector<std::size_t> order(m.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  do {
    rng.shuffle(order);
  } while (std::is_sorted(order.begin(), order.end()));
  return m.permuted_rows(order);
}

enum class ProsodyCategory { NoIntensity, LowIntensity, HighIntensity };

inline const char* to_string(ProsodyCategory c) {
  switch (c) {
    case ProsodyCategory::NoIntensity: return "no-intensity";
    case ProsodyCategory::LowIntensity: return "low-intensity";
    default: return "high-intensity";
  }
}

// Token-level intensity labels (0/1/2) with the derived sentence intensity
// I = sum(t_i) and its category: I = 0 none, 1 <= I <= 4 low, I >= 5 high.
struct ProsodyAnnotation {
  std::string sentence_id;
  std::vector<int> token_intensities;
  int intensity = 0;
  ProsodyCategory category = ProsodyCategory::NoIntensity;
};

inline ProsodyCategory categorize_intensity(int intensity) {
  if (intensity == 0) return ProsodyCategory::NoIntensity;
  if (intensity <= 4) return ProsodyCategory::LowIntensity;
  return ProsodyCategory::HighIntensity;
}

inline ProsodyAnnotation annotate_prosody(std::string sentence_id,
                                          std::vector<int> token_intensities) {
  for (int t : token_intensities) {
    if (t < 0 || t > 2) {
      throw BadIntensityError("intensity " + std::to_string(t) + " outside {0,1,2} (sentence " +
                              sentence_id + ")");
    }
  }
  ProsodyAnnotation a;
  a.sentence_id = std::move(sentence_id);
  a.token_intensities = std::move(token_intensities);
  a.intensity = std::accumulate(a.token_intensities.begin(), a.token_intensities.end(), 0);
  a.category = categorize_intensity(a.intensity);
  return a;
}

struct ScoredSentence {
  std::string id;
  double score = 0.0;
};

struct ProsodyCategoryStats {
  std::size_t count = 0;
  double percent = 0.0;
  std::optional<BoxStats> box;  // absent for empty categories
};

struct ProsodyReport {
  std::array<ProsodyCategoryStats, 3> categories;  // indexed by ProsodyCategory
  std::optional<PearsonResult> correlation;        // score vs integer I; absent if degenerate
  std::size_t n = 0;
};

// Stratifies one metric's per-sentence scores by prosody category and
// correlates raw scores with sentence intensity.
inline ProsodyReport prosody_analysis(std::span<const ScoredSentence> scores,
                                      std::span<const ProsodyAnnotation> annotations) {
  std::map<std::string, const ProsodyAnnotation*> by_id;
  for (const auto& a : annotations) by_id[a.sentence_id] = &a;

  ProsodyReport report;
  report.n = scores.size();
  std::array<std::vector<double>, 3> grouped;
  std::vector<double> xs, is;
  xs.reserve(scores.size());
  is.reserve(scores.size());
  for (const auto& s : scores) {
    auto it = by_id.find(s.id);
    if (it == by_id.end()) {
      throw MissingAnnotationError("no prosody annotation for sentence " + s.id);
    }
    grouped[static_cast<std::size_t>(it->second->category)].push_back(s.score);
    xs.push_back(s.score);
    is.push_back(static_cast<double>(it->second->intensity));
  }
  for (std::size_t c = 0; c < 3; ++c) {
    auto& out = report.categories[c];
    out.count = grouped[c].size();
    out.percent = scores.empty()
                      ? 0.0
                      : 100.0 * static_cast<double>(out.count) / static_cast<double>(scores.size());
    if (!grouped[c].empty()) out.box = box_stats(grouped[c]);
  }
  try {
    report.correlation = pearson(xs, is);
  } catch (const DegenerateSampleError&) {
    report.correlation = std::nullopt;
  }
  return report;
}

struct RecallTable {
  std::vector<std::size_t> ks;
  std::vector<double> recalls;
  Direction direction = Direction::TextToVideo;
};

// R@k over a square similarity matrix whose diagonal is the ground truth.
// TextToVideo ranks along each query's row, VideoToText along each column;
// ties rank the lower index first.
inline RecallTable recall_at_k(const Matrix& sim, std::vector<std::size_t> ks,
                               Direction direction) {
  if (sim.rows() != sim.cols()) {
    throw NotSquareError("recall_at_k: matrix is " + std::to_string(sim.rows()) + "x" +
                         std::to_string(sim.cols()));
  }
  if (sim.rows() == 0) throw NotSquareError("recall_at_k: empty matrix");
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  const std::size_t n = sim.rows();
  const bool by_row = direction == Direction::TextToVideo;
  std::vector<std::size_t> true_rank(n);
  for (std::size_t q = 0; q < n; ++q) {
    const double truth = sim(q, q);
    std::size_t rank = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == q) continue;
      const double v = by_row ? sim(q, j) : sim(j, q);
      if (v > truth || (v == truth && j < q)) ++rank;
    }
    true_rank[q] = rank;
  }

  RecallTable table;
  table.direction = direction;
  table.ks = ks;
  table.recalls.reserve(ks.size());
  for (std::size_t k : ks) {
    std::size_t hits = 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (true_rank[q] <= k) ++hits;
    }
    table.recalls.push_back(static_cast<double>(hits) / static_cast<double>(n));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Score assembly: turn per-item scoring callbacks into the paired correct /
// mismatched (or original / reordered) distributions the analyses consume.
// Items where either side is undefined are dropped from both, with the count
// reported, so the two samples stay item-aligned.

struct PairedScores {
  std::vector<double> first;   // correct / original
  std::vector<double> second;  // random / reordered
  std::size_t dropped = 0;
};

inline PairedScores assemble_paired(
    std::size_t n, const std::function<std::optional<double>(std::size_t)>& first_score,
    const std::function<std::optional<double>(std::size_t)>& second_score) {
  PairedScores out;
  out.first.reserve(n);
  out.second.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = first_score(i);
    const auto b = second_score(i);
    if (!a || !b) {
      ++out.dropped;
      continue;
    }
    out.first.push_back(*a);
    out.second.push_back(*b);
  }
  return out;
}

}  // namespace silver
