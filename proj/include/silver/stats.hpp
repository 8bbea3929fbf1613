#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "silver/errors.hpp"
#include "silver/numeric.hpp"

// Distribution analytics for metric-score collections: Gaussian KDE, the
// overlapping coefficient of two densities, rank-based ROC AUC, min-max
// normalization, Pearson correlation with Student-t p-values, and box-plot
// statistics.

namespace silver {

// Per-item scores of one metric under one experimental condition. Items whose
// score is undefined (e.g. BLEU-4 of a 3-token hypothesis) are counted, not
// coerced to zero.
struct ScoreDistribution {
  std::string metric;
  std::string condition;
  std::vector<double> values;
  std::size_t undefined_count = 0;
};

namespace detail {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;

inline double normal_pdf(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

inline double sample_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_var(std::span<const double> v) {  // ddof = 1
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Scott's rule bandwidth.
inline double scott_bandwidth(std::span<const double> v) {
  return std::sqrt(sample_var(v)) *
         std::pow(static_cast<double>(v.size()), -0.2);
}

inline void require_kde_sample(std::span<const double> v, const char* who) {
  if (v.size() < 2) {
    throw DegenerateSampleError(std::string(who) + ": need at least 2 samples");
  }
  if (!(sample_var(v) > 0.0)) {
    throw DegenerateSampleError(std::string(who) + ": zero sample variance");
  }
}

inline std::vector<double> kde_on_grid(std::span<const double> samples, double h,
                                       std::span<const double> grid) {
  std::vector<double> density(grid.size());
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (double x : samples) acc += normal_pdf((grid[g] - x) / h);
    density[g] = acc * norm;
  }
  return density;
}

inline double trapezoid(std::span<const double> grid, std::span<const double> y) {
  double area = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    area += 0.5 * (y[i] + y[i - 1]) * (grid[i] - grid[i - 1]);
  }
  return area;
}

// Regularized incomplete beta I_x(a,b) by Lentz's continued fraction.
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) {
    return 1.0 - incomplete_beta(b, a, 1.0 - x);
  }
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) -
                                std::lgamma(b) + a * std::log(x) +
                                b * std::log1p(-x)) /
                       a;
  constexpr double tiny = 1e-30;
  double f = 1.0, c = 1.0, d = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const int m = i / 2;
    double numerator;
    if (i == 0) {
      numerator = 1.0;
    } else if (i % 2 == 0) {
      numerator = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    } else {
      numerator = -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
    }
    d = 1.0 + numerator * d;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = 1.0 + numerator / c;
    if (std::fabs(c) < tiny) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(1.0 - delta) < 1e-15) break;
  }
  return front * (f - 1.0);
}

// Two-sided tail probability of Student's t with nu degrees of freedom.
inline double student_t_two_sided(double t, double nu) {
  return incomplete_beta(0.5 * nu, 0.5, nu / (nu + t * t));
}

}  // namespace detail

struct DensityCurve {
  std::vector<double> grid;     // ascending
  std::vector<double> density;  // nonnegative, same length
  double bandwidth = 0.0;
};

// Gaussian KDE on a regular grid spanning the samples plus four bandwidths on
// each side (so the curve integrates to 1 up to ~1e-3). Default bandwidth is
// Scott's rule.
inline DensityCurve gaussian_kde(std::span<const double> samples,
                                 std::optional<double> bandwidth = {},
                                 std::size_t grid_size = 512) {
  detail::require_kde_sample(samples, "gaussian_kde");
  if (grid_size < 2) throw Error("gaussian_kde: grid_size must be >= 2");
  DensityCurve curve;
  curve.bandwidth = bandwidth ? *bandwidth : detail::scott_bandwidth(samples);
  if (!(curve.bandwidth > 0.0)) {
    throw DegenerateSampleError("gaussian_kde: non-positive bandwidth");
  }
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *mn - 4.0 * curve.bandwidth;
  const double hi = *mx + 4.0 * curve.bandwidth;
  const double step = (hi - lo) / static_cast<double>(grid_size - 1);
  curve.grid.resize(grid_size);
  for (std::size_t g = 0; g < grid_size; ++g) {
    curve.grid[g] = lo + static_cast<double>(g) * step;
  }
  curve.density = detail::kde_on_grid(samples, curve.bandwidth, curve.grid);
  return curve;
}

// Overlapping coefficient of the two KDEs, in percent: 100 times the integral
// of the pointwise minimum over a shared grid spanning both sample sets.
inline double overlap_percent(std::span<const double> a, std::span<const double> b,
                              std::optional<double> bandwidth = {},
                              std::size_t grid_size = 512) {
  detail::require_kde_sample(a, "overlap_percent");
  detail::require_kde_sample(b, "overlap_percent");
  const double ha = bandwidth ? *bandwidth : detail::scott_bandwidth(a);
  const double hb = bandwidth ? *bandwidth : detail::scott_bandwidth(b);
  const double pad = 4.0 * std::max(ha, hb);
  const double lo = std::min(*std::min_element(a.begin(), a.end()),
                             *std::min_element(b.begin(), b.end())) -
                    pad;
  const double hi = std::max(*std::max_element(a.begin(), a.end()),
                             *std::max_element(b.begin(), b.end())) +
                    pad;
  std::vector<double> grid(grid_size);
  const double step = (hi - lo) / static_cast<double>(grid_size - 1);
  for (std::size_t g = 0; g < grid_size; ++g) grid[g] = lo + static_cast<double>(g) * step;
  const auto fa = detail::kde_on_grid(a, ha, grid);
  const auto fb = detail::kde_on_grid(b, hb, grid);
  std::vector<double> lower(grid_size);
  for (std::size_t g = 0; g < grid_size; ++g) lower[g] = std::min(fa[g], fb[g]);
  return std::clamp(100.0 * detail::trapezoid(grid, lower), 0.0, 100.0);
}

// Rank-based (Mann-Whitney) AUC with midrank tie credit: the probability that
// a random positive outranks a random negative, ties counting half. Exact, no
// threshold sweep.
inline double roc_auc(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) {
    throw DegenerateSampleError("roc_auc: empty sample");
  }
  struct Tagged {
    double value;
    bool positive;
  };
  std::vector<Tagged> all;
  all.reserve(pos.size() + neg.size());
  for (double v : pos) all.push_back({v, true});
  for (double v : neg) all.push_back({v, false});
  std::sort(all.begin(), all.end(),
            [](const Tagged& x, const Tagged& y) { return x.value < y.value; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    // Midrank of the tie group [i, j): average of ranks i+1 .. j.
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].positive) rank_sum_pos += midrank;
    }
    i = j;
  }
  const double n1 = static_cast<double>(pos.size());
  const double n2 = static_cast<double>(neg.size());
  const double u = rank_sum_pos - n1 * (n1 + 1.0) / 2.0;
  return u / (n1 * n2);
}

// v -> (v - lo) / (hi - lo), clamped into [0, 1] for out-of-range inputs.
inline std::vector<double> min_max_normalize(std::span<const double> values,
                                             double lo, double hi) {
  if (!(hi > lo)) throw DegenerateRangeError("min_max_normalize: hi must exceed lo");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = clamp01((values[i] - lo) / (hi - lo));
  }
  return out;
}

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;
};

// Pearson r with a two-sided p-value from Student's t with n-2 degrees of
// freedom (numerical incomplete-beta CDF). |r| = 1 yields p = 0.
inline PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw DegenerateSampleError("pearson: need n >= 3");
  const double mx = detail::sample_mean(x);
  const double my = detail::sample_mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw DegenerateSampleError("pearson: zero variance");
  }
  PearsonResult res;
  res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::fabs(res.r) >= 1.0) {
    res.p = 0.0;
  } else {
    const double nu = static_cast<double>(n - 2);
    const double t = res.r * std::sqrt(nu / (1.0 - res.r * res.r));
    res.p = detail::student_t_two_sided(t, nu);
  }
  return res;
}

struct BoxStats {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  std::vector<double> outliers;
};

namespace detail {

// Linear-interpolation quantile of sorted data at position (n-1)*q.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

// Box-plot summary: interpolated quartiles, whiskers at the most extreme
// values within 1.5 IQR of the quartile fences, everything beyond flagged as
// an outlier.
inline BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) throw Error("box_stats: empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  BoxStats s;
  s.median = detail::quantile_sorted(sorted, 0.5);
  s.q1 = detail::quantile_sorted(sorted, 0.25);
  s.q3 = detail::quantile_sorted(sorted, 0.75);
  s.iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * s.iqr;
  const double hi_fence = s.q3 + 1.5 * s.iqr;
  s.whisker_lo = s.median;
  s.whisker_hi = s.median;
  bool found = false;
  for (double v : sorted) {
    if (v < lo_fence || v > hi_fence) {
      s.outliers.push_back(v);
      continue;
    }
    if (!found) {
      s.whisker_lo = v;
      found = true;
    }
    s.whisker_hi = v;
  }
  return s;
}

}  // namespace silver
