#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace silver {

// Order-canonical summation: sorts a copy of the addends before accumulating,
// so any permutation of the same multiset produces bit-identical sums. Equal
// magnitudes tie-break on sign bit to keep -0.0/+0.0 ordering fixed.
inline double stable_sum(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end(), [](double a, double b) {
    if (a < b) return true;
    if (b < a) return false;
    return std::signbit(a) && !std::signbit(b);
  });
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

inline double stable_mean(std::span<const double> values) {
  return stable_sum(values) / static_cast<double>(values.size());
}

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// FNV-1a 64-bit, used to echo input digests in reports.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string to_hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// 4 significant digits for human tables.
inline std::string fmt_sig4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Shortest exact representation for machine formats: %.17g round-trips every
// finite double.
inline std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace silver
