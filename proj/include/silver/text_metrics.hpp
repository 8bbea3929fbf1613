#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "silver/errors.hpp"
#include "silver/matrix.hpp"
#include "silver/numeric.hpp"

// Back-translation baseline metrics: sentence-level BLEU with n-gram count
// clipping, ROUGE-L, and greedy embedding matching over contextual token
// embeddings.

namespace silver {

enum class Tokenizer { Whitespace, Character };
enum class Smoothing { None, Epsilon };

using TokenList = std::vector<std::string>;

namespace detail {

// Minimal UTF-8 decoding. Malformed sequences fall back to one code point per
// byte so metric computation never aborts on dirty corpus text.
inline std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t& cp) {
  const unsigned char b0 = static_cast<unsigned char>(s[pos]);
  std::size_t len = 1;
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  } else if ((b0 >> 5) == 0x6) {
    cp = b0 & 0x1F;
    len = 2;
  } else if ((b0 >> 4) == 0xE) {
    cp = b0 & 0x0F;
    len = 3;
  } else if ((b0 >> 3) == 0x1E) {
    cp = b0 & 0x07;
    len = 4;
  } else {
    cp = b0;
    return 1;
  }
  if (pos + len > s.size()) {
    cp = b0;
    return 1;
  }
  char32_t acc = cp;
  for (std::size_t k = 1; k < len; ++k) {
    const unsigned char bk = static_cast<unsigned char>(s[pos + k]);
    if ((bk >> 6) != 0x2) {
      cp = b0;
      return 1;
    }
    acc = (acc << 6) | (bk & 0x3F);
  }
  cp = acc;
  return len;
}

inline void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool is_space_cp(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 ||
         c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

// ASCII plus Latin-1 uppercase folding (covers the German corpus text).
inline char32_t lower_cp(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 0x20;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  return c;
}

// Marks that extend the preceding grapheme: common combining ranges,
// variation selectors, and emoji skin-tone modifiers.
inline bool extends_grapheme(char32_t c) {
  return (c >= 0x0300 && c <= 0x036F) || (c >= 0x1AB0 && c <= 0x1AFF) ||
         (c >= 0x1DC0 && c <= 0x1DFF) || (c >= 0x20D0 && c <= 0x20FF) ||
         (c >= 0xFE00 && c <= 0xFE0F) || (c >= 0xFE20 && c <= 0xFE2F) ||
         (c >= 0x1F3FB && c <= 0x1F3FF);
}

inline bool is_regional_indicator(char32_t c) {
  return c >= 0x1F1E6 && c <= 0x1F1FF;
}

}  // namespace detail

// Whitespace mode lowercases and splits on Unicode whitespace runs; Character
// mode lowercases and yields one token per grapheme cluster, dropping
// whitespace (so Chinese text becomes per-character tokens).
inline TokenList tokenize(std::string_view text, Tokenizer mode) {
  TokenList tokens;
  std::string current;
  bool join_next = false;       // pending ZWJ
  bool in_ri_pair = false;      // first half of a regional-indicator flag seen

  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
    join_next = false;
    in_ri_pair = false;
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp;
    pos += detail::decode_utf8(text, pos, cp);
    if (detail::is_space_cp(cp)) {
      flush();
      continue;
    }
    cp = detail::lower_cp(cp);
    if (mode == Tokenizer::Whitespace) {
      detail::encode_utf8(cp, current);
      continue;
    }
    // Character mode: decide whether this code point extends the current
    // cluster or starts a new one.
    const bool extend =
        !current.empty() &&
        (detail::extends_grapheme(cp) || cp == 0x200D || join_next ||
         (in_ri_pair && detail::is_regional_indicator(cp)));
    if (!extend) flush();
    join_next = cp == 0x200D;
    in_ri_pair = !extend && detail::is_regional_indicator(cp);
    detail::encode_utf8(cp, current);
  }
  flush();

  if (tokens.empty()) throw EmptySentenceError("no tokens after tokenization");
  return tokens;
}

// Result of sentence-level BLEU. `value` is empty exactly when some required
// n-gram order has zero hypothesis n-grams (the NaN case in off-the-shelf
// scorers); per_order_precision holds raw (unsmoothed) precisions.
struct BleuResult {
  std::optional<double> value;
  std::vector<std::optional<double>> per_order_precision;
  double brevity_penalty = 1.0;
};

namespace detail {

using NgramCounts = std::map<std::string, std::size_t>;

inline NgramCounts count_ngrams(const TokenList& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) {
      if (k) key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace detail

// Modified n-gram precision with reference clipping, geometric mean over
// orders 1..max_n, and the shorter-hypothesis brevity penalty exp(1 - r/c)
// against the closest reference length (ties to the shorter reference).
// Epsilon smoothing floors zero precisions at 1e-9 inside the mean so the
// per-sentence score stays defined.
inline BleuResult bleu(const TokenList& hyp, const std::vector<TokenList>& refs,
                       std::size_t max_n, Smoothing smoothing = Smoothing::Epsilon) {
  if (max_n < 1) throw Error("bleu: max_n must be >= 1");
  if (hyp.empty()) throw EmptySentenceError("bleu: empty hypothesis");
  if (refs.empty()) throw Error("bleu: no references");
  for (const auto& r : refs) {
    if (r.empty()) throw EmptySentenceError("bleu: empty reference");
  }

  BleuResult result;
  result.per_order_precision.resize(max_n);

  const std::size_t c = hyp.size();
  std::size_t r = refs.front().size();
  for (const auto& ref : refs) {
    const std::size_t len = ref.size();
    const auto dist = [&](std::size_t L) {
      return L > c ? L - c : c - L;
    };
    if (dist(len) < dist(r) || (dist(len) == dist(r) && len < r)) r = len;
  }
  result.brevity_penalty =
      c >= r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));

  double product = 1.0;
  bool undefined = false;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const auto hyp_counts = detail::count_ngrams(hyp, n);
    std::size_t total = c >= n ? c - n + 1 : 0;
    if (total == 0) {
      undefined = true;
      continue;
    }
    detail::NgramCounts clipped_max;
    for (const auto& ref : refs) {
      for (const auto& [key, cnt] : detail::count_ngrams(ref, n)) {
        auto& slot = clipped_max[key];
        if (cnt > slot) slot = cnt;
      }
    }
    std::size_t matched = 0;
    for (const auto& [key, cnt] : hyp_counts) {
      auto it = clipped_max.find(key);
      if (it != clipped_max.end()) matched += std::min(cnt, it->second);
    }
    const double p = static_cast<double>(matched) / static_cast<double>(total);
    result.per_order_precision[n - 1] = p;
    if (p == 0.0 && smoothing == Smoothing::Epsilon) {
      product *= 1e-9;
    } else {
      product *= p;
    }
  }
  if (!undefined) {
    result.value = result.brevity_penalty *
                   std::pow(product, 1.0 / static_cast<double>(max_n));
  }
  return result;
}

struct MatchScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline double f1_of(double p, double r) {
  const double denom = p + r;
  return denom != 0.0 ? 2.0 * p * r / denom : 0.0;
}

// ROUGE-L F1: longest common subsequence via dynamic programming.
inline MatchScore rouge_l(const TokenList& hyp, const TokenList& ref) {
  if (hyp.empty() || ref.empty()) throw EmptySentenceError("rouge_l: empty sentence");
  std::vector<std::size_t> prev(ref.size() + 1, 0), cur(ref.size() + 1, 0);
  for (std::size_t i = 1; i <= hyp.size(); ++i) {
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      cur[j] = hyp[i - 1] == ref[j - 1] ? prev[j - 1] + 1
                                        : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[ref.size()]);
  MatchScore s;
  s.precision = lcs / static_cast<double>(hyp.size());
  s.recall = lcs / static_cast<double>(ref.size());
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

namespace detail {

// Weighted mean over `from` rows of the best cosine against any `to` row.
// Rows must be unit-normalized. Order-canonical sums keep the result
// bit-stable under row permutations on either side.
inline double greedy_side(const Matrix& from, const Matrix& to,
                          std::span<const double> weights) {
  std::vector<double> best(from.rows());
  for (std::size_t i = 0; i < from.rows(); ++i) {
    double mx = -HUGE_VAL;
    for (std::size_t j = 0; j < to.rows(); ++j) {
      mx = std::max(mx, dot(from.row(i), to.row(j)));
    }
    best[i] = mx;
  }
  if (weights.empty()) return stable_mean(best);
  std::vector<double> weighted(from.rows());
  for (std::size_t i = 0; i < from.rows(); ++i) weighted[i] = weights[i] * best[i];
  return stable_sum(weighted) / stable_sum(weights);
}

}  // namespace detail

// Greedy token matching over unit-normalized embedding rows: recall averages
// each reference token's best cosine against the hypothesis (precision
// symmetric), optionally idf-weighted per token.
inline MatchScore greedy_match(const Matrix& hyp_tokens, const Matrix& ref_tokens,
                               std::span<const double> hyp_idf = {},
                               std::span<const double> ref_idf = {}) {
  if (hyp_tokens.rows() == 0 || ref_tokens.rows() == 0) {
    throw DimMismatchError("greedy_match: empty embedding matrix");
  }
  if (hyp_tokens.cols() != ref_tokens.cols()) {
    throw DimMismatchError("greedy_match: dim " + std::to_string(hyp_tokens.cols()) +
                           " != " + std::to_string(ref_tokens.cols()));
  }
  if (!hyp_idf.empty() && hyp_idf.size() != hyp_tokens.rows()) {
    throw DimMismatchError("greedy_match: hyp idf length mismatch");
  }
  if (!ref_idf.empty() && ref_idf.size() != ref_tokens.rows()) {
    throw DimMismatchError("greedy_match: ref idf length mismatch");
  }
  MatchScore s;
  s.precision = detail::greedy_side(hyp_tokens, ref_tokens, hyp_idf);
  s.recall = detail::greedy_side(ref_tokens, hyp_tokens, ref_idf);
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

}  // namespace silver
