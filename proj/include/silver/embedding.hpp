#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "silver/errors.hpp"
#include "silver/matrix.hpp"
#include "silver/numeric.hpp"

// Joint-embedding similarity scoring. A sign video arrives as M clip
// embeddings, its text as L token embeddings, both D-dimensional rows of a
// shared space. The score is built in four steps: L2-normalize rows, form the
// fine-grained similarity matrix E(i,j) = S_i . W_j, re-weight it by a softmax
// over the aggregation axis, then average the weighted sums into a single
// directional similarity which is scaled onto [0, 100].

namespace silver {

enum class Direction { VideoToText, TextToVideo };

inline const char* to_string(Direction d) {
  return d == Direction::VideoToText ? "v2t" : "t2v";
}

// Clip embeddings: one row per sliding-window video clip.
struct ClipEmbeddings {
  Matrix values;

  static ClipEmbeddings from(Matrix m) {
    if (m.rows() < 1 || m.cols() < 1) {
      throw DimMismatchError("clip embeddings need at least one row and one column");
    }
    if (!m.all_finite()) throw DimMismatchError("clip embeddings contain non-finite values");
    return ClipEmbeddings{std::move(m)};
  }
  std::size_t clips() const { return values.rows(); }
  std::size_t dim() const { return values.cols(); }
};

// Token embeddings: one row per text token.
struct TokenEmbeddings {
  Matrix values;

  static TokenEmbeddings from(Matrix m) {
    if (m.rows() < 1 || m.cols() < 1) {
      throw DimMismatchError("token embeddings need at least one row and one column");
    }
    if (!m.all_finite()) throw DimMismatchError("token embeddings contain non-finite values");
    return TokenEmbeddings{std::move(m)};
  }
  std::size_t tokens() const { return values.rows(); }
  std::size_t dim() const { return values.cols(); }
};

// E(i,j) = S_i . W_j over unit-normalized rows; M x L, cosine-valued.
inline Matrix similarity_matrix(const Matrix& clips, const Matrix& tokens) {
  if (clips.cols() != tokens.cols()) {
    throw DimMismatchError("clip dim " + std::to_string(clips.cols()) +
                           " != token dim " + std::to_string(tokens.cols()));
  }
  Matrix e(clips.rows(), tokens.rows());
  for (std::size_t i = 0; i < clips.rows(); ++i) {
    for (std::size_t j = 0; j < tokens.rows(); ++j) {
      e(i, j) = dot(clips.row(i), tokens.row(j));
    }
  }
  return e;
}

// Softmax along the aggregation axis: per row for VideoToText, per column for
// TextToVideo. Sums are order-canonical so permuting rows/columns of the input
// reproduces the weights bit for bit.
inline Matrix softmax_weights(const Matrix& e, Direction direction,
                              double temperature = 1.0) {
  Matrix w(e.rows(), e.cols());
  const bool by_row = direction == Direction::VideoToText;
  const std::size_t outer = by_row ? e.rows() : e.cols();
  const std::size_t inner = by_row ? e.cols() : e.rows();
  std::vector<double> exps(inner);
  for (std::size_t a = 0; a < outer; ++a) {
    double mx = -HUGE_VAL;
    for (std::size_t b = 0; b < inner; ++b) {
      const double v = by_row ? e(a, b) : e(b, a);
      if (v > mx) mx = v;
    }
    for (std::size_t b = 0; b < inner; ++b) {
      const double v = by_row ? e(a, b) : e(b, a);
      exps[b] = std::exp((v - mx) / temperature);
    }
    const double denom = stable_sum(exps);
    for (std::size_t b = 0; b < inner; ++b) {
      if (by_row) {
        w(a, b) = exps[b] / denom;
      } else {
        w(b, a) = exps[b] / denom;
      }
    }
  }
  return w;
}

// E'(i,j) = softmax(E)(i,j) * E(i,j).
inline Matrix softmax_reweight(const Matrix& e, Direction direction,
                               double temperature = 1.0) {
  Matrix w = softmax_weights(e, direction, temperature);
  Matrix ep(e.rows(), e.cols());
  for (std::size_t i = 0; i < e.rows(); ++i)
    for (std::size_t j = 0; j < e.cols(); ++j) ep(i, j) = w(i, j) * e(i, j);
  return ep;
}

// Sum over the weighted axis, then average: Z_V2T = mean_i sum_j E'(i,j).
// Each inner sum is a convex combination of that slice of E, so Z stays inside
// [min E, max E].
inline double z_similarity(const Matrix& e_prime, Direction direction) {
  const bool by_row = direction == Direction::VideoToText;
  const std::size_t outer = by_row ? e_prime.rows() : e_prime.cols();
  const std::size_t inner = by_row ? e_prime.cols() : e_prime.rows();
  std::vector<double> slice(inner);
  std::vector<double> sums(outer);
  for (std::size_t a = 0; a < outer; ++a) {
    for (std::size_t b = 0; b < inner; ++b) {
      slice[b] = by_row ? e_prime(a, b) : e_prime(b, a);
    }
    sums[a] = stable_sum(slice);
  }
  return stable_mean(sums);
}

struct SilverScore {
  double z = 0.0;       // directional similarity in [-1, 1]
  double scaled = 0.0;  // 100 * clamp(weight * z, 0, 1)
  double weight = 3.5;
};

struct ScoreOptions {
  double weight = 3.5;
  double temperature = 1.0;
  Direction direction = Direction::VideoToText;
};

// Full pipeline on pre-normalized matrices (unit rows expected).
inline SilverScore silver_score_normalized(const Matrix& clips, const Matrix& tokens,
                                           const ScoreOptions& opts = {}) {
  const Matrix e = similarity_matrix(clips, tokens);
  const Matrix ep = softmax_reweight(e, opts.direction, opts.temperature);
  SilverScore s;
  s.z = z_similarity(ep, opts.direction);
  s.weight = opts.weight;
  s.scaled = 100.0 * clamp01(opts.weight * s.z);
  return s;
}

inline SilverScore silver_score(const ClipEmbeddings& clips, const TokenEmbeddings& tokens,
                                const ScoreOptions& opts = {}) {
  return silver_score_normalized(l2_normalize_rows(clips.values),
                                 l2_normalize_rows(tokens.values), opts);
}

}  // namespace silver
