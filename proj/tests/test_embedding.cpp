#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "silver/embedding.hpp"
#include "silver/rng.hpp"

using namespace silver;

namespace {

Matrix random_embedding(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

std::vector<std::size_t> random_order(Rng& rng, std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  return order;
}

}  // namespace

TEST_CASE("similarity_matrix computes pairwise dot products") {
  SECTION("identical unit vectors") {
    Matrix e = similarity_matrix(Matrix{{1.0, 0.0}}, Matrix{{1.0, 0.0}});
    REQUIRE(e(0, 0) == 1.0);
  }
  SECTION("orthogonal") {
    Matrix e = similarity_matrix(Matrix{{1.0, 0.0}}, Matrix{{0.0, 1.0}});
    REQUIRE(e(0, 0) == 0.0);
  }
  SECTION("hand dot products") {
    Matrix e = similarity_matrix(Matrix{{1.0, 0.0}, {0.0, 1.0}}, Matrix{{0.6, 0.8}});
    REQUIRE(e.rows() == 2);
    REQUIRE(e.cols() == 1);
    REQUIRE(e(0, 0) == Catch::Approx(0.6));
    REQUIRE(e(1, 0) == Catch::Approx(0.8));
  }
}

TEST_CASE("similarity_matrix rejects mismatched dims") {
  REQUIRE_THROWS_AS(similarity_matrix(Matrix{{1.0, 0.0}}, Matrix{{1.0, 0.0, 0.0}}),
                    DimMismatchError);
}

TEST_CASE("softmax_reweight fixtures") {
  SECTION("zero row is a fixed point with uniform weights") {
    Matrix e{{0.0, 0.0}};
    Matrix w = softmax_weights(e, Direction::VideoToText);
    REQUIRE(w(0, 0) == Catch::Approx(0.5).margin(1e-12));
    Matrix ep = softmax_reweight(e, Direction::VideoToText);
    REQUIRE(ep(0, 0) == 0.0);
    REQUIRE(ep(0, 1) == 0.0);
  }
  SECTION("symmetric row") {
    Matrix ep = softmax_reweight(Matrix{{1.0, 1.0}}, Direction::VideoToText);
    REQUIRE(ep(0, 0) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(ep(0, 1) == Catch::Approx(0.5).margin(1e-12));
  }
  SECTION("hand softmax e^2/(e^2+1)") {
    Matrix ep = softmax_reweight(Matrix{{2.0, 0.0}}, Direction::VideoToText);
    const double w0 = std::exp(2.0) / (std::exp(2.0) + 1.0);
    REQUIRE(ep(0, 0) == Catch::Approx(2.0 * w0).epsilon(1e-12));
    REQUIRE(ep(0, 0) == Catch::Approx(1.7616).margin(1e-4));
    REQUIRE(ep(0, 1) == 0.0);
  }
  SECTION("TextToVideo runs the softmax per column") {
    Matrix e{{2.0}, {0.0}};
    Matrix ep = softmax_reweight(e, Direction::TextToVideo);
    const double w0 = std::exp(2.0) / (std::exp(2.0) + 1.0);
    REQUIRE(ep(0, 0) == Catch::Approx(2.0 * w0).epsilon(1e-12));
    REQUIRE(ep(1, 0) == 0.0);
  }
}

TEST_CASE("z_similarity fixtures") {
  SECTION("all-ones matrix") {
    Matrix e(2, 3);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 3; ++j) e(i, j) = 1.0;
    Matrix ep = softmax_reweight(e, Direction::VideoToText);
    REQUIRE(z_similarity(ep, Direction::VideoToText) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("zero matrix") {
    Matrix ep = softmax_reweight(Matrix(3, 4), Direction::VideoToText);
    REQUIRE(z_similarity(ep, Direction::VideoToText) == 0.0);
  }
  SECTION("hand value from the softmax fixture") {
    Matrix e{{2.0, 0.0}, {0.0, 0.0}};
    Matrix ep = softmax_reweight(e, Direction::VideoToText);
    const double row0 = 2.0 * std::exp(2.0) / (std::exp(2.0) + 1.0);
    REQUIRE(z_similarity(ep, Direction::VideoToText) ==
            Catch::Approx(0.5 * row0).epsilon(1e-12));
    REQUIRE(z_similarity(ep, Direction::VideoToText) == Catch::Approx(0.8808).margin(1e-4));
  }
}

TEST_CASE("silver_score fixtures") {
  SECTION("self-similarity saturates the clamp") {
    auto clips = ClipEmbeddings::from(Matrix{{2.0, 0.0}});
    auto tokens = TokenEmbeddings::from(Matrix{{5.0, 0.0}});
    auto s = silver_score(clips, tokens);
    REQUIRE(s.z == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(s.scaled == 100.0);
  }
  SECTION("orthogonal vectors") {
    auto s = silver_score(ClipEmbeddings::from(Matrix{{1.0, 0.0}}),
                          TokenEmbeddings::from(Matrix{{0.0, 1.0}}));
    REQUIRE(s.z == 0.0);
    REQUIRE(s.scaled == 0.0);
  }
  SECTION("z = 0.2 maps to 70") {
    auto s = silver_score(ClipEmbeddings::from(Matrix{{1.0, 0.0}}),
                          TokenEmbeddings::from(Matrix{{0.2, std::sqrt(0.96)}}));
    REQUIRE(s.z == Catch::Approx(0.2).epsilon(1e-12));
    REQUIRE(s.scaled == Catch::Approx(70.0).epsilon(1e-12));
  }
  SECTION("propagates degenerate inputs") {
    REQUIRE_THROWS_AS(silver_score(ClipEmbeddings::from(Matrix{{0.0, 0.0}}),
                                   TokenEmbeddings::from(Matrix{{1.0, 0.0}})),
                      ZeroRowError);
    REQUIRE_THROWS_AS(silver_score(ClipEmbeddings::from(Matrix{{1.0, 0.0}}),
                                   TokenEmbeddings::from(Matrix{{1.0, 0.0, 0.0}})),
                      DimMismatchError);
  }
}

TEST_CASE("softmax weights sum to one along the chosen axis") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(8);
    const std::size_t l = 1 + rng.below(8);
    Matrix e = random_embedding(rng, m, l);
    for (Direction dir : {Direction::VideoToText, Direction::TextToVideo}) {
      Matrix w = softmax_weights(e, dir);
      if (dir == Direction::VideoToText) {
        for (std::size_t i = 0; i < m; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < l; ++j) s += w(i, j);
          REQUIRE(s == Catch::Approx(1.0).margin(1e-9));
        }
      } else {
        for (std::size_t j = 0; j < l; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < m; ++i) s += w(i, j);
          REQUIRE(s == Catch::Approx(1.0).margin(1e-9));
        }
      }
    }
  }
}

TEST_CASE("row sums of E' stay within the raw row range") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(6);
    const std::size_t l = 1 + rng.below(6);
    Matrix e = random_embedding(rng, m, l);
    Matrix ep = softmax_reweight(e, Direction::VideoToText);
    for (std::size_t i = 0; i < m; ++i) {
      double row_sum = 0.0, lo = e(i, 0), hi = e(i, 0);
      for (std::size_t j = 0; j < l; ++j) {
        row_sum += ep(i, j);
        lo = std::min(lo, e(i, j));
        hi = std::max(hi, e(i, j));
      }
      REQUIRE(row_sum >= lo - 1e-9);
      REQUIRE(row_sum <= hi + 1e-9);
    }
  }
}

TEST_CASE("silver score is bounded on random unit inputs") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(6);
    const std::size_t l = 1 + rng.below(6);
    const std::size_t d = 2 + rng.below(15);
    auto clips = ClipEmbeddings::from(random_embedding(rng, m, d));
    auto tokens = TokenEmbeddings::from(random_embedding(rng, l, d));
    auto s = silver_score(clips, tokens);
    REQUIRE(s.z >= -1.0 - 1e-9);
    REQUIRE(s.z <= 1.0 + 1e-9);
    REQUIRE(s.scaled >= 0.0);
    REQUIRE(s.scaled <= 100.0);
  }
}

TEST_CASE("permuting token rows or clip rows leaves the score bit-identical") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + rng.below(7);
    const std::size_t l = 2 + rng.below(7);
    const std::size_t d = 2 + rng.below(30);
    Matrix clips = random_embedding(rng, m, d);
    Matrix tokens = random_embedding(rng, l, d);
    const auto base = silver_score(ClipEmbeddings::from(clips), TokenEmbeddings::from(tokens));

    Matrix tokens_perm = tokens.permuted_rows(random_order(rng, l));
    const auto tp = silver_score(ClipEmbeddings::from(clips), TokenEmbeddings::from(tokens_perm));
    REQUIRE(tp.z == base.z);
    REQUIRE(tp.scaled == base.scaled);

    Matrix clips_perm = clips.permuted_rows(random_order(rng, m));
    const auto cp = silver_score(ClipEmbeddings::from(clips_perm), TokenEmbeddings::from(tokens));
    REQUIRE(cp.z == base.z);
    REQUIRE(cp.scaled == base.scaled);

    const auto t2v_base = silver_score(ClipEmbeddings::from(clips), TokenEmbeddings::from(tokens),
                                       {.direction = Direction::TextToVideo});
    const auto t2v_perm =
        silver_score(ClipEmbeddings::from(clips_perm), TokenEmbeddings::from(tokens_perm),
                     {.direction = Direction::TextToVideo});
    REQUIRE(t2v_perm.z == t2v_base.z);
  }
}

TEST_CASE("positive rescaling of raw embeddings does not change the score") {
  Rng rng(31337);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(5);
    const std::size_t l = 1 + rng.below(5);
    const std::size_t d = 2 + rng.below(20);
    Matrix clips = random_embedding(rng, m, d);
    Matrix tokens = random_embedding(rng, l, d);
    const double c = std::exp(6.0 * (rng.uniform() - 0.5));  // c in ~[0.05, 20]
    Matrix clips_scaled = clips;
    Matrix tokens_scaled = tokens;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < d; ++j) clips_scaled(i, j) *= c;
    for (std::size_t i = 0; i < l; ++i)
      for (std::size_t j = 0; j < d; ++j) tokens_scaled(i, j) *= c;
    const auto base = silver_score(ClipEmbeddings::from(clips), TokenEmbeddings::from(tokens));
    const auto scaled = silver_score(ClipEmbeddings::from(clips_scaled),
                                     TokenEmbeddings::from(tokens_scaled));
    REQUIRE(scaled.z == Catch::Approx(base.z).margin(1e-9));
    REQUIRE(scaled.scaled == Catch::Approx(base.scaled).margin(1e-9));
  }
}

TEST_CASE("self pair maximizes the 1x1 score") {
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + rng.below(10);
    Matrix v = random_embedding(rng, 1, d);
    Matrix u = random_embedding(rng, 1, d);
    const auto self = silver_score(ClipEmbeddings::from(v), TokenEmbeddings::from(v));
    const auto other = silver_score(ClipEmbeddings::from(v), TokenEmbeddings::from(u));
    REQUIRE(self.z >= other.z - 1e-12);
    REQUIRE(self.scaled >= other.scaled - 1e-9);
  }
}

TEST_CASE("temperature changes the re-weighting but not the bounds") {
  Matrix e{{1.0, -1.0}};
  Matrix hot = softmax_reweight(e, Direction::VideoToText, 10.0);
  Matrix cold = softmax_reweight(e, Direction::VideoToText, 0.1);
  // Cold temperature concentrates weight on the max entry.
  REQUIRE(cold(0, 0) > hot(0, 0));
  REQUIRE(cold(0, 0) == Catch::Approx(1.0).margin(1e-6));
  const double z_cold = z_similarity(cold, Direction::VideoToText);
  REQUIRE(z_cold >= -1.0);
  REQUIRE(z_cold <= 1.0);
}

TEST_CASE("embedding factories validate shape and finiteness") {
  REQUIRE_THROWS_AS(ClipEmbeddings::from(Matrix(0, 3)), DimMismatchError);
  Matrix bad{{1.0, std::nan("")}};
  REQUIRE_THROWS_AS(TokenEmbeddings::from(bad), DimMismatchError);
}
