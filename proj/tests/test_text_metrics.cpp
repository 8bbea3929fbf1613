#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "silver/rng.hpp"
#include "silver/text_metrics.hpp"

using namespace silver;

namespace {

// Independent LCS oracle: enumerate every subsequence of hyp and keep the
// longest one that is also a subsequence of ref.
bool is_subsequence(const TokenList& needle, const TokenList& hay) {
  std::size_t i = 0;
  for (const auto& t : hay) {
    if (i < needle.size() && needle[i] == t) ++i;
  }
  return i == needle.size();
}

std::size_t lcs_brute_force(const TokenList& hyp, const TokenList& ref) {
  std::size_t best = 0;
  const std::size_t n = hyp.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    TokenList sub;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) sub.push_back(hyp[i]);
    }
    if (sub.size() > best && is_subsequence(sub, ref)) best = sub.size();
  }
  return best;
}

}  // namespace

TEST_CASE("tokenize whitespace mode") {
  REQUIRE(tokenize("im westen", Tokenizer::Whitespace) == TokenList{"im", "westen"});
  REQUIRE(tokenize("  IM\tWesten \n", Tokenizer::Whitespace) == TokenList{"im", "westen"});
  REQUIRE(tokenize("KRÄFTIGES Tief", Tokenizer::Whitespace) ==
          TokenList{"kräftiges", "tief"});
  REQUIRE_THROWS_AS(tokenize("  ", Tokenizer::Whitespace), EmptySentenceError);
  REQUIRE_THROWS_AS(tokenize("", Tokenizer::Whitespace), EmptySentenceError);
}

TEST_CASE("tokenize character mode") {
  REQUIRE(tokenize("ABC", Tokenizer::Character) == TokenList{"a", "b", "c"});
  REQUIRE(tokenize("a b", Tokenizer::Character) == TokenList{"a", "b"});
  // One token per Chinese character.
  REQUIRE(tokenize("女儿写", Tokenizer::Character) ==
          TokenList{"女", "儿", "写"});
  // Combining acute stays attached to its base.
  REQUIRE(tokenize("éf", Tokenizer::Character) == TokenList{"é", "f"});
}

TEST_CASE("bleu perfect match scores 1 at every order") {
  const TokenList sent{"the", "cat", "sat"};
  for (std::size_t n = 1; n <= 3; ++n) {
    auto r = bleu(sent, {sent}, n);
    REQUIRE(r.value.has_value());
    REQUIRE(*r.value == 1.0);
    REQUIRE(r.brevity_penalty == 1.0);
  }
}

TEST_CASE("bleu clipping: repeated hypothesis token") {
  // hyp 'the the the the' vs ref 'the cat': clipped count 1 of 4.
  auto r = bleu({"the", "the", "the", "the"}, {{"the", "cat"}}, 1, Smoothing::None);
  REQUIRE(r.per_order_precision[0].has_value());
  REQUIRE(*r.per_order_precision[0] == 0.25);
  // Hypothesis is longer than the reference, so no brevity penalty applies.
  REQUIRE(r.brevity_penalty == 1.0);
  REQUIRE(r.value.has_value());
  REQUIRE(*r.value == 0.25);
}

TEST_CASE("bleu undefined when an order has no hypothesis n-grams") {
  const TokenList hyp{"a", "b", "c"};
  auto r = bleu(hyp, {hyp}, 4);
  REQUIRE_FALSE(r.value.has_value());
  REQUIRE(r.per_order_precision[2].has_value());
  REQUIRE_FALSE(r.per_order_precision[3].has_value());
  // Epsilon smoothing does not resurrect it.
  auto r2 = bleu(hyp, {hyp}, 4, Smoothing::Epsilon);
  REQUIRE_FALSE(r2.value.has_value());
}

TEST_CASE("bleu brevity penalty fires for short hypotheses") {
  auto r = bleu({"the", "cat"}, {{"the", "cat", "sat"}}, 1);
  REQUIRE(r.brevity_penalty == std::exp(1.0 - 3.0 / 2.0));
  REQUIRE(r.value.has_value());
  REQUIRE(*r.value == std::exp(1.0 - 3.0 / 2.0));
}

TEST_CASE("bleu-2 hand computation with brevity penalty") {
  // p1 = 2/3, p2 = 1/2, BP = exp(1 - 5/3).
  auto r = bleu({"the", "cat", "sat"}, {{"the", "cat", "on", "the", "mat"}}, 2);
  REQUIRE(*r.per_order_precision[0] == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
  REQUIRE(*r.per_order_precision[1] == Catch::Approx(0.5).epsilon(1e-15));
  const double expected = std::exp(1.0 - 5.0 / 3.0) * std::pow((2.0 / 3.0) * 0.5, 0.5);
  REQUIRE(*r.value == Catch::Approx(expected).epsilon(1e-15));
}

TEST_CASE("bleu-2 bigram clipping with repeats") {
  // hyp 'a a a' vs ref 'a a': p1 = 2/3 (clip), p2 = 1/2 (clip), BP = 1.
  auto r = bleu({"a", "a", "a"}, {{"a", "a"}}, 2);
  REQUIRE(*r.per_order_precision[0] == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
  REQUIRE(*r.per_order_precision[1] == Catch::Approx(0.5).epsilon(1e-15));
  REQUIRE(*r.value == Catch::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("bleu clips against the best reference count") {
  // 'a' appears twice in the second reference, so both hyp 'a's count.
  auto r = bleu({"a", "a", "b"}, {{"a", "b"}, {"a", "a"}}, 1);
  REQUIRE(*r.per_order_precision[0] == 1.0);
  REQUIRE(*r.value == 1.0);
  // Reference order must not matter.
  auto swapped = bleu({"a", "a", "b"}, {{"a", "a"}, {"a", "b"}}, 1);
  REQUIRE(*swapped.value == *r.value);
}

TEST_CASE("bleu picks the closest reference length, ties to the shorter") {
  // c = 3; refs of length 2 and 5: closest is 2, no penalty.
  auto near = bleu({"x", "y", "z"}, {{"a", "b"}, {"a", "b", "c", "d", "e"}}, 1);
  REQUIRE(near.brevity_penalty == 1.0);
  // c = 3; refs of length 2 and 4 tie on distance: pick 2, still no penalty.
  auto tie = bleu({"x", "y", "z"}, {{"a", "b"}, {"a", "b", "c", "d"}}, 1);
  REQUIRE(tie.brevity_penalty == 1.0);
  // c = 3; refs of length 4 and 9: closest is 4, penalty applies.
  auto far = bleu(
      {"x", "y", "z"},
      {{"a", "b", "c", "d"}, {"a", "b", "c", "d", "e", "f", "g", "h", "i"}}, 1);
  REQUIRE(far.brevity_penalty == std::exp(1.0 - 4.0 / 3.0));
}

TEST_CASE("bleu smoothing floor") {
  auto eps = bleu({"x", "y"}, {{"a", "b"}}, 1, Smoothing::Epsilon);
  REQUIRE(*eps.per_order_precision[0] == 0.0);
  REQUIRE(*eps.value == Catch::Approx(1e-9).epsilon(1e-12));
  auto none = bleu({"x", "y"}, {{"a", "b"}}, 1, Smoothing::None);
  REQUIRE(*none.value == 0.0);
}

TEST_CASE("bleu rejects empty input") {
  REQUIRE_THROWS_AS(bleu({}, {{"a"}}, 1), EmptySentenceError);
  REQUIRE_THROWS_AS(bleu({"a"}, {}, 1), Error);
  REQUIRE_THROWS_AS(bleu({"a"}, {{}}, 1), EmptySentenceError);
}

TEST_CASE("bleu equals 1 whenever the hypothesis matches a reference") {
  Rng rng(404);
  const char* vocab[] = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 50; ++trial) {
    TokenList sent;
    const std::size_t len = 2 + rng.below(6);
    for (std::size_t i = 0; i < len; ++i) sent.push_back(vocab[rng.below(5)]);
    TokenList other;
    for (std::size_t i = 0; i < 3; ++i) other.push_back(vocab[rng.below(5)]);
    for (std::size_t n = 1; n <= len; ++n) {
      auto r = bleu(sent, {other, sent}, n);
      REQUIRE(r.value.has_value());
      REQUIRE(*r.value == 1.0);
    }
  }
}

TEST_CASE("rouge_l fixtures") {
  SECTION("identical sentences") {
    auto s = rouge_l({"a", "b", "c"}, {"a", "b", "c"});
    REQUIRE(s.precision == 1.0);
    REQUIRE(s.recall == 1.0);
    REQUIRE(s.f1 == 1.0);
  }
  SECTION("hand LCS of a transposition") {
    auto s = rouge_l({"cat", "the", "sat"}, {"the", "cat", "sat"});
    REQUIRE(s.precision == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
    REQUIRE(s.recall == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
    REQUIRE(s.f1 == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
  }
  SECTION("disjoint vocabularies") {
    auto s = rouge_l({"a", "b"}, {"x", "y"});
    REQUIRE(s.precision == 0.0);
    REQUIRE(s.recall == 0.0);
    REQUIRE(s.f1 == 0.0);
  }
  SECTION("asymmetric lengths") {
    // LCS('a b', 'a x b y') = 2: P = 1, R = 1/2, F = 2/3.
    auto s = rouge_l({"a", "b"}, {"a", "x", "b", "y"});
    REQUIRE(s.precision == 1.0);
    REQUIRE(s.recall == 0.5);
    REQUIRE(s.f1 == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
  }
}

TEST_CASE("rouge_l matches the brute-force LCS oracle") {
  Rng rng(777);
  const char* alphabet[] = {"x", "y", "z"};
  for (int trial = 0; trial < 1000; ++trial) {
    TokenList hyp, ref;
    const std::size_t hn = 1 + rng.below(8);
    const std::size_t rn = 1 + rng.below(8);
    for (std::size_t i = 0; i < hn; ++i) hyp.push_back(alphabet[rng.below(3)]);
    for (std::size_t i = 0; i < rn; ++i) ref.push_back(alphabet[rng.below(3)]);
    const auto s = rouge_l(hyp, ref);
    const double lcs = static_cast<double>(lcs_brute_force(hyp, ref));
    REQUIRE(s.precision == lcs / static_cast<double>(hyp.size()));
    REQUIRE(s.recall == lcs / static_cast<double>(ref.size()));
  }
}

TEST_CASE("greedy_match fixtures") {
  SECTION("identical basis rows") {
    Matrix m{{1.0, 0.0}, {0.0, 1.0}};
    auto s = greedy_match(m, m);
    REQUIRE(s.precision == 1.0);
    REQUIRE(s.recall == 1.0);
    REQUIRE(s.f1 == 1.0);
  }
  SECTION("mutually orthogonal token sets") {
    Matrix hyp{{1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}};
    Matrix ref{{0.0, 0.0, 1.0, 0.0}, {0.0, 0.0, 0.0, 1.0}};
    auto s = greedy_match(hyp, ref);
    REQUIRE(s.precision == 0.0);
    REQUIRE(s.recall == 0.0);
    REQUIRE(s.f1 == 0.0);
  }
  SECTION("hand cosine maxima") {
    const double inv = 1.0 / std::sqrt(2.0);
    Matrix hyp{{1.0, 0.0}, {0.0, 1.0}};
    Matrix ref{{1.0, 0.0}, {inv, inv}};
    auto s = greedy_match(hyp, ref);
    REQUIRE(s.recall == Catch::Approx((1.0 + inv) / 2.0).epsilon(1e-12));
    REQUIRE(s.recall == Catch::Approx(0.8536).margin(1e-4));
    REQUIRE(s.precision == Catch::Approx((1.0 + inv) / 2.0).epsilon(1e-12));
  }
  SECTION("idf weights shift the mean") {
    Matrix hyp{{1.0, 0.0}};
    Matrix ref{{1.0, 0.0}, {0.0, 1.0}};
    const std::vector<double> ref_idf{3.0, 1.0};
    auto s = greedy_match(hyp, ref, {}, ref_idf);
    REQUIRE(s.recall == Catch::Approx(0.75).epsilon(1e-12));  // (3*1 + 1*0) / 4
    REQUIRE(s.precision == 1.0);
  }
  SECTION("error paths") {
    Matrix a{{1.0, 0.0}};
    Matrix b{{1.0, 0.0, 0.0}};
    REQUIRE_THROWS_AS(greedy_match(a, b), DimMismatchError);
    const std::vector<double> bad_idf{1.0, 2.0};
    REQUIRE_THROWS_AS(greedy_match(a, a, bad_idf, {}), DimMismatchError);
  }
}

TEST_CASE("greedy precision of (h, r) equals greedy recall of (r, h)") {
  Rng rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t hn = 1 + rng.below(6);
    const std::size_t rn = 1 + rng.below(6);
    const std::size_t d = 2 + rng.below(8);
    Matrix hyp(hn, d), ref(rn, d);
    for (std::size_t i = 0; i < hn; ++i)
      for (std::size_t j = 0; j < d; ++j) hyp(i, j) = rng.normal();
    for (std::size_t i = 0; i < rn; ++i)
      for (std::size_t j = 0; j < d; ++j) ref(i, j) = rng.normal();
    hyp = l2_normalize_rows(hyp);
    ref = l2_normalize_rows(ref);
    const auto hr = greedy_match(hyp, ref);
    const auto rh = greedy_match(ref, hyp);
    REQUIRE(hr.precision == rh.recall);
    REQUIRE(hr.recall == rh.precision);
  }
}

TEST_CASE("token order moves bleu-2 but never greedy_match") {
  // The order-sensitivity contrast: reversing a repeated-free sentence kills
  // every bigram, while greedy matching over the same token embeddings is a
  // set operation.
  const TokenList ref{"w0", "w1", "w2", "w3"};
  const TokenList reversed{"w3", "w2", "w1", "w0"};
  auto original = bleu(ref, {ref}, 2);
  auto shuffled = bleu(reversed, {ref}, 2);
  REQUIRE(*original.value == 1.0);
  REQUIRE(*shuffled.value < 1.0);

  Matrix emb{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  std::vector<std::size_t> order{2, 0, 1};
  Matrix perm = emb.permuted_rows(order);
  const auto base = greedy_match(emb, emb);
  const auto moved = greedy_match(perm, emb);
  REQUIRE(moved.precision == base.precision);
  REQUIRE(moved.recall == base.recall);
  REQUIRE(moved.f1 == base.f1);
}
