#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gencl/io.hpp"
#include "gencl/metrics.hpp"
#include "gencl/reference.hpp"
#include "helpers.hpp"

using namespace gencl;

// ============================================================================
// A_AUC / A_last
// ============================================================================

TEST_CASE("constant accuracy yields itself") {
  metrics::MetricSeries series;
  series.eval_every = 100;
  for (size_t i = 1; i <= 6; ++i) series.points.push_back({100 * i, 0.5});
  CHECK(metrics::a_auc(series) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(metrics::a_last(series) == 0.5);
}

TEST_CASE("a linear ramp averages to (k+1)/(2k)") {
  metrics::MetricSeries series;
  series.eval_every = 10;
  const size_t k = 10;
  for (size_t i = 1; i <= k; ++i) {
    series.points.push_back({10 * i, static_cast<double>(i) / k});
  }
  CHECK(metrics::a_auc(series) == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(metrics::a_last(series) == 1.0);
}

TEST_CASE("a single point is its own area and last value") {
  metrics::MetricSeries series;
  series.eval_every = 7;
  series.points.push_back({7, 0.8});
  CHECK(metrics::a_auc(series) == doctest::Approx(0.8));
  CHECK(metrics::a_last(series) == 0.8);
}

TEST_CASE("a_auc is invariant to the evaluation interval") {
  metrics::MetricSeries narrow, wide;
  narrow.eval_every = 1;
  wide.eval_every = 50;
  for (size_t i = 1; i <= 8; ++i) {
    double accuracy = 0.1 * static_cast<double>(i);
    narrow.points.push_back({i, accuracy});
    wide.points.push_back({50 * i, accuracy});
  }
  CHECK(metrics::a_auc(narrow) == doctest::Approx(metrics::a_auc(wide)).epsilon(1e-12));
}

TEST_CASE("empty series are rejected") {
  metrics::MetricSeries empty;
  CHECK_THROWS_AS(metrics::a_auc(empty), Error);
  CHECK_THROWS_AS(metrics::a_last(empty), Error);
}

// ============================================================================
// Coverage
// ============================================================================

TEST_CASE("generated set equal to the real set covers everything") {
  Rng rng(3);
  std::vector<FeatureVector> real;
  for (int i = 0; i < 10; ++i) real.push_back({rng.next_gaussian(), rng.next_gaussian()});
  CHECK(metrics::coverage(real, real, 1) == 1.0);
}

TEST_CASE("a far-translated generated set covers nothing") {
  Rng rng(4);
  std::vector<FeatureVector> real, gen;
  for (int i = 0; i < 10; ++i) {
    real.push_back({rng.next_gaussian(), rng.next_gaussian()});
    gen.push_back({real.back()[0] + 1000.0, real.back()[1] + 1000.0});
  }
  CHECK(metrics::coverage(real, gen, 2) == 0.0);
}

TEST_CASE("8 real / 5 generated points match the exhaustive oracle exactly") {
  std::vector<FeatureVector> real{{0, 0}, {1, 0}, {0, 1}, {2, 2},
                                  {3, 1}, {1, 3}, {4, 4}, {5, 0}};
  std::vector<FeatureVector> gen{{0.5, 0.5}, {2.5, 2.0}, {10, 10}, {4.5, 3.5}, {1, 1}};
  CHECK(metrics::coverage(real, gen, 2) == reference::coverage(real, gen, 2));
}

TEST_CASE("coverage is monotone in k and in adding generated samples") {
  Rng rng(5);
  for (int instance = 0; instance < 10; ++instance) {
    std::vector<FeatureVector> real, gen;
    for (int i = 0; i < 12; ++i) {
      real.push_back({rng.next_gaussian(), rng.next_gaussian()});
    }
    for (int i = 0; i < 6; ++i) {
      gen.push_back({2.0 * rng.next_gaussian(), 2.0 * rng.next_gaussian()});
    }

    double previous = 0.0;
    for (size_t k = 1; k <= 4; ++k) {
      double value = metrics::coverage(real, gen, k);
      CHECK(value == reference::coverage(real, gen, k));
      CHECK(value >= previous);
      previous = value;
    }

    auto more = gen;
    more.push_back({rng.next_gaussian(), rng.next_gaussian()});
    CHECK(metrics::coverage(real, more, 2) >= metrics::coverage(real, gen, 2));
  }
}

TEST_CASE("coverage needs more real points than k") {
  std::vector<FeatureVector> real{{0, 0}, {1, 1}};
  CHECK_THROWS_AS(metrics::coverage(real, real, 2), Error);
}

// ============================================================================
// macro F1
// ============================================================================

TEST_CASE("all-correct predictions score one, symmetric swaps score zero") {
  std::vector<std::string> labels{"a", "b", "a", "b"};
  CHECK(metrics::macro_f1(labels, labels) == 1.0);

  std::vector<std::string> swapped{"b", "a", "b", "a"};
  CHECK(metrics::macro_f1(swapped, labels) == 0.0);
}

TEST_CASE("three-class confusion matches the hand-computed value") {
  // labels:      a a a b b c
  // predictions: a b a b c a
  // class a: tp=2 fp=1 fn=1 -> P=2/3 R=2/3 F1=2/3
  // class b: tp=1 fp=1 fn=1 -> P=1/2 R=1/2 F1=1/2
  // class c: tp=0 fp=1 fn=1 -> F1=0
  // macro = (2/3 + 1/2 + 0) / 3 = 7/18
  std::vector<std::string> labels{"a", "a", "a", "b", "b", "c"};
  std::vector<std::string> predictions{"a", "b", "a", "b", "c", "a"};
  CHECK(metrics::macro_f1(predictions, labels) ==
        doctest::Approx(7.0 / 18.0).epsilon(1e-12));
}

TEST_CASE("macro F1 is permutation-invariant over pairs") {
  std::vector<std::string> labels{"a", "a", "b", "b", "c", "c", "a"};
  std::vector<std::string> predictions{"a", "b", "b", "c", "c", "a", "a"};
  double base = metrics::macro_f1(predictions, labels);

  std::vector<size_t> order{6, 2, 4, 0, 3, 5, 1};
  std::vector<std::string> shuffled_labels, shuffled_predictions;
  for (size_t i : order) {
    shuffled_labels.push_back(labels[i]);
    shuffled_predictions.push_back(predictions[i]);
  }
  CHECK(metrics::macro_f1(shuffled_predictions, shuffled_labels) ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("length mismatch is rejected") {
  CHECK_THROWS_AS(metrics::macro_f1({"a"}, {"a", "b"}), Error);
  CHECK_THROWS_AS(metrics::macro_f1({}, {}), Error);
}

// ============================================================================
// CIDEr
// ============================================================================

TEST_CASE("tokenization lowercases, splits, and strips punctuation") {
  auto tokens = metrics::tokenize("A red Bike, going fast!").tokens;
  CHECK(tokens == std::vector<std::string>{"a", "red", "bike", "going", "fast"});
}

TEST_CASE("a candidate identical to the single reference scores 1") {
  auto sentence = metrics::tokenize("a small red bike near the wall");
  CHECK(metrics::cider(sentence, {sentence}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("disjoint vocabularies score 0") {
  auto candidate = metrics::tokenize("alpha beta gamma delta");
  auto ref = metrics::tokenize("one two three four");
  CHECK(metrics::cider(candidate, {ref}) == 0.0);
}

TEST_CASE("worked example: 'a red bike' against two references") {
  // References: "a red bike", "the red bicycle"; df over 2 refs gives
  // idf ln2 for every gram except "red" (df=2 -> 0) at n=1.
  // n=1: cos(c, ref1)=1, cos(c, ref2)=0 (the only shared gram has weight 0).
  // n=2, n=3: identical with ref1, nothing shared with ref2 -> 0.5 each.
  // n=4: both sentences are 3 tokens, zero vectors -> 0.
  // CIDEr = (0.5 + 0.5 + 0.5 + 0) / 4 = 0.375.
  auto candidate = metrics::tokenize("a red bike");
  std::vector<metrics::TokenizedSentence> refs{metrics::tokenize("a red bike"),
                                               metrics::tokenize("the red bicycle")};
  CHECK(metrics::cider(candidate, refs) == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("reference order does not matter") {
  auto candidate = metrics::tokenize("a red bike in the park");
  std::vector<metrics::TokenizedSentence> refs{
      metrics::tokenize("a red bike"), metrics::tokenize("the red bicycle"),
      metrics::tokenize("a bike in a park")};
  auto reversed = refs;
  std::reverse(reversed.begin(), reversed.end());
  CHECK(metrics::cider(candidate, refs) ==
        doctest::Approx(metrics::cider(candidate, reversed)).epsilon(1e-12));
}

TEST_CASE("cider rejects empty candidates and reference lists") {
  metrics::TokenizedSentence empty;
  auto ref = metrics::tokenize("a red bike");
  CHECK_THROWS_AS(metrics::cider(empty, {ref}), Error);
  CHECK_THROWS_AS(metrics::cider(ref, {}), Error);
}

// ============================================================================
// metrics.csv
// ============================================================================

TEST_CASE("metric series round-trip through CSV") {
  metrics::MetricSeries series;
  series.eval_every = 5;
  series.points = {{5, 0.25}, {10, 0.5}, {15, 0.875}};
  auto restored = io::metrics_from_csv(io::metrics_to_csv(series));
  CHECK(restored.points == series.points);
  CHECK(restored.eval_every == 5);

  CHECK_THROWS_AS(io::metrics_from_csv("nonsense\n1,2\n"), Error);
}
