#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "melodikit/errors.hpp"
#include "melodikit/pst.hpp"

using namespace melodikit;

namespace {

Corpus toy_corpus(std::vector<std::vector<Symbol>> seqs, int alphabet) {
  Corpus corpus;
  corpus.alphabet_size = alphabet;
  int i = 0;
  for (auto &s : seqs) {
    corpus.sequences.push_back(SymbolSequence{"t" + std::to_string(i++), std::move(s)});
  }
  return corpus;
}

// Brute-force oracle: next-symbol counts for a context by direct substring
// scanning, independent of the tree code.
std::vector<std::int64_t> brute_counts(const Corpus &corpus, const std::vector<Symbol> &context) {
  std::vector<std::int64_t> counts(corpus.alphabet_size, 0);
  const std::size_t m = context.size();
  for (const auto &seq : corpus.sequences) {
    for (std::size_t t = m; t < seq.size(); ++t) {
      bool match = true;
      for (std::size_t d = 0; d < m; ++d) {
        if (seq.steps[t - m + d] != context[d]) {
          match = false;
          break;
        }
      }
      if (match) ++counts[seq.steps[t]];
    }
  }
  return counts;
}

void collect_contexts(const PstNode *node, std::map<std::vector<Symbol>, const PstNode *> &out) {
  out[node->context] = node;
  for (const auto &[sym, child] : node->children) collect_contexts(child.get(), out);
}

Corpus random_corpus(int alphabet, int n_seqs, int max_len, Rng &rng) {
  Corpus corpus;
  corpus.alphabet_size = alphabet;
  for (int s = 0; s < n_seqs; ++s) {
    SymbolSequence seq;
    seq.id = "r" + std::to_string(s);
    const int len = 5 + static_cast<int>(rng.uniform_int(max_len - 5));
    for (int t = 0; t < len; ++t) {
      seq.steps.push_back(static_cast<Symbol>(rng.uniform_int(alphabet)));
    }
    corpus.sequences.push_back(std::move(seq));
  }
  return corpus;
}

} // namespace

TEST_CASE("grow_pst on ABAB finds exactly the informative contexts") {
  // Symbols: A = 0, B = 1.
  Corpus corpus = toy_corpus({{0, 1, 0, 1}}, 2);
  PstParams params;
  params.max_depth = 2;
  params.min_count = 1;
  params.ratio_threshold = 1.0 + 1e-12; // the spec's eps = 1 boundary
  Pst tree = grow_pst(corpus, params);

  std::map<std::vector<Symbol>, const PstNode *> contexts;
  collect_contexts(tree.root.get(), contexts);
  REQUIRE(contexts.size() == 5);
  CHECK(contexts.count({}));
  CHECK(contexts.count({0}));
  CHECK(contexts.count({1}));
  CHECK(contexts.count({0, 1})); // "AB": next is A
  CHECK(contexts.count({1, 0})); // "BA": next is B

  CHECK(contexts[{}]->counts == std::vector<std::int64_t>{2, 2});
  CHECK(contexts[{0}]->counts == std::vector<std::int64_t>{0, 2});
  CHECK(contexts[{1}]->counts == std::vector<std::int64_t>{1, 0});
  CHECK(contexts[{0, 1}]->counts == std::vector<std::int64_t>{1, 0});
  CHECK(contexts[{1, 0}]->counts == std::vector<std::int64_t>{0, 1});
}

TEST_CASE("an unreachable ratio threshold leaves only the root") {
  Corpus corpus = toy_corpus({{0, 1, 0, 1, 0, 1}}, 2);
  PstParams params;
  params.max_depth = 3;
  params.min_count = 1;
  params.ratio_threshold = 1e18;
  Pst tree = grow_pst(corpus, params);
  CHECK(tree.node_count() == 1);
  CHECK(tree.depth() == 0);
}

TEST_CASE("grow_pst counts equal brute-force substring counting") {
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    Corpus corpus = random_corpus(3, 3, 70, rng);
    PstParams params;
    params.max_depth = 4;
    params.min_count = 1 + static_cast<int>(rng.uniform_int(3));
    params.ratio_threshold = 1.0 + 0.1 * rng.u01();
    Pst tree = grow_pst(corpus, params);

    std::map<std::vector<Symbol>, const PstNode *> contexts;
    collect_contexts(tree.root.get(), contexts);
    for (const auto &[context, node] : contexts) {
      const auto expect = brute_counts(corpus, context);
      CHECK(node->counts == expect);
      std::int64_t total = 0;
      for (auto c : expect) total += c;
      if (!context.empty()) CHECK(total >= params.min_count);
      // Suffix-closedness: the parent context (one symbol less past) exists.
      if (!context.empty()) {
        std::vector<Symbol> parent(context.begin() + 1, context.end());
        CHECK(contexts.count(parent));
      }
    }
  }
}

TEST_CASE("smoothing adds gamma mass and renormalizes") {
  Corpus corpus = toy_corpus({{0, 0, 0, 0}}, kAlphabetSize);
  PstParams params;
  params.min_count = 1;
  Pst tree = grow_pst(corpus, params);

  SUBCASE("gamma = 0 keeps the empirical conditionals") {
    smooth(tree, 0.0);
    CHECK(tree.root->cond[0] == 1.0);
    CHECK(tree.root->cond[1] == 0.0);
  }

  SUBCASE("one-hot empirical with gamma = 1 gives (2/27, 1/27, ...)") {
    smooth(tree, 1.0);
    CHECK(tree.root->cond[0] == doctest::Approx(2.0 / 27.0).epsilon(1e-15));
    for (int k = 1; k < kAlphabetSize; ++k) {
      CHECK(tree.root->cond[k] == doctest::Approx(1.0 / 27.0).epsilon(1e-15));
    }
  }

  SUBCASE("an all-zero-count node smooths to uniform") {
    Pst bare;
    bare.alphabet = kAlphabetSize;
    bare.root = std::make_unique<PstNode>();
    bare.root->counts.assign(kAlphabetSize, 0);
    smooth(bare, 1.0);
    for (double p : bare.root->cond) {
      CHECK(p == doctest::Approx(1.0 / kAlphabetSize).epsilon(1e-15));
    }
  }

  SUBCASE("negative gamma is rejected") {
    CHECK_THROWS_AS(smooth(tree, -0.1), ValidationError);
  }
}

TEST_CASE("smoothed conditionals are positive, floored and normalized") {
  Rng rng(3);
  Corpus corpus = random_corpus(kAlphabetSize, 4, 60, rng);
  PstParams params;
  params.min_count = 1;
  params.max_depth = 3;
  Pst tree = grow_pst(corpus, params);
  const double gamma = 0.05;
  smooth(tree, gamma);

  std::map<std::vector<Symbol>, const PstNode *> contexts;
  collect_contexts(tree.root.get(), contexts);
  const double floor = gamma / (1.0 + kAlphabetSize * gamma);
  for (const auto &[context, node] : contexts) {
    double sum = 0.0;
    for (double p : node->cond) {
      CHECK(p >= floor - 1e-15);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("lookup walks to the deepest stored suffix") {
  // Alphabet 4 so the query can contain symbols outside stored contexts.
  Corpus corpus = toy_corpus({{0, 1, 0, 1, 0, 1, 0, 1}}, 4);
  PstParams params;
  params.max_depth = 2;
  params.min_count = 1;
  Pst tree = grow_pst(corpus, params);
  smooth(tree, 0.0);

  SUBCASE("empty context hits the root") {
    CHECK(tree.lookup({}) == tree.root.get());
  }

  SUBCASE("unmatched past stops at the matched suffix") {
    // Query "X Y A B" with X=2, Y=3: deepest stored suffix is "AB".
    std::vector<Symbol> q = {2, 3, 0, 1};
    const PstNode *node = tree.lookup(q);
    CHECK(node->context == std::vector<Symbol>{0, 1});
  }

  SUBCASE("exact leaf context hits that leaf") {
    std::vector<Symbol> q = {1, 0};
    CHECK(tree.lookup(q)->context == q);
  }

  SUBCASE("lookup depth never exceeds the query length") {
    std::vector<Symbol> q = {1};
    CHECK(tree.lookup(q)->context.size() <= 1);
  }
}

TEST_CASE("predict_next returns the deepest conditional") {
  Corpus corpus = toy_corpus({{0, 1, 0, 1, 0, 1}}, 2);
  PstParams params;
  params.max_depth = 2;
  params.min_count = 1;
  Pst tree = grow_pst(corpus, params);
  smooth(tree, 0.0);

  // Context "A" predicts B deterministically.
  auto dist = predict_next(tree, std::vector<Symbol>{0});
  CHECK(dist[1] == 1.0);

  // Deterministic next step scores zero nats.
  CHECK(std::log(dist[1]) == 0.0);
}

TEST_CASE("sampling is seed-deterministic and matches the root unigram") {
  Corpus corpus = toy_corpus({{0, 1, 0, 0, 1, 0, 2, 0, 1, 0, 0, 2}}, 3);
  PstParams params;
  params.min_count = 1;
  params.ratio_threshold = 1e18; // root-only
  Pst tree = grow_pst(corpus, params);
  smooth(tree, 0.1);

  Rng a(99), b(99);
  auto s1 = sample_sequence(tree, 50, a);
  auto s2 = sample_sequence(tree, 50, b);
  CHECK(s1.steps == s2.steps);

  Rng c(7);
  auto big = sample_sequence(tree, 100000, c);
  std::vector<double> freq(3, 0.0);
  for (Symbol s : big.steps) freq[s] += 1.0;
  for (auto &f : freq) f /= big.size();
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(freq[k] - tree.root->cond[k]) < 0.01);
  }

  CHECK_THROWS_AS(sample_sequence(tree, 0, c), ValidationError);
}

TEST_CASE("deterministic corpus reproduces its cycle at gamma zero") {
  Corpus corpus = toy_corpus({{0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2}}, 3);
  PstParams params;
  params.min_count = 1;
  params.max_depth = 3;
  Pst tree = grow_pst(corpus, params);
  smooth(tree, 0.0);
  Rng rng(1);
  auto seq = sample_sequence(tree, 30, rng);
  // After the unigram-sampled first step the cycle locks in.
  for (std::size_t t = 1; t < seq.size(); ++t) {
    CHECK(seq.steps[t] == (seq.steps[t - 1] + 1) % 3);
  }
}

TEST_CASE("grow_pst validates its inputs") {
  CHECK_THROWS_AS(grow_pst(Corpus{}, PstParams{}), ValidationError);
  Corpus corpus = toy_corpus({{0, 1}}, 2);
  PstParams bad;
  bad.min_count = 0;
  CHECK_THROWS_AS(grow_pst(corpus, bad), ValidationError);
  bad = PstParams{};
  bad.ratio_threshold = 1.0;
  CHECK_THROWS_AS(grow_pst(corpus, bad), ValidationError);
}
