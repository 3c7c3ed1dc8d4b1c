#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "melodikit/distribution.hpp"
#include "melodikit/rng.hpp"
#include "melodikit/symbols.hpp"

namespace melodikit {

struct PstParams {
  int max_depth = 100;         // L; effectively unbounded at 100
  std::int64_t min_count = 2;  // c_min
  double ratio_threshold = 1.05; // eps_min, > 1
  double gamma_min = 0.0;      // additive smoothing mass per symbol
};

// One context of the tree. The context reads oldest-first, so "BA" means
// x_{t-2}=B, x_{t-1}=A; a child extends its parent's context by one symbol
// further into the past, keyed by that older symbol.
struct PstNode {
  std::vector<Symbol> context;
  std::vector<std::int64_t> counts; // next-symbol counts after this context
  std::vector<double> cond;         // conditional over the next symbol; filled
                                    // by smoothing (VMM) or the posterior pass
                                    // (Dirichlet-VMM)
  std::map<Symbol, std::unique_ptr<PstNode>> children;

  std::int64_t total_count() const;
  // Empirical next-symbol frequencies; uniform for an unobserved context.
  std::vector<double> empirical(int alphabet) const;
};

struct Pst {
  std::unique_ptr<PstNode> root;
  int alphabet = kAlphabetSize;
  PstParams params;

  // Deepest stored node whose context is a suffix of the query. The root
  // matches everything, so this never fails.
  const PstNode *lookup(std::span<const Symbol> context) const;

  std::size_t node_count() const;
  int depth() const;
};

// Breadth-first growth. A candidate context enters the tree iff its length
// is at most max_depth, it occurs at least min_count times in the corpus,
// and some next-symbol probability beats its parent's by ratio_threshold.
// Candidates that fail the count test prune their whole subtree; candidates
// that fail only the ratio test stay explorable and are kept in the final
// tree when a descendant qualifies (suffix-closedness).
Pst grow_pst(const Corpus &corpus, const PstParams &params);

// Fill every node's cond with (empirical + gamma) / (1 + alphabet * gamma).
void smooth(Pst &tree, double gamma_min);

// Conditional distribution of the next symbol after the given context.
CategoricalDistribution predict_next(const Pst &tree, std::span<const Symbol> context);

// Ancestral sampling from the tree's conditionals.
SymbolSequence sample_sequence(const Pst &tree, int length, Rng &rng);

} // namespace melodikit
