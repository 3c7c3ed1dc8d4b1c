#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "melodikit/symbols.hpp"

namespace melodikit {

enum class TreeModelKind { Vmm, DirichletVmm };

// One grid point of the VMM-family hyperparameters. gamma_min applies to the
// VMM, alpha to the Dirichlet-VMM; max_depth stays at the large sentinel.
struct TreeParams {
  int max_depth = 100;
  std::int64_t min_count = 2;
  double ratio_threshold = 1.05;
  double gamma_min = 0.0; // VMM only
  double alpha = 1.0;     // Dirichlet-VMM only
};

struct GridSpec {
  std::vector<std::int64_t> min_count;
  std::vector<double> ratio_threshold;
  std::vector<double> gamma_min; // VMM
  std::vector<double> alpha;     // Dirichlet-VMM
  int max_depth = 100;

  // Throws unless the lists required for the model kind are nonempty and in
  // their validity domains.
  void validate(TreeModelKind kind) const;
};

// Mean held-out next-step log-likelihood (nats) across leave-one-out folds.
double loo_loglik(TreeModelKind kind, const Corpus &corpus, const TreeParams &params);

struct TuningRow {
  TreeParams params;
  double score = 0.0;      // LOO next-step log-likelihood
  std::size_t tree_nodes = 0;
  int tree_depth = 0;
};

struct TuningResult {
  TreeModelKind kind = TreeModelKind::Vmm;
  TreeParams best;
  std::vector<TuningRow> table; // one row per grid point
};

// Exhaustive product-space search. Ties break toward the smaller tree, then
// lexicographically by (min_count, ratio_threshold, gamma|alpha), so the
// winner does not depend on grid ordering.
TuningResult grid_search(TreeModelKind kind, const Corpus &corpus, const GridSpec &grid,
                         int threads = 1);

} // namespace melodikit
