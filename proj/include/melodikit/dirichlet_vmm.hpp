#pragma once

#include <span>
#include <vector>

#include "melodikit/pst.hpp"

namespace melodikit {

struct DirichletParams {
  double alpha = 1.0;          // global concentration of the Dirichlet prior
  int max_depth = 100;
  std::int64_t min_count = 2;
  double ratio_threshold = 1.05;
};

// The same context tree as the VMM, smoothed by a hierarchical Dirichlet
// prior instead of gamma: each node's prior is centered on its parent's
// posterior mean, the root's on the uniform distribution. Everything is
// conjugate, so posterior means come straight from the counts.
struct DirichletVmm {
  Pst tree; // node cond = posterior mean
  double alpha = 1.0;
};

// Posterior mean of one node: (alpha * prior_mean + counts) / (alpha + N).
std::vector<double> dirichlet_posterior_mean(const std::vector<std::int64_t> &counts,
                                             const std::vector<double> &prior_mean,
                                             double alpha);

DirichletVmm build_dirichlet_vmm(const Corpus &corpus, const DirichletParams &params);

CategoricalDistribution predict_next(const DirichletVmm &model, std::span<const Symbol> context);

SymbolSequence sample_sequence(const DirichletVmm &model, int length, Rng &rng);

} // namespace melodikit
