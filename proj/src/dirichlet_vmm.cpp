#include "melodikit/dirichlet_vmm.hpp"

#include <deque>

#include "melodikit/errors.hpp"

namespace melodikit {

std::vector<double> dirichlet_posterior_mean(const std::vector<std::int64_t> &counts,
                                             const std::vector<double> &prior_mean,
                                             double alpha) {
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  std::vector<double> mean(counts.size());
  const double denom = alpha + static_cast<double>(total);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    mean[k] = (alpha * prior_mean[k] + static_cast<double>(counts[k])) / denom;
  }
  return mean;
}

DirichletVmm build_dirichlet_vmm(const Corpus &corpus, const DirichletParams &params) {
  if (!(params.alpha > 0)) throw ValidationError("alpha must be positive");

  PstParams growth;
  growth.max_depth = params.max_depth;
  growth.min_count = params.min_count;
  growth.ratio_threshold = params.ratio_threshold;

  DirichletVmm model;
  model.alpha = params.alpha;
  model.tree = grow_pst(corpus, growth);

  // Top-down conjugate pass: the posterior mean at each node is the prior
  // mean for its children.
  const std::vector<double> uniform(model.tree.alphabet, 1.0 / model.tree.alphabet);
  model.tree.root->cond = dirichlet_posterior_mean(model.tree.root->counts, uniform, params.alpha);

  std::deque<PstNode *> queue{model.tree.root.get()};
  while (!queue.empty()) {
    PstNode *node = queue.front();
    queue.pop_front();
    for (auto &[sym, child] : node->children) {
      child->cond = dirichlet_posterior_mean(child->counts, node->cond, params.alpha);
      queue.push_back(child.get());
    }
  }
  return model;
}

CategoricalDistribution predict_next(const DirichletVmm &model, std::span<const Symbol> context) {
  return predict_next(model.tree, context);
}

SymbolSequence sample_sequence(const DirichletVmm &model, int length, Rng &rng) {
  return sample_sequence(model.tree, length, rng);
}

} // namespace melodikit
