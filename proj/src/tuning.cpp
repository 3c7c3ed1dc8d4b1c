#include "melodikit/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "melodikit/dirichlet_vmm.hpp"
#include "melodikit/errors.hpp"
#include "melodikit/parallel.hpp"
#include "melodikit/pst.hpp"

namespace melodikit {

namespace {

Corpus without_sequence(const Corpus &corpus, std::size_t skip) {
  Corpus out;
  out.alphabet_size = corpus.alphabet_size;
  out.sequences.reserve(corpus.sequences.size() - 1);
  for (std::size_t i = 0; i < corpus.sequences.size(); ++i) {
    if (i != skip) out.sequences.push_back(corpus.sequences[i]);
  }
  return out;
}

// Mean next-step log-likelihood of one held-out tune under a fitted tree.
double score_sequence(const Pst &tree, const SymbolSequence &seq) {
  double total = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    std::span<const Symbol> context(seq.steps.data(), t);
    const PstNode *node = tree.lookup(context);
    total += std::log(node->cond[seq.steps[t]]);
  }
  return total / static_cast<double>(seq.size());
}

Pst fit_tree(TreeModelKind kind, const Corpus &corpus, const TreeParams &params) {
  if (kind == TreeModelKind::Vmm) {
    PstParams p;
    p.max_depth = params.max_depth;
    p.min_count = params.min_count;
    p.ratio_threshold = params.ratio_threshold;
    Pst tree = grow_pst(corpus, p);
    smooth(tree, params.gamma_min);
    return tree;
  }
  DirichletParams p;
  p.alpha = params.alpha;
  p.max_depth = params.max_depth;
  p.min_count = params.min_count;
  p.ratio_threshold = params.ratio_threshold;
  return std::move(build_dirichlet_vmm(corpus, p).tree);
}

} // namespace

void GridSpec::validate(TreeModelKind kind) const {
  if (min_count.empty()) throw ValidationError("grid has no min_count values");
  if (ratio_threshold.empty()) throw ValidationError("grid has no ratio_threshold values");
  for (auto c : min_count) {
    if (c < 1) throw ValidationError("min_count must be >= 1");
  }
  for (auto r : ratio_threshold) {
    if (!(r >= 1.0)) throw ValidationError("ratio_threshold must be >= 1");
  }
  if (kind == TreeModelKind::Vmm) {
    if (gamma_min.empty()) throw ValidationError("grid has no gamma_min values");
    for (auto g : gamma_min) {
      if (g < 0) throw ValidationError("gamma_min must be nonnegative");
    }
  } else {
    if (alpha.empty()) throw ValidationError("grid has no alpha values");
    for (auto a : alpha) {
      if (!(a > 0)) throw ValidationError("alpha must be positive");
    }
  }
  if (max_depth < 1) throw ValidationError("max_depth must be >= 1");
}

double loo_loglik(TreeModelKind kind, const Corpus &corpus, const TreeParams &params) {
  if (corpus.sequences.size() < 2) {
    throw ValidationError("leave-one-out needs at least 2 sequences");
  }
  double total = 0.0;
  for (std::size_t fold = 0; fold < corpus.sequences.size(); ++fold) {
    Pst tree = fit_tree(kind, without_sequence(corpus, fold), params);
    total += score_sequence(tree, corpus.sequences[fold]);
  }
  return total / static_cast<double>(corpus.sequences.size());
}

TuningResult grid_search(TreeModelKind kind, const Corpus &corpus, const GridSpec &grid,
                         int threads) {
  grid.validate(kind);

  std::vector<TreeParams> points;
  const std::vector<double> &third_axis =
      kind == TreeModelKind::Vmm ? grid.gamma_min : grid.alpha;
  for (auto c : grid.min_count) {
    for (auto r : grid.ratio_threshold) {
      for (auto v : third_axis) {
        TreeParams p;
        p.max_depth = grid.max_depth;
        p.min_count = c;
        p.ratio_threshold = r;
        if (kind == TreeModelKind::Vmm) {
          p.gamma_min = v;
        } else {
          p.alpha = v;
        }
        points.push_back(p);
      }
    }
  }

  TuningResult result;
  result.kind = kind;
  result.table.resize(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    TuningRow row;
    row.params = points[i];
    row.score = loo_loglik(kind, corpus, points[i]);
    Pst full = fit_tree(kind, corpus, points[i]);
    row.tree_nodes = full.node_count();
    row.tree_depth = full.depth();
    result.table[i] = std::move(row);
  });

  // Best score; ties toward the smaller tree, then lexicographic parameters.
  auto key = [kind](const TuningRow &row) {
    const double third = kind == TreeModelKind::Vmm ? row.params.gamma_min : row.params.alpha;
    return std::make_tuple(-row.score, row.tree_nodes, row.params.min_count,
                           row.params.ratio_threshold, third);
  };
  const TuningRow *best = &result.table.front();
  for (const auto &row : result.table) {
    if (key(row) < key(*best)) best = &row;
  }
  result.best = best->params;
  return result;
}

} // namespace melodikit
