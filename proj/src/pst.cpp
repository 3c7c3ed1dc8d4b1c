#include "melodikit/pst.hpp"

#include <algorithm>
#include <deque>

#include "melodikit/errors.hpp"

namespace melodikit {

namespace {

// A corpus position (sequence, t) where a context of interest ends and
// symbol x_t follows. Growth filters these lists down the tree, so counting
// a child costs one pass over its parent's positions.
struct Position {
  std::uint32_t seq;
  std::uint32_t t;
};

struct Candidate {
  PstNode *node = nullptr;           // owned by the growing tree
  std::vector<Position> positions;   // where this context matches
  bool qualified = false;            // passed the ratio test
};

std::vector<std::int64_t> count_next(const Corpus &corpus,
                                     const std::vector<Position> &positions, int alphabet) {
  std::vector<std::int64_t> counts(alphabet, 0);
  for (const auto &p : positions) {
    ++counts[corpus.sequences[p.seq].steps[p.t]];
  }
  return counts;
}

// max over next symbols of cond_child(k) / cond_parent(k), taken on the
// child's support. Parent counts dominate child counts pointwise, so the
// ratio is always well defined there.
double max_ratio(const PstNode &child, const PstNode &parent) {
  const std::int64_t child_total = child.total_count();
  const std::int64_t parent_total = parent.total_count();
  double best = 0.0;
  for (std::size_t k = 0; k < child.counts.size(); ++k) {
    if (child.counts[k] <= 0) continue;
    double child_p = static_cast<double>(child.counts[k]) / static_cast<double>(child_total);
    double parent_p = static_cast<double>(parent.counts[k]) / static_cast<double>(parent_total);
    best = std::max(best, child_p / parent_p);
  }
  return best;
}

// Drop subtrees that contain no qualified node.
bool prune_unqualified(PstNode *node, const std::map<PstNode *, bool> &qualified) {
  bool keep = qualified.at(node);
  for (auto it = node->children.begin(); it != node->children.end();) {
    if (prune_unqualified(it->second.get(), qualified)) {
      keep = true;
      ++it;
    } else {
      it = node->children.erase(it);
    }
  }
  return keep;
}

void count_nodes(const PstNode *node, std::size_t &n, int d, int &max_d) {
  ++n;
  max_d = std::max(max_d, d);
  for (const auto &[sym, child] : node->children) count_nodes(child.get(), n, d + 1, max_d);
}

} // namespace

std::int64_t PstNode::total_count() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::vector<double> PstNode::empirical(int alphabet) const {
  std::vector<double> p(alphabet, 0.0);
  const std::int64_t total = total_count();
  if (total == 0) {
    std::fill(p.begin(), p.end(), 1.0 / alphabet);
    return p;
  }
  for (int k = 0; k < alphabet; ++k) {
    p[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
  }
  return p;
}

const PstNode *Pst::lookup(std::span<const Symbol> context) const {
  const PstNode *node = root.get();
  std::size_t back = 0; // how far into the past we have matched
  while (back < context.size()) {
    Symbol older = context[context.size() - 1 - back];
    auto it = node->children.find(older);
    if (it == node->children.end()) break;
    node = it->second.get();
    ++back;
  }
  return node;
}

std::size_t Pst::node_count() const {
  std::size_t n = 0;
  int max_d = 0;
  count_nodes(root.get(), n, 0, max_d);
  return n;
}

int Pst::depth() const {
  std::size_t n = 0;
  int max_d = 0;
  count_nodes(root.get(), n, 0, max_d);
  return max_d;
}

Pst grow_pst(const Corpus &corpus, const PstParams &params) {
  if (corpus.sequences.empty()) throw ValidationError("cannot grow a tree from an empty corpus");
  if (params.max_depth < 1) throw ValidationError("max_depth must be >= 1");
  if (params.min_count < 1) throw ValidationError("min_count must be >= 1");
  if (!(params.ratio_threshold >= 1.0)) throw ValidationError("ratio_threshold must be >= 1");

  Pst tree;
  tree.alphabet = corpus.alphabet_size;
  tree.params = params;
  tree.root = std::make_unique<PstNode>();

  // Root: every position of every sequence. Contexts never span two tunes.
  std::vector<Position> root_positions;
  for (std::uint32_t s = 0; s < corpus.sequences.size(); ++s) {
    for (std::uint32_t t = 0; t < corpus.sequences[s].size(); ++t) {
      root_positions.push_back(Position{s, t});
    }
  }
  tree.root->counts = count_next(corpus, root_positions, tree.alphabet);

  std::map<PstNode *, bool> qualified;
  qualified[tree.root.get()] = true; // root is always kept

  std::deque<Candidate> frontier;
  frontier.push_back(Candidate{tree.root.get(), std::move(root_positions), true});

  while (!frontier.empty()) {
    Candidate parent = std::move(frontier.front());
    frontier.pop_front();
    const int depth = static_cast<int>(parent.node->context.size());
    if (depth >= params.max_depth) continue;

    // Partition the parent's positions by the symbol one step further back.
    std::map<Symbol, std::vector<Position>> extended;
    for (const auto &p : parent.positions) {
      if (p.t < static_cast<std::uint32_t>(depth) + 1) continue; // context would cross the tune start
      Symbol older = corpus.sequences[p.seq].steps[p.t - depth - 1];
      extended[older].push_back(p);
    }

    for (auto &[older, positions] : extended) {
      if (static_cast<std::int64_t>(positions.size()) < params.min_count) continue;

      auto child = std::make_unique<PstNode>();
      child->context.reserve(depth + 1);
      child->context.push_back(older);
      child->context.insert(child->context.end(), parent.node->context.begin(),
                            parent.node->context.end());
      child->counts = count_next(corpus, positions, tree.alphabet);

      Candidate cand;
      cand.node = child.get();
      cand.positions = std::move(positions);
      cand.qualified = max_ratio(*child, *parent.node) >= params.ratio_threshold;

      qualified[child.get()] = cand.qualified;
      parent.node->children[older] = std::move(child);
      frontier.push_back(std::move(cand));
    }
  }

  prune_unqualified(tree.root.get(), qualified);
  return tree;
}

void smooth(Pst &tree, double gamma_min) {
  if (gamma_min < 0) throw ValidationError("gamma_min must be nonnegative");
  tree.params.gamma_min = gamma_min;
  const int alphabet = tree.alphabet;

  std::deque<PstNode *> queue{tree.root.get()};
  while (!queue.empty()) {
    PstNode *node = queue.front();
    queue.pop_front();
    std::vector<double> p = node->empirical(alphabet);
    const double norm = 1.0 + alphabet * gamma_min;
    for (double &v : p) v = (v + gamma_min) / norm;
    node->cond = std::move(p);
    for (auto &[sym, child] : node->children) queue.push_back(child.get());
  }
}

CategoricalDistribution predict_next(const Pst &tree, std::span<const Symbol> context) {
  const PstNode *node = tree.lookup(context);
  if (node->cond.empty()) throw ValidationError("tree has no conditionals; smooth it first");
  return CategoricalDistribution(node->cond);
}

SymbolSequence sample_sequence(const Pst &tree, int length, Rng &rng) {
  if (length < 1) throw ValidationError("sample length must be >= 1");
  SymbolSequence seq;
  seq.steps.reserve(length);
  for (int t = 0; t < length; ++t) {
    const PstNode *node = tree.lookup(seq.steps);
    if (node->cond.empty()) throw ValidationError("tree has no conditionals; smooth it first");
    seq.steps.push_back(static_cast<Symbol>(rng.categorical(node->cond.data(), node->cond.size())));
  }
  return seq;
}

} // namespace melodikit
