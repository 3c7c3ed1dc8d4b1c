#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "melodikit/distribution.hpp"
#include "melodikit/rng.hpp"
#include "melodikit/symbols.hpp"

namespace melodikit {

// Time-convolutional RBM over symbol sequences. Visible sequences are kept
// in symbol-index form: column t of the 1-of-m indicator matrix is exactly
// the unit steps[t], so a std::span<const Symbol> IS a visible sequence.
// Hidden units cover windows of `filter` consecutive steps (valid
// convolution), giving T - filter + 1 hidden columns for T visible steps.

// Binary hidden configuration, column-major: unit j at hidden time t is
// on[t * units + j].
struct HiddenSequence {
  int units = 0;
  int steps = 0;
  std::vector<std::uint8_t> on;

  static HiddenSequence zeros(int units, int steps) {
    return HiddenSequence{units, steps, std::vector<std::uint8_t>(
                                            static_cast<std::size_t>(units) * steps, 0)};
  }
  bool get(int j, int t) const { return on[static_cast<std::size_t>(t) * units + j] != 0; }
  void set(int j, int t, bool v) { on[static_cast<std::size_t>(t) * units + j] = v ? 1 : 0; }
};

// Column-major probability matrix (column = one time-step).
struct ProbMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  static ProbMatrix zeros(int rows, int cols) {
    return ProbMatrix{rows, cols,
                      std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0)};
  }
  double at(int r, int c) const { return data[static_cast<std::size_t>(c) * rows + r]; }
  double &at(int r, int c) { return data[static_cast<std::size_t>(c) * rows + r]; }
  double *col(int c) { return data.data() + static_cast<std::size_t>(c) * rows; }
  const double *col(int c) const { return data.data() + static_cast<std::size_t>(c) * rows; }
};

struct TcrbmParams {
  int alphabet = kAlphabetSize;
  int hidden = 0;
  int filter = 0;
  // Weight tensor, stored alphabet-major then filter offset, contiguous over
  // hidden units: w(i, j, k) = w[(i * filter + k) * hidden + j].
  std::vector<double> w;
  std::vector<double> b; // hidden biases
  std::vector<double> c; // visible biases

  double wval(int i, int j, int k) const {
    return w[(static_cast<std::size_t>(i) * filter + k) * hidden + j];
  }
  double &wref(int i, int j, int k) {
    return w[(static_cast<std::size_t>(i) * filter + k) * hidden + j];
  }
  const double *wrow(int i, int k) const {
    return w.data() + (static_cast<std::size_t>(i) * filter + k) * hidden;
  }
  double *wrow(int i, int k) {
    return w.data() + (static_cast<std::size_t>(i) * filter + k) * hidden;
  }
};

// Gaussian(0, 0.01) weights, zero biases; deterministic given seed.
TcrbmParams init_tcrbm(int hidden, int filter, int alphabet, std::uint64_t seed);

// Joint energy of a (visible, hidden) configuration. The visible bias term
// runs over all T steps, hidden terms over the T - filter + 1 hidden steps.
double energy(std::span<const Symbol> visible, const HiddenSequence &hidden,
              const TcrbmParams &params);

// P(h_{j,t} = 1 | V), logistic of the windowed input; hidden x (T-filter+1).
ProbMatrix p_hidden_given_visible(std::span<const Symbol> visible, const TcrbmParams &params);

// P(v_{i,t} = 1 | H), per-column softmax; alphabet x T. Hidden terms whose
// index falls outside the hidden range are dropped (boundary truncation).
ProbMatrix p_visible_given_hidden(const HiddenSequence &hidden, const TcrbmParams &params,
                                  int visible_steps);

// One block Gibbs sweep: H' ~ P(H|V), then V' ~ P(V|H').
std::pair<std::vector<Symbol>, HiddenSequence> gibbs_step(std::span<const Symbol> visible,
                                                          const TcrbmParams &params, Rng &rng);

struct TcrbmTrainConfig {
  int cd_k = 5;
  int epochs = 500;
  double lr0 = 0.5;
  double lr_final_fraction = 0.1; // linear decay down to lr0 * this
  double weight_decay = 2e-4;
  double sparsity_target = 0.1;
  double sparsity_weight = 1.0;
  int minibatch = 10;
  std::uint64_t seed = 0;
};

struct CdDiagnostics {
  double recon_cross_entropy = 0.0; // nats per visible step, one Gibbs step
  double mean_hidden_activity = 0.0;
};

// One CD-k update on a minibatch: mean-field positive statistics, sampled
// negative statistics after cd_k sweeps, weight decay on W, and the
// quadratic sparsity penalty pulling mean hidden activity toward the target
// (gradient applied to hidden biases and weights).
CdDiagnostics cd_update(const std::vector<std::span<const Symbol>> &minibatch,
                        TcrbmParams &params, const TcrbmTrainConfig &config, double lr,
                        Rng &rng);

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double recon_cross_entropy = 0.0;
  double mean_hidden_activity = 0.0;
};

// Full training loop: shuffled minibatches, linear learning-rate decay.
// Sequences shorter than the filter are rejected.
std::vector<EpochLog> train_tcrbm(TcrbmParams &params, const Corpus &corpus,
                                  const TcrbmTrainConfig &config);

// Free sampling: random one-hot init, burn_in Gibbs sweeps, final state.
SymbolSequence sample_free(const TcrbmParams &params, int length, int burn_in, Rng &rng);

struct PredictionProtocol {
  int chains = 100;
  int iterations = 15; // Gibbs sweeps per chain
  int burn = 10;       // discarded sweeps per chain
};

// Clamped-context predictive distributions for the next `horizon` steps:
// every chain re-clamps the context after each sweep and the retained
// hidden samples contribute P(v | H) averaged over samples and chains.
std::vector<CategoricalDistribution> predictive_distribution(const TcrbmParams &params,
                                                             std::span<const Symbol> context,
                                                             int horizon,
                                                             const PredictionProtocol &protocol,
                                                             Rng &rng);

// Per-hidden-unit weight slice, row-major alphabet x filter.
struct Filter {
  int alphabet = 0;
  int filter = 0;
  std::vector<double> m;
  double at(int i, int k) const { return m[static_cast<std::size_t>(i) * filter + k]; }
};

std::vector<Filter> export_filters(const TcrbmParams &params);

} // namespace melodikit
