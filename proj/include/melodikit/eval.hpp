#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "melodikit/dirichlet_vmm.hpp"
#include "melodikit/distribution.hpp"
#include "melodikit/pst.hpp"
#include "melodikit/symbols.hpp"
#include "melodikit/tcrbm.hpp"

namespace melodikit {

// Time-independent symbol frequencies pooled over the corpus; the
// prediction baseline.
CategoricalDistribution empirical_marginal(const Corpus &corpus);

// Anything that can produce tau-step-ahead predictive distributions from an
// observed context. All three models and the marginal baseline wear this.
class SequencePredictor {
public:
  virtual ~SequencePredictor() = default;
  virtual std::string name() const = 0;
  virtual std::vector<CategoricalDistribution> predict_horizon(std::span<const Symbol> context,
                                                               int horizon, Rng &rng) const = 0;
};

class MarginalPredictor final : public SequencePredictor {
public:
  explicit MarginalPredictor(CategoricalDistribution marginal, std::string name = "marginal")
      : marginal_(std::move(marginal)), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  std::vector<CategoricalDistribution> predict_horizon(std::span<const Symbol> context,
                                                       int horizon, Rng &rng) const override;

private:
  CategoricalDistribution marginal_;
  std::string name_;
};

// VMM-family predictor: exact conditional one step ahead, Monte-Carlo path
// marginalization beyond (average of exact conditionals over sampled paths
// of the intermediate steps).
class TreePredictor final : public SequencePredictor {
public:
  TreePredictor(const Pst &tree, int n_paths, std::string name)
      : tree_(&tree), n_paths_(n_paths), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  std::vector<CategoricalDistribution> predict_horizon(std::span<const Symbol> context,
                                                       int horizon, Rng &rng) const override;

private:
  const Pst *tree_;
  int n_paths_;
  std::string name_;
};

class TcrbmPredictor final : public SequencePredictor {
public:
  TcrbmPredictor(const TcrbmParams &params, PredictionProtocol protocol,
                 std::string name = "tcrbm")
      : params_(&params), protocol_(protocol), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  std::vector<CategoricalDistribution> predict_horizon(std::span<const Symbol> context,
                                                       int horizon, Rng &rng) const override;

private:
  const TcrbmParams *params_;
  PredictionProtocol protocol_;
  std::string name_;
};

// Standalone form of the TreePredictor machinery (Monte-Carlo path
// marginalization over a smoothed context tree).
std::vector<CategoricalDistribution> vmm_predictive_distribution(const Pst &tree,
                                                                 std::span<const Symbol> context,
                                                                 int horizon, int n_paths,
                                                                 Rng &rng);

struct PredictionReport {
  int tau_max = 0;
  int n_configs = 0;
  int min_context = 8;
  std::vector<std::string> models;            // parallel to curves
  std::vector<std::vector<double>> curves;    // curves[m][tau-1], mean nats
  std::vector<double> baseline;               // empirical-marginal curve
};

// The multi-step prediction protocol: draw (sequence, split point)
// configurations uniformly from the test set, query every model's
// predictive distribution for tau = 1..tau_max, and average the true
// symbol's log-probability per tau. All models score the same
// configurations.
PredictionReport prediction_loglik(
    const std::vector<const SequencePredictor *> &models, const CategoricalDistribution &baseline,
    const Corpus &testset, int tau_max, int n_configs, int min_context, std::uint64_t seed,
    int threads = 1);

struct StatisticSpec {
  enum class Kind { Order, Lag };
  Kind kind = Kind::Order;
  int value = 1; // n for order-n, l for lag-l

  std::string label() const;
  int span() const { return kind == Kind::Order ? value : value + 2; }
};

// Sparse distribution over symbol tuples (order-n windows or lag-l pairs).
struct EventDistribution {
  std::map<std::uint64_t, double> probs; // packed event -> probability
  std::int64_t window_count = 0;         // events counted before normalizing
  int arity = 1;

  static std::uint64_t pack(std::span<const Symbol> event);
};

// Normalized frequencies of the statistic's events pooled over all
// sequences; windows never cross sequence boundaries.
EventDistribution ngram_frequencies(const Corpus &corpus, const StatisticSpec &spec);

// KL(P || Q_eps) in nats, where Q_eps adds eps to every event of the union
// support and renormalizes. With eps = 0 a P-event missing from Q yields
// +infinity (returned, not thrown).
double kl_divergence(const EventDistribution &p, const EventDistribution &q, double eps);

// Additive floor used when comparing against finite model samples.
double default_kl_floor(const EventDistribution &q);

struct KlReport {
  std::vector<std::string> statistics;            // labels, e.g. "order2"
  std::vector<std::string> models;
  std::vector<std::vector<double>> mean;          // [model][statistic]
  std::vector<std::vector<double>> variance;      // [model][statistic]
  int n_resamples = 0;
};

// Bootstrapped KL of test statistics against one model's a-priori samples:
// resample whole test sequences with replacement, recompute the test-side
// frequencies each time, and report mean and variance per statistic.
std::vector<std::pair<double, double>> bootstrap_kl(const Corpus &test_corpus,
                                                    const Corpus &model_samples,
                                                    const std::vector<StatisticSpec> &specs,
                                                    int n_resamples, std::uint64_t seed,
                                                    int threads = 1);

// Same machinery with the training corpus in the model-samples role; the
// reference row for interpreting the table.
std::vector<std::pair<double, double>> train_vs_test_reference(
    const Corpus &train_corpus, const Corpus &test_corpus,
    const std::vector<StatisticSpec> &specs, int n_resamples, std::uint64_t seed,
    int threads = 1);

} // namespace melodikit
