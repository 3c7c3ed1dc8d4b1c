#include "melodikit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "melodikit/errors.hpp"
#include "melodikit/parallel.hpp"

namespace melodikit {

CategoricalDistribution empirical_marginal(const Corpus &corpus) {
  if (corpus.sequences.empty()) throw ValidationError("empty corpus has no marginal");
  std::vector<double> counts(corpus.alphabet_size, 0.0);
  double total = 0.0;
  for (const auto &seq : corpus.sequences) {
    for (Symbol s : seq.steps) {
      counts[s] += 1.0;
      total += 1.0;
    }
  }
  for (double &c : counts) c /= total;
  return CategoricalDistribution(std::move(counts));
}

std::vector<CategoricalDistribution> MarginalPredictor::predict_horizon(
    std::span<const Symbol> /*context*/, int horizon, Rng & /*rng*/) const {
  return std::vector<CategoricalDistribution>(horizon, marginal_);
}

std::vector<CategoricalDistribution> vmm_predictive_distribution(const Pst &tree,
                                                                 std::span<const Symbol> context,
                                                                 int horizon, int n_paths,
                                                                 Rng &rng) {
  if (horizon < 1) throw ValidationError("prediction horizon must be >= 1");
  if (n_paths < 1) throw ValidationError("n_paths must be >= 1");

  std::vector<CategoricalDistribution> out;
  out.reserve(horizon);
  // One step ahead is exact; no path average touches it.
  out.push_back(predict_next(tree, context));
  if (horizon == 1) return out;

  std::vector<std::vector<double>> accum(horizon - 1,
                                         std::vector<double>(tree.alphabet, 0.0));
  std::vector<Symbol> path(context.begin(), context.end());
  for (int s = 0; s < n_paths; ++s) {
    path.resize(context.size());
    // Extend the path one sampled step at a time; at each depth the exact
    // conditional given the sampled prefix is what gets averaged.
    Symbol first = static_cast<Symbol>(rng.categorical(out[0].probs.data(), out[0].probs.size()));
    path.push_back(first);
    for (int tau = 2; tau <= horizon; ++tau) {
      const PstNode *node = tree.lookup(path);
      const std::vector<double> &cond = node->cond;
      for (int i = 0; i < tree.alphabet; ++i) accum[tau - 2][i] += cond[i];
      if (tau < horizon) {
        path.push_back(static_cast<Symbol>(rng.categorical(cond.data(), cond.size())));
      }
    }
  }
  for (auto &col : accum) {
    for (double &x : col) x /= n_paths;
    out.emplace_back(std::move(col));
  }
  return out;
}

std::vector<CategoricalDistribution> TreePredictor::predict_horizon(
    std::span<const Symbol> context, int horizon, Rng &rng) const {
  return vmm_predictive_distribution(*tree_, context, horizon, n_paths_, rng);
}

std::vector<CategoricalDistribution> TcrbmPredictor::predict_horizon(
    std::span<const Symbol> context, int horizon, Rng &rng) const {
  return predictive_distribution(*params_, context, horizon, protocol_, rng);
}

PredictionReport prediction_loglik(
    const std::vector<const SequencePredictor *> &models, const CategoricalDistribution &baseline,
    const Corpus &testset, int tau_max, int n_configs, int min_context, std::uint64_t seed,
    int threads) {
  if (tau_max < 1) throw ValidationError("tau_max must be >= 1");
  if (n_configs < 1) throw ValidationError("n_configs must be >= 1");
  if (min_context < 1) throw ValidationError("min_context must be >= 1");

  // Valid configurations: context length t with min_context <= t and
  // t + tau_max within the sequence.
  struct Config {
    std::uint32_t seq;
    std::uint32_t split;
  };
  std::vector<Config> valid;
  for (std::uint32_t s = 0; s < testset.sequences.size(); ++s) {
    const auto len = static_cast<std::int64_t>(testset.sequences[s].size());
    for (std::int64_t t = min_context; t + tau_max <= len; ++t) {
      valid.push_back(Config{s, static_cast<std::uint32_t>(t)});
    }
  }
  if (valid.empty()) {
    throw ValidationError("no test configuration leaves room for tau_max = " +
                          std::to_string(tau_max));
  }

  Rng root(seed);
  Rng picker = root.substream(0);
  std::vector<Config> configs(n_configs);
  for (auto &cfg : configs) cfg = valid[picker.uniform_int(valid.size())];

  PredictionReport report;
  report.tau_max = tau_max;
  report.n_configs = n_configs;
  report.min_context = min_context;
  report.baseline.assign(tau_max, 0.0);

  // Per-config scores so the reduction order is fixed regardless of thread
  // count.
  std::vector<std::vector<std::vector<double>>> scores(
      models.size(), std::vector<std::vector<double>>(n_configs));

  for (std::size_t m = 0; m < models.size(); ++m) {
    report.models.push_back(models[m]->name());
    parallel_for(static_cast<std::size_t>(n_configs), threads, [&, m](std::size_t c) {
      const Config &cfg = configs[c];
      const auto &steps = testset.sequences[cfg.seq].steps;
      std::span<const Symbol> context(steps.data(), cfg.split);
      Rng rng = root.substream(1 + m * static_cast<std::size_t>(n_configs) + c);
      auto dists = models[m]->predict_horizon(context, tau_max, rng);
      std::vector<double> row(tau_max);
      for (int tau = 1; tau <= tau_max; ++tau) {
        row[tau - 1] = std::log(std::max(dists[tau - 1][steps[cfg.split + tau - 1]],
                                         std::numeric_limits<double>::min()));
      }
      scores[m][c] = std::move(row);
    });
    std::vector<double> curve(tau_max, 0.0);
    for (int c = 0; c < n_configs; ++c) {
      for (int tau = 0; tau < tau_max; ++tau) curve[tau] += scores[m][c][tau];
    }
    for (double &x : curve) x /= n_configs;
    report.curves.push_back(std::move(curve));
  }

  for (int c = 0; c < n_configs; ++c) {
    const Config &cfg = configs[c];
    const auto &steps = testset.sequences[cfg.seq].steps;
    for (int tau = 1; tau <= tau_max; ++tau) {
      report.baseline[tau - 1] +=
          std::log(std::max(baseline[steps[cfg.split + tau - 1]],
                            std::numeric_limits<double>::min()));
    }
  }
  for (double &x : report.baseline) x /= n_configs;
  return report;
}

std::string StatisticSpec::label() const {
  return (kind == Kind::Order ? "order" : "lag") + std::to_string(value);
}

std::uint64_t EventDistribution::pack(std::span<const Symbol> event) {
  std::uint64_t key = 0;
  for (Symbol s : event) key = (key << 8) | s;
  return key;
}

EventDistribution ngram_frequencies(const Corpus &corpus, const StatisticSpec &spec) {
  if (spec.value < 1) throw ValidationError("statistic order/lag must be >= 1");
  if (spec.kind == StatisticSpec::Kind::Order && spec.value > 8) {
    throw ValidationError("statistic order too large (max 8)");
  }

  EventDistribution dist;
  dist.arity = spec.kind == StatisticSpec::Kind::Order ? spec.value : 2;
  std::map<std::uint64_t, std::int64_t> counts;
  const int span = spec.span();

  for (const auto &seq : corpus.sequences) {
    if (static_cast<int>(seq.size()) < span) continue;
    const auto &steps = seq.steps;
    for (std::size_t t = 0; t + span <= steps.size(); ++t) {
      std::uint64_t key;
      if (spec.kind == StatisticSpec::Kind::Order) {
        key = EventDistribution::pack(std::span<const Symbol>(steps.data() + t, spec.value));
      } else {
        // Lag-l pairs: (d_t, d_{t+l+1}).
        const Symbol pair[2] = {steps[t], steps[t + spec.value + 1]};
        key = EventDistribution::pack(pair);
      }
      ++counts[key];
      ++dist.window_count;
    }
  }
  if (dist.window_count == 0) {
    throw ValidationError("all sequences are too short for statistic " + spec.label());
  }
  const double inv = 1.0 / static_cast<double>(dist.window_count);
  for (const auto &[key, c] : counts) dist.probs[key] = c * inv;
  return dist;
}

double default_kl_floor(const EventDistribution &q) {
  return 1.0 / (10.0 * static_cast<double>(std::max<std::int64_t>(q.window_count, 1)));
}

double kl_divergence(const EventDistribution &p, const EventDistribution &q, double eps) {
  if (eps < 0) throw ValidationError("KL floor must be nonnegative");

  // Union event space; eps mass goes to every event in it.
  std::size_t space = q.probs.size();
  for (const auto &[key, prob] : p.probs) {
    if (!q.probs.count(key)) ++space;
  }
  const double norm = 1.0 + static_cast<double>(space) * eps;

  double kl = 0.0;
  for (const auto &[key, p_i] : p.probs) {
    if (p_i <= 0.0) continue;
    auto it = q.probs.find(key);
    const double q_i = ((it != q.probs.end() ? it->second : 0.0) + eps) / norm;
    if (q_i <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p_i * std::log(p_i / q_i);
  }
  return kl;
}

namespace {

Corpus resample_sequences(const Corpus &corpus, Rng &rng) {
  Corpus out;
  out.alphabet_size = corpus.alphabet_size;
  out.sequences.reserve(corpus.sequences.size());
  for (std::size_t i = 0; i < corpus.sequences.size(); ++i) {
    out.sequences.push_back(corpus.sequences[rng.uniform_int(corpus.sequences.size())]);
  }
  return out;
}

} // namespace

std::vector<std::pair<double, double>> bootstrap_kl(const Corpus &test_corpus,
                                                    const Corpus &model_samples,
                                                    const std::vector<StatisticSpec> &specs,
                                                    int n_resamples, std::uint64_t seed,
                                                    int threads) {
  if (n_resamples < 1) throw ValidationError("n_resamples must be >= 1");
  if (test_corpus.sequences.empty()) throw ValidationError("empty test corpus");

  // Model-side frequencies are fixed across resamples.
  std::vector<EventDistribution> q;
  q.reserve(specs.size());
  for (const auto &spec : specs) q.push_back(ngram_frequencies(model_samples, spec));

  Rng root(seed);
  std::vector<std::vector<double>> kl(specs.size(), std::vector<double>(n_resamples, 0.0));
  parallel_for(static_cast<std::size_t>(n_resamples), threads, [&](std::size_t r) {
    Rng rng = root.substream(r);
    Corpus resample = resample_sequences(test_corpus, rng);
    for (std::size_t s = 0; s < specs.size(); ++s) {
      EventDistribution p = ngram_frequencies(resample, specs[s]);
      kl[s][r] = kl_divergence(p, q[s], default_kl_floor(q[s]));
    }
  });

  std::vector<std::pair<double, double>> out;
  out.reserve(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    double mean = 0.0;
    for (double x : kl[s]) mean += x;
    mean /= n_resamples;
    double var = 0.0;
    for (double x : kl[s]) var += (x - mean) * (x - mean);
    var = n_resamples > 1 ? var / (n_resamples - 1) : 0.0;
    out.emplace_back(mean, var);
  }
  return out;
}

std::vector<std::pair<double, double>> train_vs_test_reference(
    const Corpus &train_corpus, const Corpus &test_corpus,
    const std::vector<StatisticSpec> &specs, int n_resamples, std::uint64_t seed, int threads) {
  return bootstrap_kl(test_corpus, train_corpus, specs, n_resamples, seed, threads);
}

} // namespace melodikit
