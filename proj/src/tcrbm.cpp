#include "melodikit/tcrbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "melodikit/errors.hpp"
#include "melodikit/kernels/kernels.hpp"

namespace melodikit {

namespace {

namespace kn = melodikit::kernels;

void check_params(const TcrbmParams &p) {
  if (p.alphabet < 1 || p.hidden < 1 || p.filter < 1) {
    throw ValidationError("TC-RBM dimensions must be positive");
  }
  const std::size_t wsize = static_cast<std::size_t>(p.alphabet) * p.hidden * p.filter;
  if (p.w.size() != wsize || p.b.size() != static_cast<std::size_t>(p.hidden) ||
      p.c.size() != static_cast<std::size_t>(p.alphabet)) {
    throw ValidationError("TC-RBM parameter shapes are inconsistent");
  }
}

int hidden_steps_for(const TcrbmParams &p, int visible_steps) {
  if (visible_steps < p.filter) {
    throw ValidationError("sequence of " + std::to_string(visible_steps) +
                          " steps is shorter than the filter (" + std::to_string(p.filter) + ")");
  }
  return visible_steps - p.filter + 1;
}

// Weights re-laid-out for the visible pass: wt(k, j, i) contiguous over the
// alphabet, so switching one hidden unit on adds a contiguous 26-vector.
std::vector<double> visible_major_weights(const TcrbmParams &p) {
  std::vector<double> wt(p.w.size());
  for (int k = 0; k < p.filter; ++k) {
    for (int j = 0; j < p.hidden; ++j) {
      double *row = wt.data() + (static_cast<std::size_t>(k) * p.hidden + j) * p.alphabet;
      for (int i = 0; i < p.alphabet; ++i) row[i] = p.wval(i, j, k);
    }
  }
  return wt;
}

// Pre-activations of the hidden layer: column t gets b plus the weight rows
// selected by the visible symbols in its window.
void hidden_preactivation(std::span<const Symbol> v, const TcrbmParams &p, ProbMatrix &out) {
  const int th = hidden_steps_for(p, static_cast<int>(v.size()));
  out.rows = p.hidden;
  out.cols = th;
  out.data.resize(static_cast<std::size_t>(p.hidden) * th);
  for (int t = 0; t < th; ++t) {
    double *col = out.col(t);
    std::copy(p.b.begin(), p.b.end(), col);
    for (int k = 0; k < p.filter; ++k) {
      kn::axpy(1.0, p.wrow(v[t + k], k), col, p.hidden);
    }
  }
}

// Pre-activations of visible columns [col_begin, T) given a binary hidden
// configuration; earlier columns are left untouched.
void visible_preactivation(const HiddenSequence &h, const std::vector<double> &wt,
                           const TcrbmParams &p, int visible_steps, int col_begin,
                           ProbMatrix &out) {
  out.rows = p.alphabet;
  out.cols = visible_steps;
  out.data.resize(static_cast<std::size_t>(p.alphabet) * visible_steps);
  for (int t = col_begin; t < visible_steps; ++t) {
    std::copy(p.c.begin(), p.c.end(), out.col(t));
  }
  for (int u = 0; u < h.steps; ++u) {
    if (u + p.filter <= col_begin) continue; // window entirely before the range
    const std::uint8_t *hcol = h.on.data() + static_cast<std::size_t>(u) * h.units;
    for (int j = 0; j < h.units; ++j) {
      if (!hcol[j]) continue;
      const double *wrow = wt.data() + (static_cast<std::size_t>(0) * h.units + j) * p.alphabet;
      for (int k = 0; k < p.filter; ++k) {
        const int t = u + k;
        if (t < col_begin || t >= visible_steps) continue;
        kn::axpy(1.0, wrow + static_cast<std::size_t>(k) * h.units * p.alphabet, out.col(t),
                 p.alphabet);
      }
    }
  }
}

void sample_hidden(const ProbMatrix &probs, HiddenSequence &h, Rng &rng) {
  h.units = probs.rows;
  h.steps = probs.cols;
  h.on.resize(probs.data.size());
  for (std::size_t i = 0; i < probs.data.size(); ++i) {
    h.on[i] = rng.u01() < probs.data[i] ? 1 : 0;
  }
}

// Sampling state for one sequence; reused across sweeps so the weight
// transpose and buffers are built once.
struct GibbsChain {
  const TcrbmParams &params;
  std::vector<double> wt;
  std::vector<Symbol> v;
  HiddenSequence h;
  ProbMatrix hidden_pre;
  ProbMatrix visible_pre;
  int clamp = 0; // leading visible columns never resampled

  GibbsChain(const TcrbmParams &p, std::vector<Symbol> init)
      : params(p), wt(visible_major_weights(p)), v(std::move(init)) {
    hidden_steps_for(p, static_cast<int>(v.size()));
  }

  // One block sweep: H ~ P(H|V) then V ~ P(V|H) over the unclamped columns.
  void sweep(Rng &rng) {
    hidden_preactivation(v, params, hidden_pre);
    kn::sigmoid(hidden_pre.data.data(), hidden_pre.data.data(), hidden_pre.data.size());
    sample_hidden(hidden_pre, h, rng);

    const int T = static_cast<int>(v.size());
    visible_preactivation(h, wt, params, T, clamp, visible_pre);
    for (int t = clamp; t < T; ++t) {
      double *col = visible_pre.col(t);
      kn::softmax_inplace(col, params.alphabet);
      v[t] = static_cast<Symbol>(rng.categorical(col, params.alphabet));
    }
  }

  // Softmax distributions of columns [t0, T) under the current hidden state.
  void visible_distribution(int t0, ProbMatrix &out) {
    visible_preactivation(h, wt, params, static_cast<int>(v.size()), t0, out);
    for (int t = t0; t < static_cast<int>(v.size()); ++t) {
      kn::softmax_inplace(out.col(t), params.alphabet);
    }
  }
};

std::vector<Symbol> random_symbols(int n, int alphabet, Rng &rng) {
  std::vector<Symbol> v(n);
  for (auto &s : v) s = static_cast<Symbol>(rng.uniform_int(alphabet));
  return v;
}

} // namespace

TcrbmParams init_tcrbm(int hidden, int filter, int alphabet, std::uint64_t seed) {
  if (hidden < 1 || filter < 1 || alphabet < 1) {
    throw ValidationError("TC-RBM dimensions must be positive");
  }
  TcrbmParams p;
  p.alphabet = alphabet;
  p.hidden = hidden;
  p.filter = filter;
  p.w.resize(static_cast<std::size_t>(alphabet) * hidden * filter);
  p.b.assign(hidden, 0.0);
  p.c.assign(alphabet, 0.0);
  Rng rng(seed);
  for (auto &x : p.w) x = 0.01 * rng.normal();
  return p;
}

double energy(std::span<const Symbol> visible, const HiddenSequence &hidden,
              const TcrbmParams &params) {
  check_params(params);
  const int T = static_cast<int>(visible.size());
  const int th = hidden_steps_for(params, T);
  if (hidden.units != params.hidden || hidden.steps != th) {
    throw ValidationError("hidden configuration shape mismatch");
  }
  double e = 0.0;
  for (int t = 0; t < T; ++t) e += params.c[visible[t]];
  for (int t = 0; t < th; ++t) {
    for (int j = 0; j < params.hidden; ++j) {
      if (!hidden.get(j, t)) continue;
      double act = params.b[j];
      for (int k = 0; k < params.filter; ++k) act += params.wval(visible[t + k], j, k);
      e += act;
    }
  }
  return -e;
}

ProbMatrix p_hidden_given_visible(std::span<const Symbol> visible, const TcrbmParams &params) {
  check_params(params);
  ProbMatrix out;
  hidden_preactivation(visible, params, out);
  kn::sigmoid(out.data.data(), out.data.data(), out.data.size());
  return out;
}

ProbMatrix p_visible_given_hidden(const HiddenSequence &hidden, const TcrbmParams &params,
                                  int visible_steps) {
  check_params(params);
  const int th = hidden_steps_for(params, visible_steps);
  if (hidden.units != params.hidden || hidden.steps != th) {
    throw ValidationError("hidden configuration shape mismatch");
  }
  ProbMatrix out;
  const auto wt = visible_major_weights(params);
  visible_preactivation(hidden, wt, params, visible_steps, 0, out);
  for (int t = 0; t < visible_steps; ++t) {
    kn::softmax_inplace(out.col(t), params.alphabet);
  }
  return out;
}

std::pair<std::vector<Symbol>, HiddenSequence> gibbs_step(std::span<const Symbol> visible,
                                                          const TcrbmParams &params, Rng &rng) {
  check_params(params);
  GibbsChain chain(params, std::vector<Symbol>(visible.begin(), visible.end()));
  chain.sweep(rng);
  return {chain.v, chain.h};
}

CdDiagnostics cd_update(const std::vector<std::span<const Symbol>> &minibatch,
                        TcrbmParams &params, const TcrbmTrainConfig &config, double lr,
                        Rng &rng) {
  check_params(params);
  if (config.cd_k < 1) throw ValidationError("cd_k must be >= 1");
  if (minibatch.empty()) throw ValidationError("empty minibatch");

  const int A = params.alphabet;
  const int H = params.hidden;
  const int F = params.filter;

  std::vector<double> grad_w(params.w.size(), 0.0); // positive - negative
  std::vector<double> grad_b(H, 0.0);
  std::vector<double> grad_c(A, 0.0);
  std::vector<double> sw(params.w.size(), 0.0); // sparsity chain terms
  std::vector<double> sb(H, 0.0);
  std::vector<double> mean_act(H, 0.0);

  std::int64_t hidden_positions = 0;
  std::int64_t visible_positions = 0;
  double recon_ce = 0.0;

  ProbMatrix hp;
  std::vector<double> pq_col(H);

  int seq_index = 0;
  for (const auto &v : minibatch) {
    const int T = static_cast<int>(v.size());
    const int th = hidden_steps_for(params, T);
    hidden_positions += th;
    visible_positions += T;

    // Positive phase: mean-field hidden probabilities on the data.
    hidden_preactivation(v, params, hp);
    kn::sigmoid(hp.data.data(), hp.data.data(), hp.data.size());
    for (int t = 0; t < th; ++t) {
      const double *col = hp.col(t);
      for (int k = 0; k < F; ++k) {
        kn::axpy(1.0, col, grad_w.data() + (static_cast<std::size_t>(v[t + k]) * F + k) * H, H);
      }
      kn::axpy(1.0, col, grad_b.data(), H);
      kn::axpy(1.0, col, mean_act.data(), H);
      // Chain terms p(1-p) for the sparsity gradient.
      for (int j = 0; j < H; ++j) pq_col[j] = col[j] * (1.0 - col[j]);
      for (int k = 0; k < F; ++k) {
        kn::axpy(1.0, pq_col.data(), sw.data() + (static_cast<std::size_t>(v[t + k]) * F + k) * H,
                 H);
      }
      kn::axpy(1.0, pq_col.data(), sb.data(), H);
    }
    for (int t = 0; t < T; ++t) grad_c[v[t]] += 1.0;

    // Negative phase: cd_k sweeps starting at the data.
    Rng chain_rng = rng.substream(seq_index++);
    GibbsChain chain(params, std::vector<Symbol>(v.begin(), v.end()));
    for (int step = 0; step < config.cd_k; ++step) {
      chain.sweep(chain_rng);
      if (step == 0) {
        // Reconstruction cross-entropy of the data under the first sweep's
        // visible distribution (sweep leaves the softmax columns in place).
        for (int t = 0; t < T; ++t) {
          recon_ce -= std::log(std::max(chain.visible_pre.at(v[t], t), 1e-300));
        }
      }
    }
    hidden_preactivation(chain.v, params, hp);
    kn::sigmoid(hp.data.data(), hp.data.data(), hp.data.size());
    for (int t = 0; t < th; ++t) {
      const double *col = hp.col(t);
      for (int k = 0; k < F; ++k) {
        kn::axpy(-1.0, col,
                 grad_w.data() + (static_cast<std::size_t>(chain.v[t + k]) * F + k) * H, H);
      }
      kn::axpy(-1.0, col, grad_b.data(), H);
    }
    for (int t = 0; t < T; ++t) grad_c[chain.v[t]] -= 1.0;
  }

  const double inv_h = 1.0 / static_cast<double>(hidden_positions);
  const double inv_v = 1.0 / static_cast<double>(visible_positions);

  // Sparsity: quadratic penalty lambda * sum_j (q_j - target)^2 on the
  // batch-mean activation q_j, differentiated exactly through the logistic.
  std::vector<double> sparsity_scale(H);
  for (int j = 0; j < H; ++j) {
    const double q = mean_act[j] * inv_h;
    sparsity_scale[j] = 2.0 * config.sparsity_weight * (q - config.sparsity_target) * inv_h;
  }

  for (int i = 0; i < A; ++i) {
    for (int k = 0; k < F; ++k) {
      const std::size_t row = (static_cast<std::size_t>(i) * F + k) * H;
      for (int j = 0; j < H; ++j) {
        const double cd = grad_w[row + j] * inv_h;
        const double decay = config.weight_decay * params.w[row + j];
        const double sparse = sparsity_scale[j] * sw[row + j];
        params.w[row + j] += lr * (cd - decay - sparse);
      }
    }
  }
  for (int j = 0; j < H; ++j) {
    params.b[j] += lr * (grad_b[j] * inv_h - sparsity_scale[j] * sb[j]);
  }
  for (int i = 0; i < A; ++i) {
    params.c[i] += lr * grad_c[i] * inv_v;
  }

  CdDiagnostics diag;
  diag.recon_cross_entropy = recon_ce * inv_v;
  diag.mean_hidden_activity =
      std::accumulate(mean_act.begin(), mean_act.end(), 0.0) * inv_h / H;
  return diag;
}

std::vector<EpochLog> train_tcrbm(TcrbmParams &params, const Corpus &corpus,
                                  const TcrbmTrainConfig &config) {
  check_params(params);
  if (config.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (config.minibatch < 1) throw ValidationError("minibatch must be >= 1");
  if (corpus.sequences.empty()) throw ValidationError("cannot train on an empty corpus");
  for (const auto &seq : corpus.sequences) {
    if (static_cast<int>(seq.size()) < params.filter) {
      throw ValidationError("tune '" + seq.id + "' has " + std::to_string(seq.size()) +
                            " steps, shorter than the filter (" +
                            std::to_string(params.filter) + ")");
    }
  }

  const Rng root(config.seed);
  const std::size_t n = corpus.sequences.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<EpochLog> log;
  log.reserve(config.epochs);
  std::uint64_t batch_counter = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double frac = config.epochs > 1
                            ? static_cast<double>(epoch) / static_cast<double>(config.epochs - 1)
                            : 0.0;
    const double lr = config.lr0 * (1.0 - (1.0 - config.lr_final_fraction) * frac);

    Rng shuffle_rng = root.substream(1000000007ull + static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order.data(), order.size());

    double epoch_ce = 0.0;
    double epoch_act = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += config.minibatch) {
      std::vector<std::span<const Symbol>> batch;
      for (std::size_t i = start; i < std::min(n, start + config.minibatch); ++i) {
        batch.emplace_back(corpus.sequences[order[i]].steps);
      }
      Rng batch_rng = root.substream(2 + batch_counter++);
      CdDiagnostics diag = cd_update(batch, params, config, lr, batch_rng);
      epoch_ce += diag.recon_cross_entropy;
      epoch_act += diag.mean_hidden_activity;
      ++batches;
    }
    log.push_back(EpochLog{epoch, lr, epoch_ce / batches, epoch_act / batches});
  }
  return log;
}

SymbolSequence sample_free(const TcrbmParams &params, int length, int burn_in, Rng &rng) {
  check_params(params);
  if (length < params.filter) {
    throw ValidationError("sample length must be at least the filter size");
  }
  if (burn_in < 0) throw ValidationError("burn_in must be nonnegative");
  GibbsChain chain(params, random_symbols(length, params.alphabet, rng));
  for (int i = 0; i < burn_in; ++i) chain.sweep(rng);
  SymbolSequence seq;
  seq.steps = chain.v;
  return seq;
}

std::vector<CategoricalDistribution> predictive_distribution(const TcrbmParams &params,
                                                             std::span<const Symbol> context,
                                                             int horizon,
                                                             const PredictionProtocol &protocol,
                                                             Rng &rng) {
  check_params(params);
  if (horizon < 1) throw ValidationError("prediction horizon must be >= 1");
  if (context.empty()) throw ValidationError("prediction requires a nonempty context");
  const int T = static_cast<int>(context.size()) + horizon;
  if (T < params.filter) {
    throw ValidationError("context plus horizon must cover at least one filter window");
  }
  if (protocol.chains < 1 || protocol.iterations <= protocol.burn || protocol.burn < 0) {
    throw ValidationError("invalid prediction protocol");
  }

  const int t0 = static_cast<int>(context.size());
  std::vector<std::vector<double>> accum(horizon, std::vector<double>(params.alphabet, 0.0));
  ProbMatrix pv;

  for (int chain_id = 0; chain_id < protocol.chains; ++chain_id) {
    Rng chain_rng = rng.substream(chain_id);
    std::vector<Symbol> v = random_symbols(T, params.alphabet, chain_rng);
    std::copy(context.begin(), context.end(), v.begin());
    GibbsChain chain(params, std::move(v));
    chain.clamp = t0;
    for (int it = 0; it < protocol.iterations; ++it) {
      chain.sweep(chain_rng);
      if (it >= protocol.burn) {
        chain.visible_distribution(t0, pv);
        for (int s = 0; s < horizon; ++s) {
          const double *col = pv.col(t0 + s);
          for (int i = 0; i < params.alphabet; ++i) accum[s][i] += col[i];
        }
      }
    }
  }

  const double inv = 1.0 / (static_cast<double>(protocol.chains) *
                            (protocol.iterations - protocol.burn));
  std::vector<CategoricalDistribution> out;
  out.reserve(horizon);
  for (auto &col : accum) {
    for (double &x : col) x *= inv;
    out.emplace_back(std::move(col));
  }
  return out;
}

std::vector<Filter> export_filters(const TcrbmParams &params) {
  check_params(params);
  std::vector<Filter> filters;
  filters.reserve(params.hidden);
  for (int j = 0; j < params.hidden; ++j) {
    Filter f;
    f.alphabet = params.alphabet;
    f.filter = params.filter;
    f.m.resize(static_cast<std::size_t>(params.alphabet) * params.filter);
    for (int i = 0; i < params.alphabet; ++i) {
      for (int k = 0; k < params.filter; ++k) {
        f.m[static_cast<std::size_t>(i) * params.filter + k] = params.wval(i, j, k);
      }
    }
    filters.push_back(std::move(f));
  }
  return filters;
}

} // namespace melodikit
