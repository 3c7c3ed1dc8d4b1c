#pragma once

// Exact enumeration oracle for small TC-RBMs: partition function, marginals,
// conditionals and the exact log-likelihood gradient, all by brute force
// over every (visible, hidden) configuration. Test-only; independent of the
// sampling and training code paths it checks.

#include <cmath>
#include <cstdint>
#include <vector>

#include "melodikit/tcrbm.hpp"

namespace melodikit::testing {

class TinyRbmOracle {
public:
  TinyRbmOracle(const TcrbmParams &params, int visible_steps)
      : p_(params), T_(visible_steps), th_(visible_steps - params.filter + 1) {
    n_visible_ = 1;
    for (int t = 0; t < T_; ++t) n_visible_ *= p_.alphabet;
    n_hidden_ = std::size_t(1) << (static_cast<std::size_t>(p_.hidden) * th_);

    joint_.resize(n_visible_, std::vector<double>(n_hidden_));
    pv_.assign(n_visible_, 0.0);
    z_ = 0.0;
    for (std::size_t vi = 0; vi < n_visible_; ++vi) {
      const auto v = visible_of(vi);
      for (std::size_t hi = 0; hi < n_hidden_; ++hi) {
        const double w = std::exp(-energy(v, hidden_of(hi), p_));
        joint_[vi][hi] = w;
        pv_[vi] += w;
        z_ += w;
      }
    }
  }

  int visible_steps() const { return T_; }
  std::size_t n_visible_states() const { return n_visible_; }
  std::size_t n_hidden_states() const { return n_hidden_; }
  double partition() const { return z_; }

  std::vector<Symbol> visible_of(std::size_t idx) const {
    std::vector<Symbol> v(T_);
    for (int t = 0; t < T_; ++t) {
      v[t] = static_cast<Symbol>(idx % p_.alphabet);
      idx /= p_.alphabet;
    }
    return v;
  }

  std::size_t index_of(std::span<const Symbol> v) const {
    std::size_t idx = 0;
    for (int t = T_ - 1; t >= 0; --t) idx = idx * p_.alphabet + v[t];
    return idx;
  }

  HiddenSequence hidden_of(std::size_t mask) const {
    HiddenSequence h = HiddenSequence::zeros(p_.hidden, th_);
    for (std::size_t bit = 0; bit < h.on.size(); ++bit) {
      h.on[bit] = (mask >> bit) & 1;
    }
    return h;
  }

  double prob_visible(std::size_t vi) const { return pv_[vi] / z_; }

  double total_probability() const {
    double s = 0.0;
    for (std::size_t vi = 0; vi < n_visible_; ++vi) s += pv_[vi];
    return s / z_;
  }

  // Exact P(h_{j,t} = 1 | V).
  double cond_hidden(std::span<const Symbol> v, int j, int t) const {
    const std::size_t vi = index_of(v);
    double on = 0.0;
    const std::size_t bit = static_cast<std::size_t>(t) * p_.hidden + j;
    for (std::size_t hi = 0; hi < n_hidden_; ++hi) {
      if ((hi >> bit) & 1) on += joint_[vi][hi];
    }
    return on / pv_[vi];
  }

  // Exact P(v_{t} = i | v_{0..ctx-1}) for each future step t in
  // [ctx, ctx+horizon) and symbol i.
  std::vector<std::vector<double>> clamped_conditional(std::span<const Symbol> context,
                                                       int horizon) const {
    std::vector<std::vector<double>> out(horizon, std::vector<double>(p_.alphabet, 0.0));
    double mass = 0.0;
    for (std::size_t vi = 0; vi < n_visible_; ++vi) {
      const auto v = visible_of(vi);
      bool match = true;
      for (std::size_t t = 0; t < context.size(); ++t) {
        if (v[t] != context[t]) {
          match = false;
          break;
        }
      }
      if (!match) continue;
      mass += pv_[vi];
      for (int s = 0; s < horizon; ++s) out[s][v[context.size() + s]] += pv_[vi];
    }
    for (auto &col : out) {
      for (double &x : col) x /= mass;
    }
    return out;
  }

  // Sufficient statistics (-dE/dtheta) of one joint configuration, laid out
  // like TcrbmParams storage (w flat, then b, then c).
  std::vector<double> stats(std::span<const Symbol> v, const HiddenSequence &h) const {
    std::vector<double> s(p_.w.size() + p_.b.size() + p_.c.size(), 0.0);
    for (int t = 0; t < th_; ++t) {
      for (int j = 0; j < p_.hidden; ++j) {
        if (!h.get(j, t)) continue;
        s[p_.w.size() + j] += 1.0;
        for (int k = 0; k < p_.filter; ++k) {
          s[(static_cast<std::size_t>(v[t + k]) * p_.filter + k) * p_.hidden + j] += 1.0;
        }
      }
    }
    for (int t = 0; t < T_; ++t) s[p_.w.size() + p_.b.size() + v[t]] += 1.0;
    return s;
  }

  double loglik(const std::vector<std::vector<Symbol>> &data) const {
    double ll = 0.0;
    for (const auto &v : data) ll += std::log(prob_visible(index_of(v)));
    return ll;
  }

  // Exact gradient of the data log-likelihood, in parameter storage order.
  std::vector<double> exact_gradient(const std::vector<std::vector<Symbol>> &data) const {
    const std::size_t dim = p_.w.size() + p_.b.size() + p_.c.size();
    std::vector<double> grad(dim, 0.0);

    // Model expectation E_{V,H}[stats].
    std::vector<double> model_exp(dim, 0.0);
    for (std::size_t vi = 0; vi < n_visible_; ++vi) {
      const auto v = visible_of(vi);
      for (std::size_t hi = 0; hi < n_hidden_; ++hi) {
        const auto s = stats(v, hidden_of(hi));
        const double w = joint_[vi][hi] / z_;
        for (std::size_t d = 0; d < dim; ++d) model_exp[d] += w * s[d];
      }
    }

    for (const auto &v : data) {
      const std::size_t vi = index_of(v);
      for (std::size_t hi = 0; hi < n_hidden_; ++hi) {
        const auto s = stats(v, hidden_of(hi));
        const double w = joint_[vi][hi] / pv_[vi]; // P(H|V)
        for (std::size_t d = 0; d < dim; ++d) grad[d] += w * s[d];
      }
      for (std::size_t d = 0; d < dim; ++d) grad[d] -= model_exp[d];
    }
    return grad;
  }

private:
  TcrbmParams p_;
  int T_;
  int th_;
  std::size_t n_visible_ = 0;
  std::size_t n_hidden_ = 0;
  double z_ = 0.0;
  std::vector<std::vector<double>> joint_; // exp(-E) per (visible, hidden)
  std::vector<double> pv_;                 // sum over hidden of exp(-E)
};

} // namespace melodikit::testing
