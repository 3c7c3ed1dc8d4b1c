#pragma once

// Synthetic order-2 Markov source over a small alphabet, with its exact
// entropy rate. Used to check that the models recover known structure.

#include <cmath>
#include <vector>

#include "melodikit/rng.hpp"
#include "melodikit/symbols.hpp"

namespace melodikit::testing {

struct MarkovSource {
  int alphabet = 3;
  // kernel[prev2 * alphabet + prev1][next]
  std::vector<std::vector<double>> kernel;

  static MarkovSource strong_cycle() {
    // A noisy 3-cycle whose next step depends on the two-step history.
    MarkovSource src;
    src.alphabet = 3;
    src.kernel.assign(9, std::vector<double>(3, 0.0));
    auto row = [&](int p2, int p1, double a, double b, double c) {
      src.kernel[p2 * 3 + p1] = {a, b, c};
    };
    row(0, 0, 0.10, 0.80, 0.10);
    row(0, 1, 0.05, 0.10, 0.85);
    row(0, 2, 0.85, 0.10, 0.05);
    row(1, 0, 0.10, 0.85, 0.05);
    row(1, 1, 0.10, 0.10, 0.80);
    row(1, 2, 0.80, 0.15, 0.05);
    row(2, 0, 0.05, 0.90, 0.05);
    row(2, 1, 0.05, 0.05, 0.90);
    row(2, 2, 0.34, 0.33, 0.33);
    return src;
  }

  Corpus generate(int n_sequences, int length, std::uint64_t seed) const {
    Corpus corpus;
    corpus.alphabet_size = alphabet;
    Rng root(seed);
    for (int s = 0; s < n_sequences; ++s) {
      Rng rng = root.substream(s);
      SymbolSequence seq;
      seq.id = "markov_" + std::to_string(s);
      Symbol p2 = static_cast<Symbol>(rng.uniform_int(alphabet));
      Symbol p1 = static_cast<Symbol>(rng.uniform_int(alphabet));
      seq.steps.push_back(p2);
      seq.steps.push_back(p1);
      for (int t = 2; t < length; ++t) {
        const auto &row = kernel[p2 * alphabet + p1];
        Symbol next = static_cast<Symbol>(rng.categorical(row.data(), row.size()));
        seq.steps.push_back(next);
        p2 = p1;
        p1 = next;
      }
      corpus.sequences.push_back(std::move(seq));
    }
    return corpus;
  }

  // Entropy rate in nats: stationary distribution over (prev2, prev1) pairs
  // by power iteration, then the conditional entropy of the next symbol.
  double entropy_rate() const {
    const int states = alphabet * alphabet;
    std::vector<double> pi(states, 1.0 / states);
    std::vector<double> next(states);
    for (int iter = 0; iter < 5000; ++iter) {
      std::fill(next.begin(), next.end(), 0.0);
      for (int s = 0; s < states; ++s) {
        const int p1 = s % alphabet;
        for (int k = 0; k < alphabet; ++k) {
          next[p1 * alphabet + k] += pi[s] * kernel[s][k];
        }
      }
      pi.swap(next);
    }
    double h = 0.0;
    for (int s = 0; s < states; ++s) {
      for (int k = 0; k < alphabet; ++k) {
        const double p = kernel[s][k];
        if (p > 0) h -= pi[s] * p * std::log(p);
      }
    }
    return h;
  }
};

} // namespace melodikit::testing
