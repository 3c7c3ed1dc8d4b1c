#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace melodikit {

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  bool deterministic = true; // fixed reduction order (always on; recorded)
  std::string kernels = "auto";
};

struct IngestConfig {
  std::vector<std::string> paths;
  std::string manifest;
  std::optional<double> ticks_per_eighth;
  std::string out;
};

struct TrainCmdConfig {
  std::string corpus;
  std::string model; // vmm | dvmm | tcrbm
  std::string out;
  std::string log_out;     // training-log CSV (defaults to <out>.log.csv)
  std::string params_file; // chosen-parameters JSON from the tune command

  std::int64_t c_min = 2;
  double eps_min = 1.05;
  double gamma_min = 0.01;
  double alpha = 1.0;
  int max_depth = 100;

  int hidden = 50;
  int filter = 8;
  int cd = 5;
  int epochs = 500;
  double lr = 0.5;
  double weight_decay = 2e-4;
  double sparsity_target = 0.1;
  double sparsity_weight = 1.0;
  int minibatch = 10;

  std::vector<std::string> overridden; // flag names given explicitly
};

struct SampleCmdConfig {
  std::string model;
  int count = 1;
  int length = 64;
  int burn_in = 100; // TC-RBM only
  std::string out;
  std::string decode;     // "" | "text"
  std::string decode_dir; // defaults next to out
};

struct EvalPredictConfig {
  std::vector<std::pair<std::string, std::string>> models; // name, path
  std::string test;
  std::string train; // baseline source; falls back to test marginal
  int tau_max = 15;
  int configs = 2000;
  int min_context = 8;
  int paths = 100; // sampled paths for the VMM family
  int chains = 100;
  int iterations = 15;
  int burn = 10;
  std::string out_prefix;
};

struct EvalKlConfig {
  std::vector<std::pair<std::string, std::string>> samples; // name, corpus path
  std::string test;
  std::string train; // adds the trainset reference row when given
  int resamples = 50;
  int max_order = 6;
  int max_lag = 6;
  std::string out_prefix;
};

struct TuneCmdConfig {
  std::string corpus;
  std::string model; // vmm | dvmm
  std::string grid;  // grid JSON file
  std::string out_prefix;
};

struct FiltersCmdConfig {
  std::string model;
  std::string out;
};

void cmd_ingest(const IngestConfig &cfg, const GlobalOptions &global);
void cmd_train(const TrainCmdConfig &cfg, const GlobalOptions &global);
void cmd_sample(const SampleCmdConfig &cfg, const GlobalOptions &global);
void cmd_eval_predict(const EvalPredictConfig &cfg, const GlobalOptions &global);
void cmd_eval_kl(const EvalKlConfig &cfg, const GlobalOptions &global);
void cmd_tune(const TuneCmdConfig &cfg, const GlobalOptions &global);
void cmd_filters(const FiltersCmdConfig &cfg, const GlobalOptions &global);

} // namespace melodikit
