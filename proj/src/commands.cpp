#include "melodikit/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <json.hpp>

#include "melodikit/corpus_io.hpp"
#include "melodikit/errors.hpp"
#include "melodikit/eval.hpp"
#include "melodikit/kernels/kernels.hpp"
#include "melodikit/melody.hpp"
#include "melodikit/model_io.hpp"
#include "melodikit/text_format.hpp"
#include "melodikit/tuning.hpp"
#include "melodikit/version.hpp"

namespace melodikit {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void apply_kernels_option(const std::string &kernels) {
  if (kernels == "auto" || kernels.empty()) return;
  if (kernels == "scalar") {
    kernels::force_backend(kernels::Backend::Scalar);
  } else if (kernels == "avx2") {
    kernels::force_backend(kernels::Backend::Avx2);
  } else {
    throw ValidationError("unknown kernels backend: " + kernels);
  }
}

// Every report carries tool version, seed and the resolved configuration.
std::string audit_comment(const GlobalOptions &global, const json &config) {
  std::string s;
  s += std::string("# ") + kToolName + " " + kVersion + "\n";
  s += "# seed=" + std::to_string(global.seed) + "\n";
  s += "# threads=" + std::to_string(global.threads) +
       " deterministic=" + (global.deterministic ? "true" : "false") + "\n";
  s += "# config=" + config.dump() + "\n";
  return s;
}

json audit_meta(const GlobalOptions &global, const json &config) {
  return json{{"tool", kToolName},
              {"version", kVersion},
              {"seed", global.seed},
              {"threads", global.threads},
              {"deterministic", global.deterministic},
              {"config", config}};
}

void write_text_file(const std::string &path, const std::string &content) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << content;
}

void write_json_file(const json &j, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
  return j;
}

// JSON-safe representation: infinities survive as strings.
json kl_value(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

std::string csv_number(double x) {
  if (std::isinf(x)) return "inf";
  return fmt(x);
}

bool was_overridden(const TrainCmdConfig &cfg, const std::string &flag) {
  return std::find(cfg.overridden.begin(), cfg.overridden.end(), flag) != cfg.overridden.end();
}

} // namespace

void cmd_ingest(const IngestConfig &cfg, const GlobalOptions &global) {
  apply_kernels_option(global.kernels);
  std::vector<CorpusInput> inputs;
  for (const auto &p : cfg.paths) inputs.push_back(CorpusInput{p, cfg.ticks_per_eighth});
  if (!cfg.manifest.empty()) {
    auto manifest_inputs = read_manifest(cfg.manifest);
    inputs.insert(inputs.end(), manifest_inputs.begin(), manifest_inputs.end());
  }
  if (inputs.empty()) throw ValidationError("ingest: no input files given");
  if (cfg.out.empty()) throw ValidationError("ingest: --out is required");

  Corpus corpus = load_corpus(std::move(inputs));
  save_corpus(corpus, cfg.out);

  IngestStats stats = corpus_stats(corpus);
  std::cout << "ingested " << stats.tunes << " tune(s), " << stats.total_steps
            << " steps\n";
  std::cout << "symbol histogram:\n";
  for (std::size_t s = 0; s < stats.symbol_histogram.size(); ++s) {
    if (stats.symbol_histogram[s] == 0) continue;
    std::cout << "  " << symbol_name(static_cast<Symbol>(s)) << ": "
              << stats.symbol_histogram[s] << "\n";
  }
}

void cmd_train(const TrainCmdConfig &cfg_in, const GlobalOptions &global) {
  apply_kernels_option(global.kernels);
  TrainCmdConfig cfg = cfg_in;
  if (cfg.corpus.empty()) throw ValidationError("train: --corpus is required");
  if (cfg.out.empty()) throw ValidationError("train: --out is required");
  if (cfg.model != "vmm" && cfg.model != "dvmm" && cfg.model != "tcrbm") {
    throw ValidationError("train: unknown model '" + cfg.model + "'");
  }

  // Chosen-parameters JSON from the tune command; explicit flags still win.
  if (!cfg.params_file.empty()) {
    json p = read_json_file(cfg.params_file);
    if (p.contains("model") && p.at("model").get<std::string>() != cfg.model) {
      throw ValidationError("train: params file is for model '" +
                            p.at("model").get<std::string>() + "'");
    }
    if (p.contains("c_min") && !was_overridden(cfg, "c-min")) cfg.c_min = p.at("c_min").get<std::int64_t>();
    if (p.contains("eps_min") && !was_overridden(cfg, "eps-min")) cfg.eps_min = p.at("eps_min").get<double>();
    if (p.contains("gamma_min") && !was_overridden(cfg, "gamma")) cfg.gamma_min = p.at("gamma_min").get<double>();
    if (p.contains("alpha") && !was_overridden(cfg, "alpha")) cfg.alpha = p.at("alpha").get<double>();
    if (p.contains("max_depth") && !was_overridden(cfg, "max-depth")) cfg.max_depth = p.at("max_depth").get<int>();
  }

  Corpus corpus = load_corpus_file(cfg.corpus);
  const std::string log_path = cfg.log_out.empty() ? cfg.out + ".log.csv" : cfg.log_out;

  json config{{"command", "train"}, {"model", cfg.model}, {"corpus", cfg.corpus}};
  std::string log = "";

  if (cfg.model == "vmm") {
    PstParams params;
    params.max_depth = cfg.max_depth;
    params.min_count = cfg.c_min;
    params.ratio_threshold = cfg.eps_min;
    config["params"] = {{"max_depth", params.max_depth}, {"c_min", params.min_count},
                        {"eps_min", params.ratio_threshold}, {"gamma_min", cfg.gamma_min}};
    Pst tree = grow_pst(corpus, params);
    smooth(tree, cfg.gamma_min);
    log += "nodes,depth\n";
    log += std::to_string(tree.node_count()) + "," + std::to_string(tree.depth()) + "\n";
    save_model(VmmModel{std::move(tree)}, cfg.out);
  } else if (cfg.model == "dvmm") {
    DirichletParams params;
    params.alpha = cfg.alpha;
    params.max_depth = cfg.max_depth;
    params.min_count = cfg.c_min;
    params.ratio_threshold = cfg.eps_min;
    config["params"] = {{"max_depth", params.max_depth}, {"c_min", params.min_count},
                        {"eps_min", params.ratio_threshold}, {"alpha", params.alpha}};
    DirichletVmm model = build_dirichlet_vmm(corpus, params);
    log += "nodes,depth\n";
    log += std::to_string(model.tree.node_count()) + "," + std::to_string(model.tree.depth()) + "\n";
    save_model(std::move(model), cfg.out);
  } else {
    TcrbmTrainConfig tc;
    tc.cd_k = cfg.cd;
    tc.epochs = cfg.epochs;
    tc.lr0 = cfg.lr;
    tc.weight_decay = cfg.weight_decay;
    tc.sparsity_target = cfg.sparsity_target;
    tc.sparsity_weight = cfg.sparsity_weight;
    tc.minibatch = cfg.minibatch;
    tc.seed = global.seed;
    config["params"] = {{"hidden", cfg.hidden}, {"filter", cfg.filter}, {"cd", tc.cd_k},
                        {"epochs", tc.epochs}, {"lr0", tc.lr0},
                        {"weight_decay", tc.weight_decay},
                        {"sparsity_target", tc.sparsity_target},
                        {"sparsity_weight", tc.sparsity_weight},
                        {"minibatch", tc.minibatch}};
    TcrbmParams params = init_tcrbm(cfg.hidden, cfg.filter, corpus.alphabet_size, global.seed);
    auto epochs = train_tcrbm(params, corpus, tc);
    log += "epoch,lr,recon_cross_entropy,mean_hidden_activity\n";
    for (const auto &e : epochs) {
      log += std::to_string(e.epoch) + "," + fmt(e.lr) + "," + fmt(e.recon_cross_entropy) +
             "," + fmt(e.mean_hidden_activity) + "\n";
    }
    save_model(std::move(params), cfg.out);
  }

  write_text_file(log_path, audit_comment(global, config) + log);
  std::cout << "wrote " << cfg.out << " and " << log_path << "\n";
}

void cmd_sample(const SampleCmdConfig &cfg, const GlobalOptions &global) {
  apply_kernels_option(global.kernels);
  if (cfg.model.empty()) throw ValidationError("sample: --model is required");
  if (cfg.out.empty()) throw ValidationError("sample: --out is required");
  if (cfg.count < 1) throw ValidationError("sample: --count must be >= 1");
  if (cfg.length < 1) throw ValidationError("sample: --length must be >= 1");
  if (!cfg.decode.empty() && cfg.decode != "text") {
    throw ValidationError("sample: unknown decode mode '" + cfg.decode + "'");
  }

  AnyModel model = load_model(cfg.model);
  Rng root(global.seed);

  Corpus samples;
  for (int s = 0; s < cfg.count; ++s) {
    Rng rng = root.substream(s);
    SymbolSequence seq;
    if (const auto *vmm = std::get_if<VmmModel>(&model)) {
      seq = sample_sequence(vmm->tree, cfg.length, rng);
      samples.alphabet_size = vmm->tree.alphabet;
    } else if (const auto *dvmm = std::get_if<DirichletVmm>(&model)) {
      seq = sample_sequence(*dvmm, cfg.length, rng);
      samples.alphabet_size = dvmm->tree.alphabet;
    } else {
      const auto &rbm = std::get<TcrbmParams>(model);
      seq = sample_free(rbm, cfg.length, cfg.burn_in, rng);
      samples.alphabet_size = rbm.alphabet;
    }
    char id[32];
    std::snprintf(id, sizeof id, "sample_%04d", s);
    seq.id = id;
    samples.sequences.push_back(std::move(seq));
  }
  save_corpus(samples, cfg.out);

  if (cfg.decode == "text") {
    std::string dir = cfg.decode_dir;
    if (dir.empty()) dir = std::filesystem::path(cfg.out).replace_extension("").string() + "_text";
    std::filesystem::create_directories(dir);
    for (const auto &seq : samples.sequences) {
      try {
        write_text_file((std::filesystem::path(dir) / (seq.id + ".txt")).string(),
                        format_text(decode(seq)));
      } catch (const ParseError &e) {
        std::cerr << "note: " << seq.id << " is not decodable (" << e.what() << ")\n";
      }
    }
  }
  std::cout << "wrote " << cfg.count << " sample(s) to " << cfg.out << "\n";
}

void cmd_eval_predict(const EvalPredictConfig &cfg, const GlobalOptions &global) {
  apply_kernels_option(global.kernels);
  if (cfg.test.empty()) throw ValidationError("eval predict: --test is required");
  if (cfg.models.empty()) throw ValidationError("eval predict: at least one --model is required");
  if (cfg.out_prefix.empty()) throw ValidationError("eval predict: --out is required");

  Corpus test = load_corpus_file(cfg.test);
  Corpus baseline_source = cfg.train.empty() ? test : load_corpus_file(cfg.train);
  CategoricalDistribution baseline = empirical_marginal(baseline_source);

  std::vector<AnyModel> loaded;
  loaded.reserve(cfg.models.size());
  std::vector<std::unique_ptr<SequencePredictor>> predictors;
  PredictionProtocol protocol{cfg.chains, cfg.iterations, cfg.burn};
  for (const auto &[name, path] : cfg.models) {
    loaded.push_back(load_model(path));
    AnyModel &m = loaded.back();
    const std::string label = name.empty() ? model_kind_name(m) : name;
    if (auto *vmm = std::get_if<VmmModel>(&m)) {
      if (vmm->tree.alphabet != test.alphabet_size) {
        throw ValidationError("model '" + label + "' alphabet does not match the test corpus");
      }
      predictors.push_back(std::make_unique<TreePredictor>(vmm->tree, cfg.paths, label));
    } else if (auto *dvmm = std::get_if<DirichletVmm>(&m)) {
      if (dvmm->tree.alphabet != test.alphabet_size) {
        throw ValidationError("model '" + label + "' alphabet does not match the test corpus");
      }
      predictors.push_back(std::make_unique<TreePredictor>(dvmm->tree, cfg.paths, label));
    } else {
      auto &rbm = std::get<TcrbmParams>(m);
      if (rbm.alphabet != test.alphabet_size) {
        throw ValidationError("model '" + label + "' alphabet does not match the test corpus");
      }
      predictors.push_back(std::make_unique<TcrbmPredictor>(rbm, protocol, label));
    }
  }
  std::vector<const SequencePredictor *> model_ptrs;
  for (const auto &p : predictors) model_ptrs.push_back(p.get());

  PredictionReport report = prediction_loglik(model_ptrs, baseline, test, cfg.tau_max,
                                              cfg.configs, cfg.min_context, global.seed,
                                              global.threads);

  json config{{"command", "eval predict"}, {"test", cfg.test}, {"train", cfg.train},
              {"tau_max", cfg.tau_max}, {"configs", cfg.configs},
              {"min_context", cfg.min_context}, {"paths", cfg.paths},
              {"chains", cfg.chains}, {"iterations", cfg.iterations}, {"burn", cfg.burn}};

  std::string csv = audit_comment(global, config);
  csv += "tau,model,mean_loglik\n";
  for (std::size_t m = 0; m < report.models.size(); ++m) {
    for (int tau = 1; tau <= report.tau_max; ++tau) {
      csv += std::to_string(tau) + "," + report.models[m] + "," +
             fmt(report.curves[m][tau - 1]) + "\n";
    }
  }
  for (int tau = 1; tau <= report.tau_max; ++tau) {
    csv += std::to_string(tau) + ",marginal," + fmt(report.baseline[tau - 1]) + "\n";
  }
  write_text_file(cfg.out_prefix + ".csv", csv);

  json jcurves = json::object();
  for (std::size_t m = 0; m < report.models.size(); ++m) {
    jcurves[report.models[m]] = report.curves[m];
  }
  jcurves["marginal"] = report.baseline;
  write_json_file(json{{"meta", audit_meta(global, config)},
                       {"tau_max", report.tau_max},
                       {"n_configs", report.n_configs},
                       {"curves", jcurves}},
                  cfg.out_prefix + ".json");
  std::cout << "wrote " << cfg.out_prefix << ".csv and .json\n";
}

void cmd_eval_kl(const EvalKlConfig &cfg, const GlobalOptions &global) {
  apply_kernels_option(global.kernels);
  if (cfg.test.empty()) throw ValidationError("eval kl: --test is required");
  if (cfg.samples.empty() && cfg.train.empty()) {
    throw ValidationError("eval kl: at least one --samples or --train is required");
  }
  if (cfg.out_prefix.empty()) throw ValidationError("eval kl: --out is required");

  Corpus test = load_corpus_file(cfg.test);

  std::vector<StatisticSpec> specs;
  for (int n = 1; n <= cfg.max_order; ++n) {
    specs.push_back(StatisticSpec{StatisticSpec::Kind::Order, n});
  }
  for (int l = 1; l <= cfg.max_lag; ++l) {
    specs.push_back(StatisticSpec{StatisticSpec::Kind::Lag, l});
  }

  KlReport report;
  report.n_resamples = cfg.resamples;
  for (const auto &spec : specs) report.statistics.push_back(spec.label());

  if (!cfg.train.empty()) {
    Corpus train = load_corpus_file(cfg.train);
    auto rows = train_vs_test_reference(train, test, specs, cfg.resamples, global.seed,
                                        global.threads);
    report.models.push_back("trainset");
    report.mean.emplace_back();
    report.variance.emplace_back();
    for (auto [m, v] : rows) {
      report.mean.back().push_back(m);
      report.variance.back().push_back(v);
    }
  }
  for (const auto &[name, path] : cfg.samples) {
    Corpus samples = load_corpus_file(path);
    if (samples.alphabet_size != test.alphabet_size) {
      throw ValidationError("sample corpus '" + path + "' alphabet does not match the test corpus");
    }
    auto rows = bootstrap_kl(test, samples, specs, cfg.resamples, global.seed, global.threads);
    report.models.push_back(name.empty() ? path : name);
    report.mean.emplace_back();
    report.variance.emplace_back();
    for (auto [m, v] : rows) {
      report.mean.back().push_back(m);
      report.variance.back().push_back(v);
    }
  }

  json config{{"command", "eval kl"}, {"test", cfg.test}, {"train", cfg.train},
              {"resamples", cfg.resamples}, {"max_order", cfg.max_order},
              {"max_lag", cfg.max_lag}};

  std::string csv = audit_comment(global, config);
  csv += "statistic,model,mean,variance\n";
  for (std::size_t m = 0; m < report.models.size(); ++m) {
    for (std::size_t s = 0; s < report.statistics.size(); ++s) {
      csv += report.statistics[s] + "," + report.models[m] + "," +
             csv_number(report.mean[m][s]) + "," + csv_number(report.variance[m][s]) + "\n";
    }
  }
  write_text_file(cfg.out_prefix + ".csv", csv);

  json table = json::object();
  for (std::size_t m = 0; m < report.models.size(); ++m) {
    json row = json::object();
    for (std::size_t s = 0; s < report.statistics.size(); ++s) {
      row[report.statistics[s]] = {{"mean", kl_value(report.mean[m][s])},
                                   {"variance", kl_value(report.variance[m][s])}};
    }
    table[report.models[m]] = std::move(row);
  }
  write_json_file(json{{"meta", audit_meta(global, config)},
                       {"n_resamples", cfg.resamples},
                       {"kl", table}},
                  cfg.out_prefix + ".json");
  std::cout << "wrote " << cfg.out_prefix << ".csv and .json\n";
}

void cmd_tune(const TuneCmdConfig &cfg, const GlobalOptions &global) {
  apply_kernels_option(global.kernels);
  if (cfg.corpus.empty()) throw ValidationError("tune: --corpus is required");
  if (cfg.grid.empty()) throw ValidationError("tune: --grid is required");
  if (cfg.out_prefix.empty()) throw ValidationError("tune: --out is required");
  TreeModelKind kind;
  if (cfg.model == "vmm") {
    kind = TreeModelKind::Vmm;
  } else if (cfg.model == "dvmm") {
    kind = TreeModelKind::DirichletVmm;
  } else {
    throw ValidationError("tune: model must be vmm or dvmm");
  }

  json grid_j = read_json_file(cfg.grid);
  GridSpec grid;
  if (grid_j.contains("c_min")) grid.min_count = grid_j.at("c_min").get<std::vector<std::int64_t>>();
  if (grid_j.contains("eps_min")) grid.ratio_threshold = grid_j.at("eps_min").get<std::vector<double>>();
  if (grid_j.contains("gamma_min")) grid.gamma_min = grid_j.at("gamma_min").get<std::vector<double>>();
  if (grid_j.contains("alpha")) grid.alpha = grid_j.at("alpha").get<std::vector<double>>();
  if (grid_j.contains("max_depth")) grid.max_depth = grid_j.at("max_depth").get<int>();
  for (const auto &[key, value] : grid_j.items()) {
    if (key != "c_min" && key != "eps_min" && key != "gamma_min" && key != "alpha" &&
        key != "max_depth") {
      throw ValidationError("tune: unknown grid parameter '" + key + "'");
    }
  }

  Corpus corpus = load_corpus_file(cfg.corpus);
  TuningResult result = grid_search(kind, corpus, grid, global.threads);

  json config{{"command", "tune"}, {"model", cfg.model}, {"corpus", cfg.corpus},
              {"grid", cfg.grid}};

  const bool is_vmm = kind == TreeModelKind::Vmm;
  std::string csv = audit_comment(global, config);
  csv += std::string("c_min,eps_min,") + (is_vmm ? "gamma_min" : "alpha") +
         ",score,nodes,depth\n";
  for (const auto &row : result.table) {
    csv += std::to_string(row.params.min_count) + "," + fmt(row.params.ratio_threshold) + "," +
           fmt(is_vmm ? row.params.gamma_min : row.params.alpha) + "," +
           csv_number(row.score) + "," + std::to_string(row.tree_nodes) + "," +
           std::to_string(row.tree_depth) + "\n";
  }
  write_text_file(cfg.out_prefix + "_scores.csv", csv);

  json best{{"model", cfg.model},
            {"c_min", result.best.min_count},
            {"eps_min", result.best.ratio_threshold},
            {"max_depth", result.best.max_depth}};
  if (is_vmm) {
    best["gamma_min"] = result.best.gamma_min;
  } else {
    best["alpha"] = result.best.alpha;
  }
  write_json_file(json{{"meta", audit_meta(global, config)}, {"best", best}},
                  cfg.out_prefix + "_best.json");
  // The best-params file alone is what cmd_train consumes.
  write_json_file(best, cfg.out_prefix + "_params.json");
  std::cout << "wrote " << cfg.out_prefix << "_scores.csv, _best.json and _params.json\n";
}

void cmd_filters(const FiltersCmdConfig &cfg, const GlobalOptions &global) {
  apply_kernels_option(global.kernels);
  if (cfg.model.empty()) throw ValidationError("filters: --model is required");
  if (cfg.out.empty()) throw ValidationError("filters: --out is required");
  AnyModel model = load_model(cfg.model);
  const auto *rbm = std::get_if<TcrbmParams>(&model);
  if (!rbm) throw ValidationError("filters: model is not a TC-RBM");
  json config{{"command", "filters"}, {"model", cfg.model}};
  save_filters_csv(*rbm, cfg.out, audit_comment(global, config));
  std::cout << "wrote " << cfg.out << "\n";
}

} // namespace melodikit
