#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "melodikit/commands.hpp"
#include "melodikit/errors.hpp"
#include "melodikit/version.hpp"

namespace {

using melodikit::GlobalOptions;

// "name=path" or bare "path" (name then defaults to the model kind).
std::pair<std::string, std::string> split_named_path(const std::string &arg) {
  auto eq = arg.find('=');
  if (eq == std::string::npos) return {"", arg};
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{std::string(melodikit::kToolName) + " " + melodikit::kVersion +
               " - melodic sequence models (VMM, Dirichlet-VMM, TC-RBM)"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "root seed for all randomized procedures");
  app.add_option("--threads", global.threads, "worker threads for evaluation and tuning");
  app.add_flag("--deterministic,!--no-deterministic", global.deterministic,
               "fixed reduction order (results are identical for any thread count)");
  app.add_option("--kernels", global.kernels, "compute backend: auto|scalar|avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  melodikit::IngestConfig ingest;
  auto *cmd_ingest = app.add_subcommand("ingest", "parse and quantize melody files into a corpus");
  cmd_ingest->add_option("files", ingest.paths, "MIDI or text melody files");
  cmd_ingest->add_option("--manifest", ingest.manifest,
                         "JSON manifest with per-file ticks-per-eighth overrides");
  double tpe = 0.0;
  auto *tpe_opt = cmd_ingest->add_option("--ticks-per-eighth", tpe,
                                         "grid resolution override for all inputs");
  cmd_ingest->add_option("--out", ingest.out, "output corpus file")->required();

  melodikit::TrainCmdConfig train;
  auto *cmd_train = app.add_subcommand("train", "fit a model to a corpus");
  cmd_train->add_option("--corpus", train.corpus, "corpus file")->required();
  cmd_train->add_option("--model", train.model, "vmm | dvmm | tcrbm")->required();
  cmd_train->add_option("--out", train.out, "output model file")->required();
  cmd_train->add_option("--log", train.log_out, "training-log CSV (default <out>.log.csv)");
  cmd_train->add_option("--params", train.params_file, "chosen-parameters JSON from tune");
  cmd_train->add_option("--c-min", train.c_min, "context count threshold");
  cmd_train->add_option("--eps-min", train.eps_min, "conditional ratio threshold");
  cmd_train->add_option("--gamma", train.gamma_min, "VMM smoothing mass");
  cmd_train->add_option("--alpha", train.alpha, "Dirichlet concentration");
  cmd_train->add_option("--max-depth", train.max_depth, "maximum context length");
  cmd_train->add_option("--hidden", train.hidden, "TC-RBM hidden units");
  cmd_train->add_option("--filter", train.filter, "TC-RBM filter length (steps)");
  cmd_train->add_option("--cd", train.cd, "contrastive divergence steps");
  cmd_train->add_option("--epochs", train.epochs, "training epochs");
  cmd_train->add_option("--lr", train.lr, "initial learning rate");
  cmd_train->add_option("--weight-decay", train.weight_decay, "L2 weight decay");
  cmd_train->add_option("--sparsity-target", train.sparsity_target, "target hidden activity");
  cmd_train->add_option("--sparsity-weight", train.sparsity_weight, "sparsity penalty weight");
  cmd_train->add_option("--minibatch", train.minibatch, "sequences per minibatch");

  melodikit::SampleCmdConfig sample;
  auto *cmd_sample = app.add_subcommand("sample", "draw a-priori samples from a model");
  cmd_sample->add_option("--model", sample.model, "model file")->required();
  cmd_sample->add_option("--count", sample.count, "number of samples");
  cmd_sample->add_option("--length", sample.length, "steps per sample");
  cmd_sample->add_option("--burn-in", sample.burn_in, "Gibbs sweeps before keeping (TC-RBM)");
  cmd_sample->add_option("--out", sample.out, "output corpus file")->required();
  cmd_sample->add_option("--decode", sample.decode, "also write decoded output: text");
  cmd_sample->add_option("--decode-dir", sample.decode_dir, "directory for decoded files");

  melodikit::EvalPredictConfig evalp;
  melodikit::EvalKlConfig evalk;
  std::vector<std::string> predict_models;
  std::vector<std::string> kl_samples;
  auto *cmd_eval = app.add_subcommand("eval", "run an evaluation protocol");
  cmd_eval->require_subcommand(1);
  auto *cmd_predict = cmd_eval->add_subcommand("predict", "multi-step prediction log-likelihood");
  cmd_predict->add_option("--model", predict_models, "model file, optionally name=path")
      ->required();
  cmd_predict->add_option("--test", evalp.test, "test corpus")->required();
  cmd_predict->add_option("--train", evalp.train, "training corpus for the marginal baseline");
  cmd_predict->add_option("--tau-max", evalp.tau_max, "largest prediction horizon");
  cmd_predict->add_option("--configs", evalp.configs, "context/future configurations");
  cmd_predict->add_option("--min-context", evalp.min_context, "minimum context length");
  cmd_predict->add_option("--paths", evalp.paths, "sampled paths for VMM-family prediction");
  cmd_predict->add_option("--chains", evalp.chains, "TC-RBM prediction chains");
  cmd_predict->add_option("--iterations", evalp.iterations, "Gibbs sweeps per chain");
  cmd_predict->add_option("--burn", evalp.burn, "discarded sweeps per chain");
  cmd_predict->add_option("--out", evalp.out_prefix, "report path prefix")->required();

  auto *cmd_kl = cmd_eval->add_subcommand("kl", "bootstrapped KL of short-order statistics");
  cmd_kl->add_option("--samples", kl_samples, "sample corpus, optionally name=path");
  cmd_kl->add_option("--test", evalk.test, "test corpus")->required();
  cmd_kl->add_option("--train", evalk.train, "training corpus (adds the trainset row)");
  cmd_kl->add_option("--resamples", evalk.resamples, "bootstrap resamples");
  cmd_kl->add_option("--max-order", evalk.max_order, "orders 1..N");
  cmd_kl->add_option("--max-lag", evalk.max_lag, "lags 1..N");
  cmd_kl->add_option("--out", evalk.out_prefix, "report path prefix")->required();

  melodikit::TuneCmdConfig tune;
  auto *cmd_tune = app.add_subcommand("tune", "grid search with leave-one-out cross-validation");
  cmd_tune->add_option("--corpus", tune.corpus, "corpus file")->required();
  cmd_tune->add_option("--model", tune.model, "vmm | dvmm")->required();
  cmd_tune->add_option("--grid", tune.grid, "grid JSON file")->required();
  cmd_tune->add_option("--out", tune.out_prefix, "report path prefix")->required();

  melodikit::FiltersCmdConfig filters;
  auto *cmd_filters = app.add_subcommand("filters", "export TC-RBM filters as CSV");
  cmd_filters->add_option("--model", filters.model, "TC-RBM model file")->required();
  cmd_filters->add_option("--out", filters.out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*cmd_ingest) {
      if (tpe_opt->count() > 0) ingest.ticks_per_eighth = tpe;
      melodikit::cmd_ingest(ingest, global);
    } else if (*cmd_train) {
      for (const auto *opt : cmd_train->get_options()) {
        if (opt->count() > 0) {
          std::string name = opt->get_name();
          if (name.rfind("--", 0) == 0) name = name.substr(2);
          train.overridden.push_back(name);
        }
      }
      melodikit::cmd_train(train, global);
    } else if (*cmd_sample) {
      melodikit::cmd_sample(sample, global);
    } else if (*cmd_predict) {
      for (const auto &m : predict_models) evalp.models.push_back(split_named_path(m));
      melodikit::cmd_eval_predict(evalp, global);
    } else if (*cmd_kl) {
      for (const auto &m : kl_samples) evalk.samples.push_back(split_named_path(m));
      melodikit::cmd_eval_kl(evalk, global);
    } else if (*cmd_tune) {
      melodikit::cmd_tune(tune, global);
    } else if (*cmd_filters) {
      melodikit::cmd_filters(filters, global);
    }
  } catch (const melodikit::ValidationError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
