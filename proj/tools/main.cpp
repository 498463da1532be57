// Command-line front end: simulate traces, fit features, train and evaluate
// the sequence classifier, score the simple baselines, and emit plot-ready
// report tables. Every subcommand is deterministic for a fixed seed and
// writes no timestamps, so reruns produce byte-identical artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "curbside/corpus.hpp"
#include "curbside/experiment.hpp"
#include "curbside/metrics.hpp"
#include "curbside/model_io.hpp"
#include "curbside/report.hpp"
#include "curbside/rng.hpp"
#include "curbside/scenario.hpp"
#include "curbside/simulate.hpp"
#include "curbside/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 7;
  std::string profile = "desk";
  double window_s = 0.0;  // 0 → profile default
  double stride_s = 0.0;
  int n_sub = 0;
  int m_pdp = -1;
  bool no_mp = false;
  int epochs = 0;
  int hidden = 0;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* profile_opt = nullptr;
  CLI::Option* window_opt = nullptr;
  CLI::Option* stride_opt = nullptr;
  CLI::Option* n_sub_opt = nullptr;
  CLI::Option* m_pdp_opt = nullptr;
  CLI::Option* no_mp_opt = nullptr;
  CLI::Option* epochs_opt = nullptr;
  CLI::Option* hidden_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_model_knobs) {
  cmd->add_option("--config", o.config_path,
                  "JSON file with defaults for the options below");
  o.seed_opt = cmd->add_option("--seed", o.seed, "root random seed");
  o.profile_opt = cmd->add_option("--profile", o.profile, "desk or paper")
                      ->check(CLI::IsMember({"desk", "paper"}));
  o.window_opt = cmd->add_option("--window", o.window_s, "window length [s]");
  o.stride_opt = cmd->add_option("--stride", o.stride_s, "window stride [s]");
  if (with_model_knobs) {
    o.n_sub_opt =
        cmd->add_option("--n-sub", o.n_sub, "selected subcarrier count");
    o.m_pdp_opt =
        cmd->add_option("--m-pdp", o.m_pdp, "PDP PCA components (0 disables)");
    o.no_mp_opt =
        cmd->add_flag("--no-mp", o.no_mp, "drop the multipath ratio feature");
    o.epochs_opt = cmd->add_option("--epochs", o.epochs, "override max epochs");
    o.hidden_opt = cmd->add_option("--hidden", o.hidden, "override hidden dim");
  }
}

// Config-file values fill in options the command line left untouched.
void merge_config(CommonOpts& o) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in) throw std::runtime_error("cannot open config: " + o.config_path);
  json j;
  in >> j;
  static const std::vector<std::string> known = {
      "seed",  "profile", "window_s", "stride_s", "n_sub",
      "m_pdp", "use_mp",  "epochs",   "hidden"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::runtime_error("unknown config key: " + key);
    }
    (void)value;
  }
  auto unset = [](CLI::Option* opt) { return opt == nullptr || opt->count() == 0; };
  if (j.contains("seed") && unset(o.seed_opt)) {
    o.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("profile") && unset(o.profile_opt)) {
    o.profile = j["profile"].get<std::string>();
  }
  if (j.contains("window_s") && unset(o.window_opt)) {
    o.window_s = j["window_s"].get<double>();
  }
  if (j.contains("stride_s") && unset(o.stride_opt)) {
    o.stride_s = j["stride_s"].get<double>();
  }
  if (j.contains("n_sub") && unset(o.n_sub_opt)) {
    o.n_sub = j["n_sub"].get<int>();
  }
  if (j.contains("m_pdp") && unset(o.m_pdp_opt)) {
    o.m_pdp = j["m_pdp"].get<int>();
  }
  if (j.contains("use_mp") && unset(o.no_mp_opt)) {
    o.no_mp = !j["use_mp"].get<bool>();
  }
  if (j.contains("epochs") && unset(o.epochs_opt)) {
    o.epochs = j["epochs"].get<int>();
  }
  if (j.contains("hidden") && unset(o.hidden_opt)) {
    o.hidden = j["hidden"].get<int>();
  }
}

curbside::ExperimentProfile resolve_profile(const CommonOpts& o) {
  curbside::ExperimentProfile p = curbside::ExperimentProfile::named(o.profile);
  if (o.window_s > 0.0) p.window_s = o.window_s;
  if (o.stride_s > 0.0) p.stride_s = o.stride_s;
  if (o.n_sub > 0) p.features.n_sub = o.n_sub;
  if (o.m_pdp >= 0) p.features.m_pdp = o.m_pdp;
  if (o.no_mp) p.features.use_mp = false;
  if (o.epochs > 0) p.train.max_epochs = o.epochs;
  if (o.epochs > 0 && p.train.patience > o.epochs) p.train.patience = o.epochs;
  if (o.hidden > 0) p.hidden_dim = o.hidden;
  return p;
}

json profile_config_json(const curbside::ExperimentProfile& p,
                         std::uint64_t seed) {
  return json{{"profile", p.name},
              {"seed", seed},
              {"window_s", p.window_s},
              {"stride_s", p.stride_s},
              {"n_sub", p.features.n_sub},
              {"m_pdp", p.features.m_pdp},
              {"use_mp", p.features.use_mp},
              {"hidden_dim", p.hidden_dim},
              {"n_layers", p.n_layers},
              {"max_epochs", p.train.max_epochs}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << text;
}

void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

int cmd_simulate(const std::string& corpus_kind,
                 const std::string& scenario_path, const std::string& out_path,
                 const CommonOpts& o) {
  if (!scenario_path.empty()) {
    const curbside::Scenario sc = curbside::load_scenario(scenario_path);
    const curbside::Trace trace = curbside::simulate(sc);
    curbside::save_trace(out_path, trace);
    std::cout << "wrote " << trace.packets.size() << " packets to " << out_path
              << "\n";
    return 0;
  }
  curbside::CorpusSpec spec = corpus_kind == "field"
                                  ? curbside::CorpusSpec::field_scale(o.seed)
                                  : curbside::CorpusSpec::desk(o.seed);
  const auto rows = curbside::make_corpus(spec, out_path);
  std::cout << "wrote " << rows.size() << " rides to " << out_path << "\n";
  return 0;
}

int cmd_features(const std::string& corpus_dir, const std::string& out_path,
                 const CommonOpts& o) {
  const curbside::ExperimentProfile p = resolve_profile(o);
  const std::uint64_t split_seed = curbside::derive_seed(o.seed, "split");
  const curbside::WindowSet ws =
      curbside::load_windows(corpus_dir, p.window_s, p.stride_s, split_seed);
  const curbside::FeaturePipeline pipeline =
      curbside::FeaturePipeline::fit(ws.train, p.features);
  json j;
  j["schema_version"] = 1;
  j["command"] = "features";
  j["config"] = profile_config_json(p, o.seed);
  j["split_seed"] = split_seed;
  j["n_train_windows"] = ws.train.size();
  j["n_val_windows"] = ws.val.size();
  j["n_test_windows"] = ws.test.size();
  j["pipeline"] = pipeline.to_json();
  write_json(out_path, j);
  std::cout << "fitted pipeline on " << ws.train.size() << " windows -> "
            << out_path << "\n";
  return 0;
}

json train_summary_json(const curbside::ml::TrainResult& r) {
  json history = json::array();
  for (const auto& e : r.history) {
    history.push_back({{"epoch", e.epoch},
                       {"lr", e.lr},
                       {"train_loss", e.train_loss},
                       {"val_loss", e.val_loss}});
  }
  return json{{"n_epochs", r.history.size()},
              {"best_epoch", r.best_epoch},
              {"best_monitor", r.best_monitor},
              {"monitored_validation", r.monitored_validation},
              {"early_stopped", r.early_stopped},
              {"history", std::move(history)}};
}

int cmd_train(const std::string& corpus_dir, const std::string& model_path,
              const std::string& metrics_path, const CommonOpts& o) {
  const curbside::ExperimentProfile p = resolve_profile(o);
  const curbside::LstmRunResult run =
      curbside::run_lstm_experiment(corpus_dir, p, o.seed);
  curbside::save_model_bundle(model_path, run.bundle);

  json j;
  j["schema_version"] = 1;
  j["command"] = "train";
  j["config"] = profile_config_json(p, o.seed);
  j["config"]["split_seed"] = run.bundle.split_seed;
  j["config"]["classifier"] = "lstm";
  j["n_train_windows"] = run.n_train_windows;
  j["n_val_windows"] = run.n_val_windows;
  j["n_test_windows"] = run.n_test_windows;
  j["train"] = train_summary_json(run.training);
  j["metrics"] = curbside::metrics_to_json(run.test_metrics);
  write_json(metrics_path, j);
  std::cout << "test accuracy " << run.test_metrics.accuracy << " ("
            << run.n_test_windows << " windows) -> " << metrics_path << "\n";
  return 0;
}

int cmd_eval(const std::string& corpus_dir, const std::string& model_path,
             const std::string& metrics_path) {
  const curbside::ModelBundle bundle =
      curbside::load_model_bundle(model_path);
  const curbside::Metrics metrics =
      curbside::evaluate_bundle(corpus_dir, bundle);
  json j;
  j["schema_version"] = 1;
  j["command"] = "eval";
  j["config"] = {{"profile", bundle.profile},
                 {"window_s", bundle.window_s},
                 {"stride_s", bundle.stride_s},
                 {"n_sub", bundle.pipeline.config.n_sub},
                 {"m_pdp", bundle.pipeline.config.m_pdp},
                 {"use_mp", bundle.pipeline.config.use_mp},
                 {"split_seed", bundle.split_seed},
                 {"classifier", "lstm"},
                 {"fingerprint", curbside::config_fingerprint(bundle)}};
  j["metrics"] = curbside::metrics_to_json(metrics);
  write_json(metrics_path, j);
  std::cout << "test accuracy " << metrics.accuracy << " -> " << metrics_path
            << "\n";
  return 0;
}

int cmd_baseline(const std::string& corpus_dir,
                 const std::string& metrics_path, const CommonOpts& o) {
  const curbside::ExperimentProfile p = resolve_profile(o);
  const std::uint64_t split_seed = curbside::derive_seed(o.seed, "split");
  const curbside::WindowSet ws =
      curbside::load_windows(corpus_dir, p.window_s, p.stride_s, split_seed);
  const curbside::BaselineOutcome outcome = curbside::run_baseline_experiment(
      ws, p.features.antenna_pair, curbside::derive_seed(o.seed, "baseline"));

  json variants = json::array();
  for (const auto& v : outcome.variants) {
    variants.push_back({{"name", v.name},
                        {"family", v.family},
                        {"knn_accuracy", v.knn_accuracy},
                        {"knn_k", v.knn_k},
                        {"dt_accuracy", v.dt_accuracy},
                        {"svm_accuracy", v.svm_accuracy},
                        {"best_accuracy", v.best_accuracy}});
  }
  json j;
  j["schema_version"] = 1;
  j["command"] = "baseline";
  j["config"] = profile_config_json(p, o.seed);
  j["config"]["split_seed"] = split_seed;
  j["variants"] = std::move(variants);
  j["best_phase"] = outcome.best_phase;
  j["best_rss"] = outcome.best_rss;
  j["best_amplitude"] = outcome.best_amplitude;
  write_json(metrics_path, j);
  std::cout << "best accuracy: amplitude " << outcome.best_amplitude
            << ", rss " << outcome.best_rss << ", phase " << outcome.best_phase
            << " -> " << metrics_path << "\n";
  return 0;
}

int cmd_report(const std::string& metrics_dir, const std::string& out_dir,
               const std::string& ride_path, bool with_pdr,
               const CommonOpts& o) {
  fs::create_directories(out_dir);
  int outputs = 0;

  if (!metrics_dir.empty()) {
    std::map<double, std::vector<double>> by_window;
    std::map<int, std::vector<double>> by_n_sub;
    std::map<double, int> window_counts;
    int n_files = 0;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(metrics_dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& path : files) {
      std::ifstream in(path);
      json j;
      try {
        in >> j;
      } catch (const json::exception&) {
        continue;  // not a metrics file
      }
      if (!j.contains("metrics") || !j.contains("config")) continue;
      ++n_files;
      const double acc = j["metrics"].value("accuracy", 0.0);
      const int n_windows = j["metrics"].value("n_windows", 0);
      if (j["config"].contains("window_s")) {
        const double w = j["config"]["window_s"].get<double>();
        by_window[w].push_back(acc);
        window_counts[w] = n_windows;
      }
      if (j["config"].contains("n_sub")) {
        by_n_sub[j["config"]["n_sub"].get<int>()].push_back(acc);
      }
    }
    if (n_files == 0) {
      throw std::runtime_error("no metrics files found in " + metrics_dir);
    }
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / v.size();
    };
    std::vector<curbside::SweepPoint> wpoints;
    for (const auto& [w, accs] : by_window) {
      wpoints.push_back({w, mean(accs), window_counts[w]});
    }
    write_text((fs::path(out_dir) / "window_accuracy.csv").string(),
               curbside::sweep_csv("window_s", wpoints));
    ++outputs;
    std::vector<curbside::SweepPoint> spoints;
    for (const auto& [n, accs] : by_n_sub) {
      spoints.push_back({static_cast<double>(n), mean(accs), 0});
    }
    write_text((fs::path(out_dir) / "subcarrier_accuracy.csv").string(),
               curbside::sweep_csv("n_subcarriers", spoints));
    ++outputs;
  }

  if (!ride_path.empty()) {
    const curbside::Trace trace = curbside::load_trace(ride_path);
    const std::pair<int, int> pair{0, 1};
    write_text((fs::path(out_dir) / "amplitude_series.csv").string(),
               curbside::amplitude_series_csv(trace, pair));
    write_text((fs::path(out_dir) / "pdp_series.csv").string(),
               curbside::pdp_series_csv(trace, pair));
    outputs += 2;
  }

  if (with_pdr) {
    const auto points = curbside::default_pdr_study(20000, o.seed);
    write_text((fs::path(out_dir) / "pdr.csv").string(),
               curbside::pdr_csv(points));
    ++outputs;
  }

  if (outputs == 0) {
    throw std::runtime_error(
        "nothing to report: pass --metrics-dir, --ride, or --pdr");
  }
  std::cout << "wrote " << outputs << " tables to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wi-Fi CSI rider-side pipeline"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate traces or a corpus");
  std::string sim_corpus = "default";
  std::string sim_scenario;
  std::string sim_out = "corpus";
  CommonOpts sim_opts;
  sim->add_option("--corpus", sim_corpus, "default (desk size) or field")
      ->check(CLI::IsMember({"default", "field"}));
  sim->add_option("--scenario", sim_scenario, "single scenario JSON file");
  sim->add_option("--out", sim_out, "output directory (or trace file)");
  add_common(sim, sim_opts, false);

  // features
  auto* feat = app.add_subcommand("features", "fit the feature pipeline");
  std::string feat_corpus, feat_out = "pipeline.json";
  CommonOpts feat_opts;
  feat->add_option("--corpus", feat_corpus, "corpus directory")->required();
  feat->add_option("--out", feat_out, "pipeline JSON output");
  add_common(feat, feat_opts, true);

  // train
  auto* train = app.add_subcommand("train", "train the sequence classifier");
  std::string train_corpus, train_model = "model.json",
                            train_metrics = "train_metrics.json";
  CommonOpts train_opts;
  train->add_option("--corpus", train_corpus, "corpus directory")->required();
  train->add_option("--model", train_model, "model bundle output");
  train->add_option("--metrics", train_metrics, "metrics JSON output");
  add_common(train, train_opts, true);

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a stored model bundle");
  std::string eval_corpus, eval_model, eval_metrics = "eval_metrics.json";
  eval->add_option("--corpus", eval_corpus, "corpus directory")->required();
  eval->add_option("--model", eval_model, "model bundle path")->required();
  eval->add_option("--metrics", eval_metrics, "metrics JSON output");

  // baseline
  auto* base = app.add_subcommand("baseline", "score the simple baselines");
  std::string base_corpus, base_metrics = "baseline_metrics.json";
  CommonOpts base_opts;
  base->add_option("--corpus", base_corpus, "corpus directory")->required();
  base->add_option("--metrics", base_metrics, "metrics JSON output");
  add_common(base, base_opts, false);

  // report
  auto* rep = app.add_subcommand("report", "emit plot-ready CSV tables");
  std::string rep_metrics_dir, rep_out = "report", rep_ride;
  bool rep_pdr = false;
  CommonOpts rep_opts;
  rep->add_option("--metrics-dir", rep_metrics_dir,
                  "directory of metrics JSON files");
  rep->add_option("--out-dir", rep_out, "output directory");
  rep->add_option("--ride", rep_ride, "trace file for time-series tables");
  rep->add_flag("--pdr", rep_pdr, "emit the PDR-vs-distance table");
  add_common(rep, rep_opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      merge_config(sim_opts);
      return cmd_simulate(sim_corpus, sim_scenario, sim_out, sim_opts);
    }
    if (feat->parsed()) {
      merge_config(feat_opts);
      return cmd_features(feat_corpus, feat_out, feat_opts);
    }
    if (train->parsed()) {
      merge_config(train_opts);
      return cmd_train(train_corpus, train_model, train_metrics, train_opts);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_corpus, eval_model, eval_metrics);
    }
    if (base->parsed()) {
      merge_config(base_opts);
      return cmd_baseline(base_corpus, base_metrics, base_opts);
    }
    if (rep->parsed()) {
      merge_config(rep_opts);
      return cmd_report(rep_metrics_dir, rep_out, rep_ride, rep_pdr, rep_opts);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
