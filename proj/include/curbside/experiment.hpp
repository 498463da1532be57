#pragma once
// End-to-end experiment orchestration shared by the CLI and the acceptance
// suite: corpus loading and windowing, ride-level splits, feature pipeline
// fitting, LSTM training/evaluation, classical classifiers on the same
// features, and the simpler phase/RSS/amplitude baselines.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "curbside/classic.hpp"
#include "curbside/features.hpp"
#include "curbside/lstm.hpp"
#include "curbside/metrics.hpp"
#include "curbside/model_io.hpp"
#include "curbside/split.hpp"

namespace curbside {

// Bundle of defaults that trade fidelity against runtime. "desk" finishes a
// full train/eval cycle in minutes on one core; "paper" mirrors the
// reference configuration (hidden 256, 650 epochs, 3 s windows).
struct ExperimentProfile {
  std::string name = "desk";
  int hidden_dim = 32;
  int n_layers = 3;
  double dropout_p = 0.5;
  FeatureConfig features;
  ml::TrainConfig train;
  double window_s = 2.0;
  double stride_s = 0.5;

  static ExperimentProfile desk();
  static ExperimentProfile paper_scale();
  // "desk" or "paper"; anything else is an error.
  static ExperimentProfile named(const std::string& name);
};

struct WindowSet {
  std::vector<Window> train;
  std::vector<Window> val;
  std::vector<Window> test;
  DatasetSplit split;
};

// Loads every ride in the manifest, slices it into windows, and buckets the
// windows by the ride-level split so test windows never share a ride with
// training windows.
WindowSet load_windows(const std::filesystem::path& corpus_dir,
                       double window_s, double stride_s,
                       std::uint64_t split_seed);

struct SequenceSet {
  FeaturePipeline pipeline;  // fitted on the training windows only
  std::vector<FeatureSequence> train_x, val_x, test_x;
  std::vector<Side> train_y, val_y, test_y;
  std::vector<Condition> train_cond, val_cond, test_cond;
};

SequenceSet transform_windows(const WindowSet& ws,
                              const FeatureConfig& config);

// Metrics of an arbitrary predictor over parallel sequence/label/condition
// vectors.
template <typename Predict>
Metrics evaluate_sequences(const std::vector<FeatureSequence>& xs,
                           const std::vector<Side>& ys,
                           const std::vector<Condition>& conds,
                           Predict&& predict) {
  std::vector<PredictionRecord> records(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    records[i] = {ys[i], predict(xs[i]), conds[i]};
  }
  return evaluate_predictions(records);
}

struct LstmRunResult {
  ModelBundle bundle;
  ml::TrainResult training;
  Metrics test_metrics;
  int n_train_windows = 0;
  int n_val_windows = 0;
  int n_test_windows = 0;
};

// Full pipeline: split -> fit features -> train -> test metrics. Randomness
// fans out from `seed` through named streams (split / init / train), so two
// calls with the same inputs produce identical results.
LstmRunResult run_lstm_experiment(const std::filesystem::path& corpus_dir,
                                  const ExperimentProfile& profile,
                                  std::uint64_t seed);

// Re-evaluates a stored bundle on the test split it was trained against
// (recomputed from the manifest and the stored split seed).
Metrics evaluate_bundle(const std::filesystem::path& corpus_dir,
                        const ModelBundle& bundle);

struct ClassicRunResult {
  double knn_accuracy = 0.0;  // best over the k sweep
  int knn_k = 0;
  double dt_accuracy = 0.0;
  double svm_accuracy = 0.0;
  std::vector<std::pair<int, double>> knn_by_k;
};

// kNN / decision tree / SVM over the per-window mean of the same normalized
// feature rows the LSTM consumes.
ClassicRunResult run_classic_on_sequences(const SequenceSet& seqs,
                                          std::uint64_t seed);

// Simple per-window feature families predating the sequence model. Variant
// names: phase_mean_all, phase_mean_first, phase_votes, phase_effective,
// rss_mean, amp_mean_all, amp_mean_first, amp_mean_all_rss,
// amp_mean_first_rss.
std::vector<std::string> baseline_variant_names();
std::string baseline_family(const std::string& variant);
Eigen::VectorXd baseline_feature_row(const Window& window,
                                     const std::string& variant,
                                     std::pair<int, int> antenna_pair);

struct BaselineVariantResult {
  std::string name;
  std::string family;  // "phase", "rss", or "amplitude"
  double knn_accuracy = 0.0;
  int knn_k = 0;
  double dt_accuracy = 0.0;
  double svm_accuracy = 0.0;
  double best_accuracy = 0.0;  // max over the three classifiers
};

struct BaselineOutcome {
  std::vector<BaselineVariantResult> variants;
  double best_phase = 0.0;
  double best_rss = 0.0;
  double best_amplitude = 0.0;
};

// Evaluates every baseline variant with all three classical classifiers on
// the window split and reports the best accuracy per family.
BaselineOutcome run_baseline_experiment(const WindowSet& ws,
                                        std::pair<int, int> antenna_pair,
                                        std::uint64_t seed);

}  // namespace curbside
