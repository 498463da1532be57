#pragma once
// Window-level evaluation: overall accuracy, per-condition accuracy, and a
// 2x2 confusion matrix, serialized to a versioned JSON schema with no
// timestamps so identical runs produce byte-identical files.

#include <array>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curbside/types.hpp"

namespace curbside {

struct PredictionRecord {
  Side actual = Side::Left;
  Side predicted = Side::Left;
  Condition condition = Condition::OnlyRider;
};

struct Metrics {
  int n_windows = 0;
  int n_correct = 0;
  double accuracy = 0.0;
  // accuracy per condition, keyed by condition name (sorted by map order)
  std::map<std::string, double> per_condition;
  std::map<std::string, int> per_condition_count;
  // confusion[actual][predicted], index 0 = Left, 1 = Right
  std::array<std::array<int, 2>, 2> confusion{{{0, 0}, {0, 0}}};
};

// Tallies records into Metrics. An empty record set is an error: accuracy
// over nothing is undefined.
Metrics evaluate_predictions(const std::vector<PredictionRecord>& records);

nlohmann::json metrics_to_json(const Metrics& m);
Metrics metrics_from_json(const nlohmann::json& j);

}  // namespace curbside
