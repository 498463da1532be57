#include "curbside/metrics.hpp"

#include <stdexcept>

namespace curbside {

Metrics evaluate_predictions(const std::vector<PredictionRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("evaluate_predictions: empty test set");
  }
  Metrics m;
  std::map<std::string, int> correct_by_condition;
  for (const PredictionRecord& r : records) {
    ++m.n_windows;
    const int a = r.actual == Side::Left ? 0 : 1;
    const int p = r.predicted == Side::Left ? 0 : 1;
    ++m.confusion[a][p];
    const std::string cond{to_string(r.condition)};
    ++m.per_condition_count[cond];
    if (r.actual == r.predicted) {
      ++m.n_correct;
      ++correct_by_condition[cond];
    }
  }
  m.accuracy = static_cast<double>(m.n_correct) / m.n_windows;
  for (const auto& [cond, count] : m.per_condition_count) {
    m.per_condition[cond] =
        static_cast<double>(correct_by_condition[cond]) / count;
  }
  return m;
}

nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["n_windows"] = m.n_windows;
  j["n_correct"] = m.n_correct;
  j["accuracy"] = m.accuracy;
  j["per_condition"] = m.per_condition;
  j["per_condition_count"] = m.per_condition_count;
  j["confusion"] = {{"left_as_left", m.confusion[0][0]},
                    {"left_as_right", m.confusion[0][1]},
                    {"right_as_left", m.confusion[1][0]},
                    {"right_as_right", m.confusion[1][1]}};
  return j;
}

Metrics metrics_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != 1) {
    throw std::invalid_argument("metrics_from_json: unsupported schema");
  }
  Metrics m;
  m.n_windows = j.at("n_windows").get<int>();
  m.n_correct = j.at("n_correct").get<int>();
  m.accuracy = j.at("accuracy").get<double>();
  m.per_condition = j.at("per_condition").get<std::map<std::string, double>>();
  m.per_condition_count =
      j.at("per_condition_count").get<std::map<std::string, int>>();
  const nlohmann::json& c = j.at("confusion");
  m.confusion[0][0] = c.at("left_as_left").get<int>();
  m.confusion[0][1] = c.at("left_as_right").get<int>();
  m.confusion[1][0] = c.at("right_as_left").get<int>();
  m.confusion[1][1] = c.at("right_as_right").get<int>();
  return m;
}

}  // namespace curbside
