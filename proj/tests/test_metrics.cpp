#include <doctest.h>

#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curbside/metrics.hpp"
#include "curbside/rng.hpp"
#include "curbside/types.hpp"

using namespace curbside;

TEST_CASE("a perfect predictor scores one everywhere") {
  std::vector<PredictionRecord> records;
  for (Condition c : all_conditions()) {
    records.push_back({Side::Left, Side::Left, c});
    records.push_back({Side::Right, Side::Right, c});
  }
  const Metrics m = evaluate_predictions(records);
  CHECK(m.n_windows == 10);
  CHECK(m.n_correct == 10);
  CHECK(m.accuracy == 1.0);
  CHECK(m.per_condition.size() == 5);
  for (const auto& [cond, acc] : m.per_condition) {
    CHECK(acc == 1.0);
    CHECK(m.per_condition_count.at(cond) == 2);
  }
  CHECK(m.confusion[0][0] == 5);
  CHECK(m.confusion[0][1] == 0);
  CHECK(m.confusion[1][0] == 0);
  CHECK(m.confusion[1][1] == 5);
}

TEST_CASE("a constant predictor on a balanced set scores one half") {
  std::vector<PredictionRecord> records;
  for (int i = 0; i < 20; ++i) {
    records.push_back({i % 2 == 0 ? Side::Left : Side::Right, Side::Right,
                       Condition::OnlyRider});
  }
  const Metrics m = evaluate_predictions(records);
  CHECK(m.accuracy == 0.5);
  CHECK(m.confusion[0][0] == 0);
  CHECK(m.confusion[0][1] == 10);  // every Left mislabelled Right
  CHECK(m.confusion[1][1] == 10);
}

TEST_CASE("hand-worked mixed tally") {
  const std::vector<PredictionRecord> records = {
      {Side::Left, Side::Left, Condition::OnlyRider},
      {Side::Left, Side::Right, Condition::OnlyRider},
      {Side::Right, Side::Right, Condition::TwoCars},
      {Side::Right, Side::Right, Condition::TwoCars},
      {Side::Right, Side::Left, Condition::TwoCars},
  };
  const Metrics m = evaluate_predictions(records);
  CHECK(m.n_windows == 5);
  CHECK(m.n_correct == 3);
  CHECK(m.accuracy == 0.6);
  CHECK(m.per_condition.at(std::string(to_string(Condition::OnlyRider))) ==
        0.5);
  CHECK(m.per_condition.at(std::string(to_string(Condition::TwoCars))) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(m.per_condition_count.at(std::string(to_string(Condition::TwoCars))) ==
        3);
  CHECK(m.confusion[0][0] == 1);
  CHECK(m.confusion[0][1] == 1);
  CHECK(m.confusion[1][0] == 1);
  CHECK(m.confusion[1][1] == 2);
}

TEST_CASE("random records agree with an independent recount") {
  auto rng = make_rng(7, "test/metrics-recount");
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> cond(0, 4);
  std::vector<PredictionRecord> records;
  for (int i = 0; i < 500; ++i) {
    records.push_back({coin(rng) == 0 ? Side::Left : Side::Right,
                       coin(rng) == 0 ? Side::Left : Side::Right,
                       all_conditions()[cond(rng)]});
  }
  const Metrics m = evaluate_predictions(records);

  int correct = 0;
  int conf[2][2] = {{0, 0}, {0, 0}};
  std::map<std::string, int> total_by_cond;
  std::map<std::string, int> correct_by_cond;
  for (const PredictionRecord& r : records) {
    const std::string c{to_string(r.condition)};
    ++total_by_cond[c];
    ++conf[r.actual == Side::Right][r.predicted == Side::Right];
    if (r.actual == r.predicted) {
      ++correct;
      ++correct_by_cond[c];
    }
  }
  CHECK(m.n_windows == 500);
  CHECK(m.n_correct == correct);
  CHECK(m.accuracy == static_cast<double>(correct) / 500.0);
  for (int a = 0; a < 2; ++a) {
    for (int p = 0; p < 2; ++p) CHECK(m.confusion[a][p] == conf[a][p]);
  }
  REQUIRE(m.per_condition_count.size() == total_by_cond.size());
  for (const auto& [c, n] : total_by_cond) {
    CHECK(m.per_condition_count.at(c) == n);
    CHECK(m.per_condition.at(c) ==
          static_cast<double>(correct_by_cond[c]) / n);
  }

  // The confusion matrix partitions the records.
  CHECK(m.confusion[0][0] + m.confusion[0][1] + m.confusion[1][0] +
            m.confusion[1][1] ==
        m.n_windows);
  CHECK(m.confusion[0][0] + m.confusion[1][1] == m.n_correct);
}

TEST_CASE("empty record sets are an error") {
  CHECK_THROWS_AS(evaluate_predictions({}), std::invalid_argument);
}

TEST_CASE("JSON serialization round-trips and validates its schema") {
  const std::vector<PredictionRecord> records = {
      {Side::Left, Side::Left, Condition::TwoPeople},
      {Side::Right, Side::Left, Condition::PeopleBothSides},
      {Side::Right, Side::Right, Condition::TwoPeople},
  };
  const Metrics m = evaluate_predictions(records);
  const nlohmann::json j = metrics_to_json(m);

  CHECK(j.at("schema_version") == 1);
  CHECK(!j.contains("timestamp"));  // identical runs stay byte-identical
  CHECK(j.at("confusion").at("right_as_left") == 1);

  const Metrics back = metrics_from_json(j);
  CHECK(back.n_windows == m.n_windows);
  CHECK(back.n_correct == m.n_correct);
  CHECK(back.accuracy == m.accuracy);
  CHECK(back.per_condition == m.per_condition);
  CHECK(back.per_condition_count == m.per_condition_count);
  CHECK(back.confusion == m.confusion);

  // Serializing the round-tripped struct is byte-identical.
  CHECK(metrics_to_json(back).dump(2) == j.dump(2));

  nlohmann::json wrong = j;
  wrong["schema_version"] = 2;
  CHECK_THROWS_AS(metrics_from_json(wrong), std::invalid_argument);
  CHECK_THROWS_AS(metrics_from_json(nlohmann::json::object()),
                  std::invalid_argument);
  nlohmann::json missing = j;
  missing.erase("confusion");
  CHECK_THROWS(metrics_from_json(missing));
}
