#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "curbside/classic.hpp"
#include "curbside/rng.hpp"
#include "curbside/types.hpp"

using namespace curbside;
using namespace curbside::ml;

namespace {

ClassicFeatureRow row1(double x, Side label) {
  ClassicFeatureRow r;
  r.values = Eigen::VectorXd::Constant(1, x);
  r.label = label;
  return r;
}

Eigen::VectorXd q1(double x) { return Eigen::VectorXd::Constant(1, x); }

// Two well-separated Gaussian blobs in `dim` dimensions.
std::vector<ClassicFeatureRow> gaussian_blobs(std::uint64_t seed, int per_class,
                                              int dim, double center,
                                              double sigma) {
  auto rng = make_rng(seed, "test/blobs");
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<ClassicFeatureRow> rows;
  for (int c = 0; c < 2; ++c) {
    const double mu = c == 0 ? -center : center;
    for (int i = 0; i < per_class; ++i) {
      ClassicFeatureRow r;
      r.values = Eigen::VectorXd::NullaryExpr(
          dim, [&]() { return mu + noise(rng); });
      r.label = c == 0 ? Side::Left : Side::Right;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("knn majority vote over the nearest rows") {
  const std::vector<ClassicFeatureRow> train = {
      row1(0.0, Side::Left), row1(1.0, Side::Left), row1(2.0, Side::Right),
      row1(10.0, Side::Right), row1(11.0, Side::Right)};

  SUBCASE("k = 1 returns the label of any training point queried exactly") {
    for (const ClassicFeatureRow& r : train) {
      CHECK(knn_classify(train, r.values, 1) == r.label);
    }
  }

  SUBCASE("hand-worked neighbourhoods") {
    // Query 1.4: nearest three are 1.0 (L), 2.0 (R), 0.0 (L).
    CHECK(knn_classify(train, q1(1.4), 3) == Side::Left);
    // Query 9.0: nearest three are 10, 11, 2 -- all Right.
    CHECK(knn_classify(train, q1(9.0), 3) == Side::Right);
    // All five: three Rights outvote two Lefts everywhere.
    CHECK(knn_classify(train, q1(1.4), 5) == Side::Right);
  }

  SUBCASE("equal distances resolve by insertion order") {
    const std::vector<ClassicFeatureRow> rl = {row1(1.0, Side::Right),
                                               row1(-1.0, Side::Left)};
    const std::vector<ClassicFeatureRow> lr = {row1(-1.0, Side::Left),
                                               row1(1.0, Side::Right)};
    CHECK(knn_classify(rl, q1(0.0), 1) == Side::Right);
    CHECK(knn_classify(lr, q1(0.0), 1) == Side::Left);
  }

  SUBCASE("uniform feature scaling preserves every prediction") {
    auto rng = make_rng(7, "test/knn-scale");
    std::uniform_real_distribution<double> u(-3.0, 12.0);
    std::vector<ClassicFeatureRow> scaled = train;
    for (ClassicFeatureRow& r : scaled) r.values *= 3.7;
    for (int i = 0; i < 50; ++i) {
      const double x = u(rng);
      for (int k : {1, 3, 5}) {
        CHECK(knn_classify(train, q1(x), k) ==
              knn_classify(scaled, q1(3.7 * x), k));
      }
    }
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(knn_classify(train, q1(0.0), 2), std::invalid_argument);
    CHECK_THROWS_AS(knn_classify(train, q1(0.0), 0), std::invalid_argument);
    CHECK_THROWS_AS(knn_classify(train, q1(0.0), -3), std::invalid_argument);
    CHECK_THROWS_AS(knn_classify(train, q1(0.0), 7), std::invalid_argument);
    CHECK_THROWS_AS(knn_classify({}, q1(0.0), 1), std::invalid_argument);
    CHECK_THROWS_AS(knn_classify(train, Eigen::VectorXd::Zero(2), 1),
                    std::invalid_argument);
    auto bad = train;
    bad[1].values[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(knn_classify(bad, q1(0.0), 1), std::invalid_argument);
  }
}

TEST_CASE("knn sweep visits the supported odd k values") {
  const auto train = gaussian_blobs(3, 5, 2, 1.5, 0.5);  // 10 rows
  const auto test = gaussian_blobs(4, 4, 2, 1.5, 0.5);

  const auto sweep = knn_sweep(train, test, 3, 15);
  REQUIRE(sweep.size() == 4);  // 3, 5, 7, 9 fit in a 10-row training set
  const int expected_k[] = {3, 5, 7, 9};
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    CHECK(sweep[i].first == expected_k[i]);
    CHECK(sweep[i].second >= 0.0);
    CHECK(sweep[i].second <= 1.0);
  }

  // Each entry is exactly the accuracy of the equivalent direct scoring.
  const double direct = classification_accuracy(
      test, [&](const Eigen::VectorXd& q) { return knn_classify(train, q, 3); });
  CHECK(sweep[0].second == direct);
}

TEST_CASE("decision tree grows exact splits on clean data") {
  SUBCASE("a clean 1D threshold becomes one split with pure leaves") {
    const std::vector<ClassicFeatureRow> train = {
        row1(1.0, Side::Left), row1(2.0, Side::Left), row1(3.0, Side::Right),
        row1(4.0, Side::Right)};
    const DecisionTree tree = dt_fit(train);
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold == 2.5);  // midpoint of 2 and 3
    const auto& left = tree.nodes[tree.nodes[0].left];
    const auto& right = tree.nodes[tree.nodes[0].right];
    CHECK(left.feature == -1);
    CHECK(left.label == Side::Left);
    CHECK(right.feature == -1);
    CHECK(right.label == Side::Right);

    // <= routes left, so the threshold itself classifies Left.
    CHECK(dt_classify(tree, q1(2.5)) == Side::Left);
    CHECK(dt_classify(tree, q1(std::nextafter(2.5, 3.0))) == Side::Right);
    CHECK(dt_classify(tree, q1(-100.0)) == Side::Left);
    CHECK(dt_classify(tree, q1(100.0)) == Side::Right);
  }

  SUBCASE("identical duplicate features split on the lower index") {
    std::vector<ClassicFeatureRow> train;
    for (int i = 0; i < 4; ++i) {
      ClassicFeatureRow r;
      r.values = Eigen::VectorXd::Constant(2, static_cast<double>(i + 1));
      r.label = i < 2 ? Side::Left : Side::Right;
      train.push_back(std::move(r));
    }
    const DecisionTree tree = dt_fit(train);
    REQUIRE(!tree.empty());
    CHECK(tree.nodes[0].feature == 0);
  }

  SUBCASE("pure input collapses to a single leaf") {
    const std::vector<ClassicFeatureRow> train = {row1(1.0, Side::Right),
                                                  row1(5.0, Side::Right)};
    const DecisionTree tree = dt_fit(train);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].feature == -1);
    CHECK(tree.nodes[0].label == Side::Right);
  }

  SUBCASE("max_depth 0 returns the majority leaf, ties toward Left") {
    const std::vector<ClassicFeatureRow> train = {
        row1(1.0, Side::Right), row1(2.0, Side::Left), row1(3.0, Side::Right)};
    const DecisionTree stump = dt_fit(train, 0);
    REQUIRE(stump.nodes.size() == 1);
    CHECK(stump.nodes[0].label == Side::Right);

    const std::vector<ClassicFeatureRow> tied = {row1(1.0, Side::Right),
                                                 row1(2.0, Side::Left)};
    CHECK(dt_fit(tied, 0).nodes[0].label == Side::Left);
  }

  SUBCASE("XOR yields no first split under greedy Gini and stays a leaf") {
    // Neither axis alone reduces impurity, and greedy CART never looks
    // ahead, so the tree degenerates to the tie-broken majority leaf.
    std::vector<ClassicFeatureRow> train;
    const double xs[][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const Side labels[] = {Side::Left, Side::Left, Side::Right, Side::Right};
    for (int i = 0; i < 4; ++i) {
      ClassicFeatureRow r;
      r.values.resize(2);
      r.values << xs[i][0], xs[i][1];
      r.label = labels[i];
      train.push_back(std::move(r));
    }
    const DecisionTree tree = dt_fit(train);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].label == Side::Left);
  }

  SUBCASE("refitting identical data reproduces the identical tree") {
    const auto train = gaussian_blobs(5, 20, 3, 1.0, 0.8);
    const DecisionTree a = dt_fit(train);
    const DecisionTree b = dt_fit(train);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
      CHECK(a.nodes[i].feature == b.nodes[i].feature);
      CHECK(a.nodes[i].threshold == b.nodes[i].threshold);
      CHECK(a.nodes[i].left == b.nodes[i].left);
      CHECK(a.nodes[i].right == b.nodes[i].right);
      CHECK(a.nodes[i].label == b.nodes[i].label);
    }
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(dt_fit({}), std::invalid_argument);
    CHECK_THROWS_AS(dt_fit({row1(1.0, Side::Left)}, -1), std::invalid_argument);
    CHECK_THROWS_AS(dt_classify(DecisionTree{}, q1(0.0)),
                    std::invalid_argument);
    const DecisionTree tree = dt_fit({row1(1.0, Side::Left),
                                      row1(2.0, Side::Left),
                                      row1(3.0, Side::Right)});
    CHECK_THROWS_AS(dt_classify(tree, Eigen::VectorXd::Zero(0)),
                    std::invalid_argument);
  }
}

TEST_CASE("linear SVM standardizes, converges, and signs Right positive") {
  SUBCASE("standardization statistics are the sample mean and std") {
    const std::vector<ClassicFeatureRow> train = {
        row1(1.0, Side::Left), row1(3.0, Side::Left), row1(5.0, Side::Right),
        row1(7.0, Side::Right)};
    const LinearSvm svm = svm_fit(train);
    CHECK(svm.feature_mean(0) == 4.0);
    CHECK(svm.feature_std(0) ==
          doctest::Approx(std::sqrt(20.0 / 3.0)).epsilon(1e-12));
    // Right sits at larger x, so the decision value grows with x.
    CHECK(svm.decision_value(q1(7.0)) > 0.0);
    CHECK(svm.decision_value(q1(1.0)) < 0.0);
    CHECK(svm_classify(svm, q1(7.0)) == Side::Right);
    CHECK(svm_classify(svm, q1(1.0)) == Side::Left);
  }

  SUBCASE("a constant feature is floored, never NaN") {
    std::vector<ClassicFeatureRow> train;
    for (int i = 0; i < 6; ++i) {
      ClassicFeatureRow r;
      r.values.resize(2);
      r.values << (i < 3 ? -1.0 : 1.0), 42.0;
      r.label = i < 3 ? Side::Left : Side::Right;
      train.push_back(std::move(r));
    }
    const LinearSvm svm = svm_fit(train);
    CHECK(svm.feature_std(1) == 1e-8);
    CHECK(std::isfinite(svm.decision_value(train[0].values)));
    CHECK(svm.w.allFinite());
  }

  SUBCASE("fitting is deterministic in the seed") {
    const auto train = gaussian_blobs(9, 15, 3, 1.2, 0.7);
    const LinearSvm a = svm_fit(train);
    const LinearSvm b = svm_fit(train);
    CHECK(a.w == b.w);
    CHECK(a.b == b.b);
    SvmConfig other;
    other.seed = 2;
    CHECK(svm_fit(train, other).w != a.w);
  }

  SUBCASE("affine feature transforms do not change predictions") {
    const auto train = gaussian_blobs(13, 15, 2, 1.5, 0.6);
    auto shifted = train;
    for (ClassicFeatureRow& r : shifted) {
      r.values = 5.0 * r.values + Eigen::VectorXd::Constant(2, 100.0);
    }
    const LinearSvm raw = svm_fit(train);
    const LinearSvm tx = svm_fit(shifted);
    for (const ClassicFeatureRow& r : train) {
      const Eigen::VectorXd moved =
          5.0 * r.values + Eigen::VectorXd::Constant(2, 100.0);
      CHECK(svm_classify(raw, r.values) == svm_classify(tx, moved));
    }
  }

  SUBCASE("config validation") {
    const std::vector<ClassicFeatureRow> train = {row1(0.0, Side::Left),
                                                  row1(1.0, Side::Right)};
    SvmConfig bad;
    bad.lambda = 0.0;
    CHECK_THROWS_AS(svm_fit(train, bad), std::invalid_argument);
    bad = {};
    bad.epochs = 0;
    CHECK_THROWS_AS(svm_fit(train, bad), std::invalid_argument);
    CHECK_THROWS_AS(svm_fit({}, {}), std::invalid_argument);
  }
}

TEST_CASE("all three classifiers separate clean Gaussian blobs") {
  const auto train = gaussian_blobs(21, 40, 4, 1.5, 0.65);
  const auto test = gaussian_blobs(22, 30, 4, 1.5, 0.65);

  const double knn_acc = classification_accuracy(
      test, [&](const Eigen::VectorXd& q) { return knn_classify(train, q, 5); });
  CHECK(knn_acc >= 0.95);

  const DecisionTree tree = dt_fit(train);
  const double dt_acc = classification_accuracy(
      test, [&](const Eigen::VectorXd& q) { return dt_classify(tree, q); });
  CHECK(dt_acc >= 0.95);

  const LinearSvm svm = svm_fit(train);
  const double svm_acc = classification_accuracy(
      test, [&](const Eigen::VectorXd& q) { return svm_classify(svm, q); });
  CHECK(svm_acc >= 0.95);

  // The margin actually separates the class centers with room to spare.
  CHECK(svm.decision_value(Eigen::VectorXd::Constant(4, 1.5)) > 1.0);
  CHECK(svm.decision_value(Eigen::VectorXd::Constant(4, -1.5)) < -1.0);
}

TEST_CASE("classification accuracy scores fractions and rejects empty") {
  const std::vector<ClassicFeatureRow> rows = {
      row1(0.0, Side::Left), row1(1.0, Side::Right), row1(2.0, Side::Right)};
  CHECK(classification_accuracy(
            rows, [&](const Eigen::VectorXd&) { return Side::Right; }) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(classification_accuracy(rows, [&](const Eigen::VectorXd& q) {
          return q(0) < 0.5 ? Side::Left : Side::Right;
        }) == 1.0);
  CHECK_THROWS_AS(
      classification_accuracy({}, [&](const Eigen::VectorXd&) {
        return Side::Left;
      }),
      std::invalid_argument);
}
