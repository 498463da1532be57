#pragma once
// Window-level baseline classifiers over fixed-length feature rows: k-nearest
// neighbours, a CART decision tree with Gini impurity, and a linear SVM
// trained with Pegasos-style subgradient descent on the hinge loss. All three
// are deterministic for a fixed seed and have no external dependencies.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "curbside/types.hpp"

namespace curbside::ml {

// One window summarised as a fixed-length real vector plus its label.
struct ClassicFeatureRow {
  Eigen::VectorXd values;
  Side label = Side::Left;
};

// Majority label of the k nearest training rows by Euclidean distance.
// Neighbour order is (distance, insertion index), so duplicate distances
// resolve toward the earlier row and the result is deterministic. k must be
// odd (binary majority can never tie) and at most the training-set size.
Side knn_classify(const std::vector<ClassicFeatureRow>& train,
                  const Eigen::VectorXd& query, int k);

// Accuracy of knn_classify over `test` for every odd k in [k_min, k_max]
// that the training set supports. Returns (k, accuracy) pairs.
std::vector<std::pair<int, double>> knn_sweep(
    const std::vector<ClassicFeatureRow>& train,
    const std::vector<ClassicFeatureRow>& test, int k_min = 3, int k_max = 15);

// CART decision tree. Internal nodes route query[feature] <= threshold to
// the left child; leaves carry a majority label (ties break toward Left).
struct DecisionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Side label = Side::Left;
  };
  std::vector<Node> nodes;  // nodes[0] is the root

  bool empty() const { return nodes.empty(); }
};

// Grows the tree greedily by maximal Gini-impurity gain. Split ties resolve
// to the lower feature index, then the lower threshold, so refitting the
// same data always yields the same tree. Growth stops at max_depth, on pure
// nodes, or when no split improves impurity.
DecisionTree dt_fit(const std::vector<ClassicFeatureRow>& train,
                    int max_depth = 6);
Side dt_classify(const DecisionTree& tree, const Eigen::VectorXd& query);

// Linear max-margin classifier on internally standardized features.
// Decision value w . standardize(x) + b; positive means Right.
struct LinearSvm {
  Eigen::VectorXd w;
  double b = 0.0;
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_std;  // floored so constant features stay finite

  double decision_value(const Eigen::VectorXd& query) const;
};

struct SvmConfig {
  double lambda = 1e-3;  // regularization strength
  int epochs = 60;
  std::uint64_t seed = 1;
};

// Pegasos subgradient descent on the hinge loss with step 1/(lambda * t).
// Left maps to -1 and Right to +1; the bias is unregularized and only moves
// on margin violations. Example order reshuffles each epoch from the seed.
LinearSvm svm_fit(const std::vector<ClassicFeatureRow>& train,
                  const SvmConfig& cfg = {});
Side svm_classify(const LinearSvm& svm, const Eigen::VectorXd& query);

// Fraction of rows whose prediction matches the label; empty input is an
// error (there is nothing to score).
template <typename Classifier>
double classification_accuracy(const std::vector<ClassicFeatureRow>& rows,
                               Classifier&& classify) {
  if (rows.empty()) {
    throw std::invalid_argument("classification_accuracy: no rows");
  }
  int correct = 0;
  for (const ClassicFeatureRow& row : rows) {
    if (classify(row.values) == row.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

}  // namespace curbside::ml
