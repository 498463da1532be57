#include "curbside/classic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "curbside/rng.hpp"

namespace curbside::ml {

namespace {

void check_rows(const std::vector<ClassicFeatureRow>& rows,
                const char* where) {
  if (rows.empty()) {
    throw std::invalid_argument(std::string(where) + ": empty training set");
  }
  const Eigen::Index dim = rows.front().values.size();
  for (const ClassicFeatureRow& row : rows) {
    if (row.values.size() != dim) {
      throw std::invalid_argument(std::string(where) +
                                  ": inconsistent feature dimensions");
    }
    if (!row.values.allFinite()) {
      throw std::invalid_argument(std::string(where) +
                                  ": non-finite feature value");
    }
  }
}

}  // namespace

Side knn_classify(const std::vector<ClassicFeatureRow>& train,
                  const Eigen::VectorXd& query, int k) {
  check_rows(train, "knn_classify");
  if (k < 1 || k % 2 == 0) {
    throw std::invalid_argument("knn_classify: k must be a positive odd number");
  }
  if (static_cast<std::size_t>(k) > train.size()) {
    throw std::invalid_argument("knn_classify: k exceeds training-set size");
  }
  if (query.size() != train.front().values.size()) {
    throw std::invalid_argument("knn_classify: query dimension mismatch");
  }

  std::vector<std::pair<double, int>> by_distance;
  by_distance.reserve(train.size());
  for (int i = 0; i < static_cast<int>(train.size()); ++i) {
    by_distance.emplace_back((train[i].values - query).squaredNorm(), i);
  }
  std::partial_sort(by_distance.begin(), by_distance.begin() + k,
                    by_distance.end());

  int right_votes = 0;
  for (int i = 0; i < k; ++i) {
    if (train[by_distance[i].second].label == Side::Right) ++right_votes;
  }
  return 2 * right_votes > k ? Side::Right : Side::Left;
}

std::vector<std::pair<int, double>> knn_sweep(
    const std::vector<ClassicFeatureRow>& train,
    const std::vector<ClassicFeatureRow>& test, int k_min, int k_max) {
  std::vector<std::pair<int, double>> result;
  for (int k = k_min; k <= k_max; ++k) {
    if (k % 2 == 0 || static_cast<std::size_t>(k) > train.size()) continue;
    const double acc = classification_accuracy(
        test, [&](const Eigen::VectorXd& q) { return knn_classify(train, q, k); });
    result.emplace_back(k, acc);
  }
  return result;
}

namespace {

double gini(int n_left_label, int n_total) {
  if (n_total == 0) return 0.0;
  const double p = static_cast<double>(n_left_label) / n_total;
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

Side majority_label(const std::vector<ClassicFeatureRow>& rows,
                    const std::vector<int>& idx) {
  int left = 0;
  for (int i : idx) {
    if (rows[i].label == Side::Left) ++left;
  }
  return 2 * left >= static_cast<int>(idx.size()) ? Side::Left : Side::Right;
}

struct BestSplit {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

BestSplit find_split(const std::vector<ClassicFeatureRow>& rows,
                     const std::vector<int>& idx) {
  const int n = static_cast<int>(idx.size());
  int parent_left = 0;
  for (int i : idx) {
    if (rows[i].label == Side::Left) ++parent_left;
  }
  const double parent_gini = gini(parent_left, n);

  BestSplit best;
  const int dim = static_cast<int>(rows[idx[0]].values.size());
  std::vector<std::pair<double, int>> order(idx.size());
  for (int f = 0; f < dim; ++f) {
    for (int i = 0; i < n; ++i) {
      order[i] = {rows[idx[i]].values[f], idx[i]};
    }
    std::sort(order.begin(), order.end());

    // Sweep candidate thresholds at midpoints between distinct values,
    // maintaining the left-partition label count incrementally.
    int left_count = 0;
    int left_label_left = 0;
    for (int i = 0; i + 1 < n; ++i) {
      ++left_count;
      if (rows[order[i].second].label == Side::Left) ++left_label_left;
      if (order[i].first == order[i + 1].first) continue;

      const double threshold =
          order[i].first + 0.5 * (order[i + 1].first - order[i].first);
      const int right_count = n - left_count;
      const double weighted =
          (left_count * gini(left_label_left, left_count) +
           right_count * gini(parent_left - left_label_left, right_count)) /
          n;
      const double gain = parent_gini - weighted;
      const bool better =
          gain > best.gain + 1e-15 ||
          (std::abs(gain - best.gain) <= 1e-15 && best.feature >= 0 &&
           (f < best.feature ||
            (f == best.feature && threshold < best.threshold)));
      if (better && gain > 1e-12) {
        best = {gain, f, threshold};
      }
    }
  }
  return best;
}

int grow(const std::vector<ClassicFeatureRow>& rows, std::vector<int> idx,
         int depth, int max_depth, DecisionTree& tree) {
  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes[node_id].label = majority_label(rows, idx);

  const bool pure = std::all_of(idx.begin(), idx.end(), [&](int i) {
    return rows[i].label == rows[idx[0]].label;
  });
  if (pure || depth >= max_depth || idx.size() < 2) return node_id;

  const BestSplit split = find_split(rows, idx);
  if (split.feature < 0) return node_id;

  std::vector<int> left_idx;
  std::vector<int> right_idx;
  for (int i : idx) {
    (rows[i].values[split.feature] <= split.threshold ? left_idx : right_idx)
        .push_back(i);
  }
  if (left_idx.empty() || right_idx.empty()) return node_id;

  tree.nodes[node_id].feature = split.feature;
  tree.nodes[node_id].threshold = split.threshold;
  const int left_child =
      grow(rows, std::move(left_idx), depth + 1, max_depth, tree);
  tree.nodes[node_id].left = left_child;
  const int right_child =
      grow(rows, std::move(right_idx), depth + 1, max_depth, tree);
  tree.nodes[node_id].right = right_child;
  return node_id;
}

}  // namespace

DecisionTree dt_fit(const std::vector<ClassicFeatureRow>& train,
                    int max_depth) {
  check_rows(train, "dt_fit");
  if (max_depth < 0) {
    throw std::invalid_argument("dt_fit: max_depth must be non-negative");
  }
  std::vector<int> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  DecisionTree tree;
  grow(train, std::move(idx), 0, max_depth, tree);
  return tree;
}

Side dt_classify(const DecisionTree& tree, const Eigen::VectorXd& query) {
  if (tree.empty()) {
    throw std::invalid_argument("dt_classify: empty tree");
  }
  int node = 0;
  while (tree.nodes[node].feature >= 0) {
    const DecisionTree::Node& n = tree.nodes[node];
    if (n.feature >= query.size()) {
      throw std::invalid_argument("dt_classify: query dimension mismatch");
    }
    node = query[n.feature] <= n.threshold ? n.left : n.right;
  }
  return tree.nodes[node].label;
}

double LinearSvm::decision_value(const Eigen::VectorXd& query) const {
  if (query.size() != w.size()) {
    throw std::invalid_argument("LinearSvm: query dimension mismatch");
  }
  const Eigen::VectorXd z =
      (query - feature_mean).cwiseQuotient(feature_std);
  return w.dot(z) + b;
}

LinearSvm svm_fit(const std::vector<ClassicFeatureRow>& train,
                  const SvmConfig& cfg) {
  check_rows(train, "svm_fit");
  if (cfg.lambda <= 0.0 || cfg.epochs < 1) {
    throw std::invalid_argument("svm_fit: invalid config");
  }
  const int n = static_cast<int>(train.size());
  const int dim = static_cast<int>(train.front().values.size());

  LinearSvm svm;
  svm.feature_mean = Eigen::VectorXd::Zero(dim);
  for (const ClassicFeatureRow& row : train) svm.feature_mean += row.values;
  svm.feature_mean /= n;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  for (const ClassicFeatureRow& row : train) {
    var += (row.values - svm.feature_mean).array().square().matrix();
  }
  var /= std::max(n - 1, 1);
  svm.feature_std = var.array().sqrt().max(1e-8).matrix();

  Eigen::MatrixXd z(n, dim);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    z.row(i) = (train[i].values - svm.feature_mean)
                   .cwiseQuotient(svm.feature_std)
                   .transpose();
    y[i] = train[i].label == Side::Right ? 1.0 : -1.0;
  }

  svm.w = Eigen::VectorXd::Zero(dim);
  svm.b = 0.0;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  long t = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto rng = make_rng(cfg.seed, "svm/order", static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rng);
    for (int i : order) {
      ++t;
      const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
      const double margin = y[i] * (svm.w.dot(z.row(i)) + svm.b);
      svm.w *= 1.0 - eta * cfg.lambda;
      if (margin < 1.0) {
        svm.w += eta * y[i] * z.row(i).transpose();
        svm.b += eta * cfg.lambda * y[i];
      }
    }
  }
  return svm;
}

Side svm_classify(const LinearSvm& svm, const Eigen::VectorXd& query) {
  return svm.decision_value(query) > 0.0 ? Side::Right : Side::Left;
}

}  // namespace curbside::ml
