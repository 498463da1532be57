#pragma once
// CSI feature extraction: per-subcarrier amplitude differences between the
// antenna pair, variance-based subcarrier selection, a two-path multipath
// profile from the 2x2 signal covariance, power delay profiles via inverse
// DFT, PCA compression of the PDP, and z-normalization. A fitted
// FeaturePipeline turns a window into a fixed-shape sequence for the
// classifier.

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "curbside/types.hpp"

namespace curbside {

// |csi[right][k]| - |csi[left][k]| for every subcarrier. Positive values
// mean the right antenna hears the stronger signal, i.e. the rider is on
// the vehicle's right.
std::vector<double> amplitude_difference(const CsiPacket& packet,
                                         std::pair<int, int> antenna_pair);

// Variance-based subcarrier selection. Scores subcarrier i by the summed
// covariance of its amplitude series (reference antenna) with every other
// subcarrier across the window's packets, keeps the n-1 highest-scoring
// indices from 1..n_sub-1, and always includes subcarrier 0 as the anchor.
// Returns indices in ascending order. A window with fewer than two packets
// cannot support a covariance estimate; selection falls back to the first n
// indices and sets *degenerate when provided.
std::vector<int> vbss_select(const Window& window, int n, int ref_antenna,
                             bool* degenerate = nullptr);

// Eigen-decomposition of the 2x2 covariance of the antenna-pair CSI rows.
// eig1 >= eig2 >= 0; ratio = eig1 / max(eig2, 1e-12) capped at 1e6. A large
// ratio means one propagation mode dominates (clean line of sight); values
// near 1 mean two comparable arrivals.
struct MultipathProfile {
  double eig1 = 0.0;
  double eig2 = 0.0;
  double ratio = 0.0;
};
MultipathProfile multipath_profile(const CsiPacket& packet,
                                   std::pair<int, int> antenna_pair);

// Per-antenna inverse DFT of the CSI row (1/N scaling); tap magnitudes of
// both antennas concatenated, so 2 * n_sub values. Energy obeys Parseval:
// sum of squared taps per antenna = mean squared CFR magnitude.
std::vector<double> power_delay_profile(const CsiPacket& packet,
                                        std::pair<int, int> antenna_pair);

// PCA basis over PDP rows. Components are unit-norm, mutually orthogonal
// columns, each flipped so its largest-magnitude coordinate is positive.
struct PdpBasis {
  Eigen::VectorXd mean;        // length 2 * n_sub
  Eigen::MatrixXd components;  // (2 * n_sub) x m_effective
  Eigen::VectorXd eigenvalues; // top m_effective, descending
  double total_variance = 0.0;
  bool rank_deficient = false; // true when fewer than m usable directions

  int dim() const { return static_cast<int>(components.cols()); }
  Eigen::VectorXd project(const Eigen::VectorXd& row) const;
  std::vector<double> explained_variance_ratio() const;
};

// Requires at least m + 1 rows; keeps min(m, usable rank) components and
// flags rank deficiency instead of fabricating noise directions.
PdpBasis fit_pdp_pca(const Eigen::MatrixXd& rows, int m);

// Per-dimension z-normalization fitted on training data only. Standard
// deviations are floored at 1e-8 so constant features stay finite.
struct NormalizationStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_dev;

  static NormalizationStats fit(const Eigen::MatrixXd& rows);
  Eigen::VectorXd normalize(const Eigen::VectorXd& row) const;
  Eigen::VectorXd denormalize(const Eigen::VectorXd& row) const;
};

// Lower median of per-window packet counts; the sequence length the
// classifier pads or truncates to.
int median_sequence_length(const std::vector<Window>& windows);

struct FeatureConfig {
  int n_sub = 14;      // selected subcarriers (amplitude differences)
  int m_pdp = 3;       // PCA components of the PDP; 0 disables
  bool use_mp = true;  // include the multipath eigenvalue ratio
  int ref_antenna = 1;
  std::pair<int, int> antenna_pair{0, 1};
  int l_override = 0;  // fixed sequence length; 0 derives it from training
  int l_cap = 0;       // upper bound on the derived length; 0 disables

  int feature_dim() const { return n_sub + m_pdp + (use_mp ? 1 : 0); }
};

// One window as the classifier sees it: valid_len feature rows followed by
// zero padding up to the fitted sequence length.
struct FeatureSequence {
  Eigen::MatrixXd steps;  // L x feature_dim, rows past valid_len are zero
  int valid_len = 0;
};

struct FeaturePipeline {
  FeatureConfig config;
  int sequence_len = 0;
  PdpBasis basis;  // empty when config.m_pdp == 0
  NormalizationStats stats;

  static FeaturePipeline fit(const std::vector<Window>& train_windows,
                             const FeatureConfig& config);
  FeatureSequence transform(const Window& window) const;

  nlohmann::json to_json() const;
  static FeaturePipeline from_json(const nlohmann::json& j);
};

// Raw (unnormalized) per-packet feature rows of one window; shared by
// pipeline fitting and transform. Rows: selected amplitude differences,
// then PDP PCA coordinates, then the multipath ratio.
Eigen::MatrixXd raw_feature_rows(const Window& window,
                                 const FeatureConfig& config,
                                 const PdpBasis& basis);

// Mean over the valid steps of each sequence; the summary row consumed by
// the classical classifiers. Zero-length sequences yield a zero row.
Eigen::MatrixXd mean_feature_rows(const std::vector<FeatureSequence>& seqs);

}  // namespace curbside
