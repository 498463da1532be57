#include "curbside/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "curbside/json_util.hpp"

namespace curbside {

namespace {

constexpr double kEigFloor = 1e-12;
constexpr double kRatioCap = 1e6;
constexpr double kStdFloor = 1e-8;

void check_pair(const CsiPacket& packet, std::pair<int, int> pair) {
  const int n = packet.n_ant();
  if (pair.first < 0 || pair.first >= n || pair.second < 0 ||
      pair.second >= n || pair.first == pair.second) {
    throw std::invalid_argument("antenna pair out of range");
  }
}

}  // namespace

std::vector<double> amplitude_difference(const CsiPacket& packet,
                                         std::pair<int, int> antenna_pair) {
  check_pair(packet, antenna_pair);
  const auto& left = packet.csi[antenna_pair.first];
  const auto& right = packet.csi[antenna_pair.second];
  std::vector<double> out(left.size());
  for (std::size_t k = 0; k < left.size(); ++k) {
    out[k] = std::abs(right[k]) - std::abs(left[k]);
  }
  return out;
}

std::vector<int> vbss_select(const Window& window, int n, int ref_antenna,
                             bool* degenerate) {
  if (window.packets.empty()) {
    throw std::invalid_argument("vbss_select: window has no packets");
  }
  const int n_sub = window.packets.front().n_sub();
  if (n < 1 || n > n_sub) {
    throw std::invalid_argument("vbss_select: n out of range");
  }
  if (ref_antenna < 0 || ref_antenna >= window.packets.front().n_ant()) {
    throw std::invalid_argument("vbss_select: ref_antenna out of range");
  }
  if (degenerate) *degenerate = false;

  const int n_pkts = static_cast<int>(window.packets.size());
  if (n_pkts < 2) {
    if (degenerate) *degenerate = true;
    std::vector<int> fallback(n);
    std::iota(fallback.begin(), fallback.end(), 0);
    return fallback;
  }

  Eigen::MatrixXd amps(n_pkts, n_sub);
  for (int p = 0; p < n_pkts; ++p) {
    const auto& row = window.packets[p].csi[ref_antenna];
    for (int k = 0; k < n_sub; ++k) amps(p, k) = std::abs(row[k]);
  }
  const Eigen::RowVectorXd mean = amps.colwise().mean();
  amps.rowwise() -= mean;
  const Eigen::MatrixXd cov =
      amps.transpose() * amps / static_cast<double>(n_pkts - 1);

  // Score a subcarrier by how strongly it co-varies with the rest of the
  // band; self-variance is excluded so a lone noisy subcarrier scores low.
  std::vector<std::pair<double, int>> scored;
  scored.reserve(n_sub - 1);
  for (int i = 1; i < n_sub; ++i) {
    const double score = cov.row(i).sum() - cov(i, i);
    scored.emplace_back(score, i);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  std::vector<int> selected{0};
  for (int i = 0; i < n - 1; ++i) selected.push_back(scored[i].second);
  std::sort(selected.begin(), selected.end());
  return selected;
}

MultipathProfile multipath_profile(const CsiPacket& packet,
                                   std::pair<int, int> antenna_pair) {
  check_pair(packet, antenna_pair);
  const auto& a = packet.csi[antenna_pair.first];
  const auto& b = packet.csi[antenna_pair.second];
  Eigen::Matrix2cd gram = Eigen::Matrix2cd::Zero();
  for (std::size_t k = 0; k < a.size(); ++k) {
    gram(0, 0) += a[k] * std::conj(a[k]);
    gram(0, 1) += a[k] * std::conj(b[k]);
    gram(1, 1) += b[k] * std::conj(b[k]);
  }
  gram(1, 0) = std::conj(gram(0, 1));

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("multipath_profile: eigensolver failed");
  }
  MultipathProfile mp;
  mp.eig1 = std::max(solver.eigenvalues()(1), 0.0);
  mp.eig2 = std::max(solver.eigenvalues()(0), 0.0);
  mp.ratio = std::min(mp.eig1 / std::max(mp.eig2, kEigFloor), kRatioCap);
  return mp;
}

std::vector<double> power_delay_profile(const CsiPacket& packet,
                                        std::pair<int, int> antenna_pair) {
  check_pair(packet, antenna_pair);
  const int n_sub = packet.n_sub();
  if (n_sub < 1) throw std::invalid_argument("power_delay_profile: empty CSI");

  thread_local Eigen::FFT<double> fft;
  std::vector<double> out;
  out.reserve(2 * n_sub);
  for (int ant : {antenna_pair.first, antenna_pair.second}) {
    std::vector<ComplexSample> freq(packet.csi[ant].begin(),
                                    packet.csi[ant].end());
    std::vector<ComplexSample> time(n_sub);
    fft.inv(time, freq);  // includes the 1/N factor
    for (const ComplexSample& tap : time) out.push_back(std::abs(tap));
  }
  return out;
}

Eigen::VectorXd PdpBasis::project(const Eigen::VectorXd& row) const {
  return components.transpose() * (row - mean);
}

std::vector<double> PdpBasis::explained_variance_ratio() const {
  std::vector<double> out(eigenvalues.size());
  for (int i = 0; i < eigenvalues.size(); ++i) {
    out[i] = total_variance > 0.0 ? eigenvalues(i) / total_variance : 0.0;
  }
  return out;
}

PdpBasis fit_pdp_pca(const Eigen::MatrixXd& rows, int m) {
  if (m < 1) throw std::invalid_argument("fit_pdp_pca: m must be >= 1");
  if (rows.rows() < m + 1) {
    throw std::invalid_argument("fit_pdp_pca: need at least m + 1 rows");
  }
  const Eigen::Index dim = rows.cols();
  PdpBasis basis;
  basis.mean = rows.colwise().mean();
  Eigen::MatrixXd centered = rows.rowwise() - basis.mean.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(rows.rows() - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("fit_pdp_pca: eigensolver failed");
  }
  // Eigenvalues arrive ascending; walk them from the back.
  const Eigen::VectorXd evals = solver.eigenvalues();
  const double largest = std::max(evals(dim - 1), 0.0);
  basis.total_variance = std::max(evals.sum(), 0.0);

  int usable = 0;
  for (Eigen::Index i = dim - 1; i >= 0; --i) {
    if (evals(i) > largest * 1e-12 && evals(i) > 0.0) ++usable;
  }
  const int keep = std::min(m, std::max(usable, 1));
  basis.rank_deficient = keep < m;

  basis.components.resize(dim, keep);
  basis.eigenvalues.resize(keep);
  for (int i = 0; i < keep; ++i) {
    Eigen::VectorXd v = solver.eigenvectors().col(dim - 1 - i);
    // Deterministic sign: the largest-magnitude coordinate points up.
    Eigen::Index argmax = 0;
    v.cwiseAbs().maxCoeff(&argmax);
    if (v(argmax) < 0.0) v = -v;
    basis.components.col(i) = v;
    basis.eigenvalues(i) = std::max(evals(dim - 1 - i), 0.0);
  }
  return basis;
}

NormalizationStats NormalizationStats::fit(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 1) {
    throw std::invalid_argument("NormalizationStats: no rows");
  }
  NormalizationStats stats;
  stats.mean = rows.colwise().mean();
  if (rows.rows() == 1) {
    stats.std_dev = Eigen::VectorXd::Constant(rows.cols(), kStdFloor);
    return stats;
  }
  Eigen::MatrixXd centered = rows.rowwise() - stats.mean.transpose();
  Eigen::VectorXd var =
      centered.array().square().colwise().sum() /
      static_cast<double>(rows.rows() - 1);
  stats.std_dev = var.array().sqrt().max(kStdFloor);
  return stats;
}

Eigen::VectorXd NormalizationStats::normalize(const Eigen::VectorXd& row) const {
  return (row - mean).cwiseQuotient(std_dev);
}

Eigen::VectorXd NormalizationStats::denormalize(
    const Eigen::VectorXd& row) const {
  return row.cwiseProduct(std_dev) + mean;
}

int median_sequence_length(const std::vector<Window>& windows) {
  if (windows.empty()) {
    throw std::invalid_argument("median_sequence_length: no windows");
  }
  std::vector<std::size_t> counts;
  counts.reserve(windows.size());
  for (const Window& w : windows) counts.push_back(w.packets.size());
  const std::size_t idx = (counts.size() - 1) / 2;  // lower median
  std::nth_element(counts.begin(), counts.begin() + idx, counts.end());
  return static_cast<int>(counts[idx]);
}

Eigen::MatrixXd raw_feature_rows(const Window& window,
                                 const FeatureConfig& config,
                                 const PdpBasis& basis) {
  const int n_pkts = static_cast<int>(window.packets.size());
  const int dim = config.feature_dim();
  Eigen::MatrixXd rows(n_pkts, dim);
  if (n_pkts == 0) return rows;

  const std::vector<int> selected =
      vbss_select(window, config.n_sub, config.ref_antenna);
  for (int p = 0; p < n_pkts; ++p) {
    const CsiPacket& pkt = window.packets[p];
    const std::vector<double> diff =
        amplitude_difference(pkt, config.antenna_pair);
    int col = 0;
    for (int k : selected) rows(p, col++) = diff[k];
    if (config.m_pdp > 0) {
      const std::vector<double> pdp =
          power_delay_profile(pkt, config.antenna_pair);
      const Eigen::VectorXd coords = basis.project(
          Eigen::Map<const Eigen::VectorXd>(pdp.data(), pdp.size()));
      for (int i = 0; i < coords.size(); ++i) rows(p, col++) = coords(i);
    }
    if (config.use_mp) {
      rows(p, col++) = multipath_profile(pkt, config.antenna_pair).ratio;
    }
  }
  return rows;
}

FeaturePipeline FeaturePipeline::fit(const std::vector<Window>& train_windows,
                                     const FeatureConfig& config) {
  if (train_windows.empty()) {
    throw std::invalid_argument("FeaturePipeline::fit: no training windows");
  }
  FeaturePipeline pipeline;
  pipeline.config = config;
  pipeline.sequence_len = config.l_override > 0
                              ? config.l_override
                              : median_sequence_length(train_windows);
  if (config.l_cap > 0) {
    pipeline.sequence_len = std::min(pipeline.sequence_len, config.l_cap);
  }
  if (pipeline.sequence_len < 1) {
    throw std::invalid_argument("FeaturePipeline::fit: sequence length < 1");
  }

  if (config.m_pdp > 0) {
    std::size_t total = 0;
    for (const Window& w : train_windows) total += w.packets.size();
    Eigen::MatrixXd pdp_rows(total, 2 * train_windows.front()
                                         .packets.front()
                                         .n_sub());
    std::size_t r = 0;
    for (const Window& w : train_windows) {
      for (const CsiPacket& pkt : w.packets) {
        const std::vector<double> pdp =
            power_delay_profile(pkt, config.antenna_pair);
        pdp_rows.row(r++) =
            Eigen::Map<const Eigen::RowVectorXd>(pdp.data(), pdp.size());
      }
    }
    pipeline.basis = fit_pdp_pca(pdp_rows, config.m_pdp);
  }

  // Effective PDP dimensionality may be below m_pdp on degenerate data; the
  // feature layout follows the basis actually fitted.
  FeatureConfig effective = config;
  effective.m_pdp = config.m_pdp > 0 ? pipeline.basis.dim() : 0;
  pipeline.config = effective;

  std::size_t total_rows = 0;
  for (const Window& w : train_windows) total_rows += w.packets.size();
  Eigen::MatrixXd all_rows(total_rows, effective.feature_dim());
  std::size_t r = 0;
  for (const Window& w : train_windows) {
    const Eigen::MatrixXd rows = raw_feature_rows(w, effective, pipeline.basis);
    all_rows.middleRows(r, rows.rows()) = rows;
    r += rows.rows();
  }
  pipeline.stats = NormalizationStats::fit(all_rows);
  return pipeline;
}

FeatureSequence FeaturePipeline::transform(const Window& window) const {
  FeatureSequence seq;
  seq.steps = Eigen::MatrixXd::Zero(sequence_len, config.feature_dim());
  const Eigen::MatrixXd rows = raw_feature_rows(window, config, basis);
  const int n = static_cast<int>(rows.rows());
  if (n <= sequence_len) {
    // Shorter sequences keep every packet and are zero-padded at the end.
    seq.valid_len = n;
    for (int p = 0; p < n; ++p) {
      seq.steps.row(p) = stats.normalize(rows.row(p).transpose()).transpose();
    }
  } else {
    // Longer sequences are subsampled uniformly (endpoints included) so the
    // fixed-length input still spans the whole window.
    seq.valid_len = sequence_len;
    for (int p = 0; p < sequence_len; ++p) {
      const int src = sequence_len == 1
                          ? (n - 1) / 2
                          : static_cast<int>(std::llround(
                                static_cast<double>(p) * (n - 1) /
                                (sequence_len - 1)));
      seq.steps.row(p) = stats.normalize(rows.row(src).transpose()).transpose();
    }
  }
  return seq;
}

Eigen::MatrixXd mean_feature_rows(const std::vector<FeatureSequence>& seqs) {
  if (seqs.empty()) {
    throw std::invalid_argument("mean_feature_rows: no sequences");
  }
  const Eigen::Index dim = seqs.front().steps.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(seqs.size(), dim);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (seqs[i].valid_len > 0) {
      out.row(i) = seqs[i].steps.topRows(seqs[i].valid_len).colwise().mean();
    }
  }
  return out;
}

nlohmann::json FeaturePipeline::to_json() const {
  return nlohmann::json{
      {"config",
       {{"n_sub", config.n_sub},
        {"m_pdp", config.m_pdp},
        {"use_mp", config.use_mp},
        {"ref_antenna", config.ref_antenna},
        {"antenna_pair", {config.antenna_pair.first, config.antenna_pair.second}},
        {"l_override", config.l_override},
        {"l_cap", config.l_cap}}},
      {"sequence_len", sequence_len},
      {"basis",
       {{"mean", vector_to_json(basis.mean)},
        {"components", matrix_to_json(basis.components)},
        {"eigenvalues", vector_to_json(basis.eigenvalues)},
        {"total_variance", basis.total_variance},
        {"rank_deficient", basis.rank_deficient}}},
      {"stats",
       {{"mean", vector_to_json(stats.mean)},
        {"std_dev", vector_to_json(stats.std_dev)}}},
  };
}

FeaturePipeline FeaturePipeline::from_json(const nlohmann::json& j) {
  FeaturePipeline p;
  const nlohmann::json& c = j.at("config");
  p.config.n_sub = c.at("n_sub").get<int>();
  p.config.m_pdp = c.at("m_pdp").get<int>();
  p.config.use_mp = c.at("use_mp").get<bool>();
  p.config.ref_antenna = c.at("ref_antenna").get<int>();
  p.config.antenna_pair = {c.at("antenna_pair").at(0).get<int>(),
                           c.at("antenna_pair").at(1).get<int>()};
  p.config.l_override = c.at("l_override").get<int>();
  p.config.l_cap = c.at("l_cap").get<int>();
  p.sequence_len = j.at("sequence_len").get<int>();
  const nlohmann::json& b = j.at("basis");
  p.basis.mean = vector_from_json(b.at("mean"));
  p.basis.components = matrix_from_json(b.at("components"));
  p.basis.eigenvalues = vector_from_json(b.at("eigenvalues"));
  p.basis.total_variance = b.at("total_variance").get<double>();
  p.basis.rank_deficient = b.at("rank_deficient").get<bool>();
  const nlohmann::json& s = j.at("stats");
  p.stats.mean = vector_from_json(s.at("mean"));
  p.stats.std_dev = vector_from_json(s.at("std_dev"));
  return p;
}

}  // namespace curbside
