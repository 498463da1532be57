#include "curbside/phase_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace curbside::phase {

namespace {

constexpr double kPi = std::numbers::pi;

void check_pair(const Window& window, std::pair<int, int> pair) {
  if (window.packets.empty()) {
    throw std::invalid_argument("phase feature: window has no packets");
  }
  const int n = window.packets.front().n_ant();
  if (pair.first < 0 || pair.first >= n || pair.second < 0 ||
      pair.second >= n || pair.first == pair.second) {
    throw std::invalid_argument("phase feature: antenna pair out of range");
  }
}

// Contiguous packet-index chunks [begin, end) over n_packets rows.
std::vector<std::pair<int, int>> chunk_ranges(int n_packets, int n_chunks) {
  std::vector<std::pair<int, int>> ranges(n_chunks);
  for (int i = 0; i < n_chunks; ++i) {
    ranges[i] = {i * n_packets / n_chunks, (i + 1) * n_packets / n_chunks};
  }
  return ranges;
}

}  // namespace

double wrap_angle(double x) {
  double w = std::remainder(x, 2.0 * kPi);  // (-pi, pi], except -pi possible
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

std::vector<double> unwrap_phase(const std::vector<double>& series) {
  std::vector<double> out(series.size());
  if (series.empty()) return out;
  out[0] = series[0];
  for (std::size_t i = 1; i < series.size(); ++i) {
    out[i] = out[i - 1] + wrap_angle(series[i] - series[i - 1]);
  }
  return out;
}

std::vector<std::vector<double>> remove_sto_sfo(
    const std::vector<std::vector<double>>& phases) {
  if (phases.empty() || phases.front().empty()) {
    throw std::invalid_argument("remove_sto_sfo: empty phase matrix");
  }
  const std::size_t n_sub = phases.front().size();
  for (const auto& row : phases) {
    if (row.size() != n_sub) {
      throw std::invalid_argument("remove_sto_sfo: ragged phase matrix");
    }
  }
  // Least squares for phi = a*k + b pooled over antennas. With every
  // antenna contributing the same k values the normal equations reduce to
  // the per-k statistics below.
  const double n_ant = static_cast<double>(phases.size());
  double sum_k = 0.0, sum_kk = 0.0, sum_phi = 0.0, sum_kphi = 0.0;
  for (std::size_t k = 0; k < n_sub; ++k) {
    sum_k += static_cast<double>(k) * n_ant;
    sum_kk += static_cast<double>(k) * static_cast<double>(k) * n_ant;
    for (const auto& row : phases) {
      sum_phi += row[k];
      sum_kphi += static_cast<double>(k) * row[k];
    }
  }
  const double n = n_ant * static_cast<double>(n_sub);
  const double denom = n * sum_kk - sum_k * sum_k;
  double a = 0.0, b = sum_phi / n;
  if (denom > 0.0) {
    a = (n * sum_kphi - sum_k * sum_phi) / denom;
    b = (sum_phi - a * sum_k) / n;
  }
  std::vector<std::vector<double>> out(phases.size(),
                                       std::vector<double>(n_sub));
  for (std::size_t ant = 0; ant < phases.size(); ++ant) {
    for (std::size_t k = 0; k < n_sub; ++k) {
      out[ant][k] = phases[ant][k] - (a * static_cast<double>(k) + b);
    }
  }
  return out;
}

PhaseCalibration PhaseCalibration::estimate_from_splitter(const Trace& trace,
                                                          int ref_antenna) {
  if (trace.packets.empty()) {
    throw std::invalid_argument("calibration: trace has no packets");
  }
  const int n_ant = trace.header.n_ant;
  const int n_sub = trace.header.n_sub;
  if (ref_antenna < 0 || ref_antenna >= n_ant) {
    throw std::invalid_argument("calibration: ref_antenna out of range");
  }
  PhaseCalibration cal;
  cal.offsets_rad.assign(n_ant, std::vector<double>(n_sub, 0.0));
  for (int ant = 0; ant < n_ant; ++ant) {
    if (ant == ref_antenna) continue;
    for (int k = 0; k < n_sub; ++k) {
      // The shared channel cancels in csi[ant] * conj(csi[ref]); averaging
      // over packets leaves the chain offset robust to noise.
      ComplexSample acc{0.0, 0.0};
      for (const CsiPacket& p : trace.packets) {
        acc += p.csi[ant][k] * std::conj(p.csi[ref_antenna][k]);
      }
      cal.offsets_rad[ant][k] = std::arg(acc);
    }
  }
  return cal;
}

void PhaseCalibration::apply(CsiPacket& packet) const {
  if (packet.csi.size() != offsets_rad.size()) {
    throw std::invalid_argument("calibration: antenna count mismatch");
  }
  for (std::size_t ant = 0; ant < packet.csi.size(); ++ant) {
    if (packet.csi[ant].size() != offsets_rad[ant].size()) {
      throw std::invalid_argument("calibration: subcarrier count mismatch");
    }
    for (std::size_t k = 0; k < packet.csi[ant].size(); ++k) {
      packet.csi[ant][k] *= std::polar(1.0, -offsets_rad[ant][k]);
    }
  }
}

void PhaseCalibration::apply(Trace& trace) const {
  for (CsiPacket& p : trace.packets) apply(p);
}

Eigen::MatrixXd window_phase_differences(const Window& window,
                                         std::pair<int, int> antenna_pair) {
  check_pair(window, antenna_pair);
  const int n_pkts = static_cast<int>(window.packets.size());
  const int n_sub = window.packets.front().n_sub();
  Eigen::MatrixXd diffs(n_pkts, n_sub);
  std::vector<double> raw(n_sub);
  for (int p = 0; p < n_pkts; ++p) {
    const CsiPacket& pkt = window.packets[p];
    std::vector<std::vector<double>> phases(2);
    int row = 0;
    for (int ant : {antenna_pair.first, antenna_pair.second}) {
      for (int k = 0; k < n_sub; ++k) raw[k] = -std::arg(pkt.csi[ant][k]);
      phases[row++] = unwrap_phase(raw);
    }
    const auto corrected = remove_sto_sfo(phases);
    for (int k = 0; k < n_sub; ++k) {
      diffs(p, k) = corrected[1][k] - corrected[0][k];  // C - A
    }
  }
  return diffs;
}

std::vector<double> phase_feature(const Window& window, PhaseVariant variant,
                                  int n_subwindows,
                                  std::pair<int, int> antenna_pair,
                                  bool* reduced) {
  if (n_subwindows < 1) {
    throw std::invalid_argument("phase_feature: n_subwindows must be >= 1");
  }
  if (reduced) *reduced = false;
  const Eigen::MatrixXd diffs = window_phase_differences(window, antenna_pair);
  const int n_pkts = static_cast<int>(diffs.rows());
  const int n_sub = static_cast<int>(diffs.cols());

  switch (variant) {
    case PhaseVariant::MeanAll:
      return {diffs.mean()};
    case PhaseVariant::MeanFirst:
      return {diffs.col(0).mean()};
    default:
      break;
  }

  const int n_chunks = std::min(n_subwindows, n_pkts);
  if (n_chunks < n_subwindows && reduced) *reduced = true;
  const auto ranges = chunk_ranges(n_pkts, n_chunks);

  if (variant == PhaseVariant::Votes) {
    // Rank sub-windows by the variance of all their entries and drop the
    // noisiest 20% before voting.
    std::vector<std::pair<double, int>> variances(n_chunks);
    for (int i = 0; i < n_chunks; ++i) {
      const auto block =
          diffs.middleRows(ranges[i].first, ranges[i].second - ranges[i].first);
      const double mean = block.mean();
      const double var = (block.array() - mean).square().mean();
      variances[i] = {var, i};
    }
    std::sort(variances.begin(), variances.end(),
              [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
              });
    const int n_drop = n_chunks / 5;
    std::vector<bool> dropped(n_chunks, false);
    for (int i = 0; i < n_drop; ++i) dropped[variances[i].second] = true;

    std::vector<SubWindowVote> votes(n_sub);
    for (int i = 0; i < n_chunks; ++i) {
      if (dropped[i]) continue;
      const auto block =
          diffs.middleRows(ranges[i].first, ranges[i].second - ranges[i].first);
      for (int k = 0; k < n_sub; ++k) {
        const double m = block.col(k).mean();
        if (m > 0.0) ++votes[k].positive;
        else if (m < 0.0) ++votes[k].negative;
      }
    }
    std::vector<double> out;
    out.reserve(2 * n_sub);
    for (const SubWindowVote& v : votes) out.push_back(v.positive);
    for (const SubWindowVote& v : votes) out.push_back(v.negative);
    return out;
  }

  // Effective phase difference: per subcarrier, candidates are the
  // sub-window means; pick the one covering the most observations within
  // one radian either side, breaking ties by smallest mean absolute wrapped
  // error over the covered set, then by smallest value.
  std::vector<double> out(n_sub);
  std::vector<double> obs(n_chunks);
  for (int k = 0; k < n_sub; ++k) {
    for (int i = 0; i < n_chunks; ++i) {
      obs[i] = diffs
                   .col(k)
                   .segment(ranges[i].first, ranges[i].second - ranges[i].first)
                   .mean();
    }
    int best_cover = -1;
    double best_err = 0.0;
    double best_v = 0.0;
    for (int c = 0; c < n_chunks; ++c) {
      const double v = obs[c];
      int cover = 0;
      double err_sum = 0.0;
      for (int i = 0; i < n_chunks; ++i) {
        const double err = std::abs(wrap_angle(obs[i] - v));
        if (err <= 1.0) {
          ++cover;
          err_sum += err;
        }
      }
      const double mean_err = err_sum / static_cast<double>(cover);
      if (cover > best_cover ||
          (cover == best_cover && mean_err < best_err) ||
          (cover == best_cover && mean_err == best_err && v < best_v)) {
        best_cover = cover;
        best_err = mean_err;
        best_v = v;
      }
    }
    out[k] = best_v;
  }
  return out;
}

}  // namespace curbside::phase
