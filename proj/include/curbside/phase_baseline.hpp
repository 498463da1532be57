#pragma once
// Phase-difference baseline: antenna-chain calibration, phase unwrapping,
// STO/SFO removal by pooled linear regression, and four window-level feature
// constructions (mean, first-subcarrier mean, sub-window votes, effective
// phase difference).
//
// Phase sign convention: receiver chains report the channel with the phase
// sign inverted relative to the propagation model (the demodulator's FFT
// basis conjugates it), so measured phase here is -arg(csi). Under this
// convention a positive C - A phase difference indicates a rider on the
// left, matching field behavior of the hardware this pipeline models.

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "curbside/types.hpp"

namespace curbside::phase {

// Wraps an angle to (-pi, pi].
double wrap_angle(double x);

// Unwraps a phase series so successive differences lie in (-pi, pi]. The
// first element is unchanged.
std::vector<double> unwrap_phase(const std::vector<double>& series);

// Fits phi(k) = a * k + b by least squares jointly over all antennas
// (common slope and intercept) and subtracts the fit. Input rows must be
// unwrapped along the subcarrier axis. Inter-antenna differences survive;
// applying twice equals applying once.
std::vector<std::vector<double>> remove_sto_sfo(
    const std::vector<std::vector<double>>& phases);

// Fixed per-antenna, per-subcarrier phase offsets relative to a reference
// antenna, estimated from a splitter capture where every antenna sees the
// same channel.
struct PhaseCalibration {
  std::vector<std::vector<double>> offsets_rad;  // [n_ant][n_sub], (-pi, pi]

  static PhaseCalibration estimate_from_splitter(const Trace& trace,
                                                 int ref_antenna);
  void apply(CsiPacket& packet) const;  // rotates csi by -offset
  void apply(Trace& trace) const;
};

enum class PhaseVariant {
  MeanAll,     // (a) mean over all subcarriers and packets
  MeanFirst,   // (b) mean over the first subcarrier
  Votes,       // (c) per-subcarrier positive/negative sub-window votes
  Effective,   // (d) per-subcarrier effective phase difference
};

struct SubWindowVote {
  int positive = 0;
  int negative = 0;
};

// Per-packet measured phase differences C - A (pair = (A index, C index))
// after unwrapping along subcarriers and STO/SFO removal. One row per
// packet, one column per subcarrier.
Eigen::MatrixXd window_phase_differences(const Window& window,
                                         std::pair<int, int> antenna_pair);

// Window feature for the chosen variant. Sub-window based variants (c)/(d)
// chunk packets into n_subwindows contiguous runs; windows with fewer
// packets reduce the count and set *reduced. Layouts:
//   MeanAll / MeanFirst -> 1 value
//   Votes     -> 2 * n_sub values: positives for every subcarrier, then
//                negatives (20% highest-variance sub-windows dropped first)
//   Effective -> n_sub values
std::vector<double> phase_feature(const Window& window, PhaseVariant variant,
                                  int n_subwindows,
                                  std::pair<int, int> antenna_pair,
                                  bool* reduced = nullptr);

}  // namespace curbside::phase
