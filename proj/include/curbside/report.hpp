#pragma once
// Plot-ready CSV tables: accuracy sweeps, per-ride amplitude and PDP time
// series, and the PDR-vs-distance study. Formatting only; the callers decide
// what to compute. Column schemas are documented in the README and kept
// stable.

#include <string>
#include <utility>
#include <vector>

#include "curbside/simulate.hpp"
#include "curbside/types.hpp"

namespace curbside {

struct SweepPoint {
  double x = 0.0;
  double accuracy = 0.0;
  int n_windows = 0;
};

// Header "<x_name>,accuracy,n_windows", one row per point, x ascending.
std::string sweep_csv(const std::string& x_name,
                      std::vector<SweepPoint> points);

// Header "t,mean_amp_diff,amp_diff_0..amp_diff_{n-1}"; one row per packet.
std::string amplitude_series_csv(const Trace& trace,
                                 std::pair<int, int> antenna_pair);

// Header "t,tap_0..tap_{2n-1}"; one row per packet (both antennas' taps).
std::string pdp_series_csv(const Trace& trace,
                           std::pair<int, int> antenna_pair);

// Header "distance_m,expected_pdr,measured_pdr".
std::string pdr_csv(const std::vector<PdrPoint>& points);

}  // namespace curbside
