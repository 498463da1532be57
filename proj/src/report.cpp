#include "curbside/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "curbside/features.hpp"

namespace curbside {

namespace {

// Shortest representation that round-trips a double, so identical inputs
// always format identically. Integral values print without an exponent.
std::string format_double(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double parsed = 0.0;
  for (int prec = 1; prec <= 16; ++prec) {
    char t[64];
    std::snprintf(t, sizeof(t), "%.*g", prec, v);
    std::sscanf(t, "%lf", &parsed);
    if (parsed == v) return t;
  }
  return buf;
}

}  // namespace

std::string sweep_csv(const std::string& x_name,
                      std::vector<SweepPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const SweepPoint& a, const SweepPoint& b) { return a.x < b.x; });
  std::string out = x_name + ",accuracy,n_windows\n";
  for (const SweepPoint& p : points) {
    out += format_double(p.x) + "," + format_double(p.accuracy) + "," +
           std::to_string(p.n_windows) + "\n";
  }
  return out;
}

std::string amplitude_series_csv(const Trace& trace,
                                 std::pair<int, int> antenna_pair) {
  const int n_sub = trace.header.n_sub;
  std::string out = "t,mean_amp_diff";
  for (int k = 0; k < n_sub; ++k) {
    out += ",amp_diff_" + std::to_string(k);
  }
  out += "\n";
  for (const CsiPacket& pkt : trace.packets) {
    const std::vector<double> diff = amplitude_difference(pkt, antenna_pair);
    const double mean =
        std::accumulate(diff.begin(), diff.end(), 0.0) / diff.size();
    out += format_double(pkt.t) + "," + format_double(mean);
    for (double d : diff) out += "," + format_double(d);
    out += "\n";
  }
  return out;
}

std::string pdp_series_csv(const Trace& trace,
                           std::pair<int, int> antenna_pair) {
  const int n_taps = 2 * trace.header.n_sub;
  std::string out = "t";
  for (int k = 0; k < n_taps; ++k) out += ",tap_" + std::to_string(k);
  out += "\n";
  for (const CsiPacket& pkt : trace.packets) {
    const std::vector<double> pdp = power_delay_profile(pkt, antenna_pair);
    out += format_double(pkt.t);
    for (double tap : pdp) out += "," + format_double(tap);
    out += "\n";
  }
  return out;
}

std::string pdr_csv(const std::vector<PdrPoint>& points) {
  std::string out = "distance_m,expected_pdr,measured_pdr\n";
  for (const PdrPoint& p : points) {
    out += format_double(p.distance_m) + "," + format_double(p.expected_pdr) +
           "," + format_double(p.measured_pdr) + "\n";
  }
  return out;
}

}  // namespace curbside
