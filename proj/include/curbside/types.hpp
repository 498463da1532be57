#pragma once
// Core domain types shared across the pipeline: CSI packets, traces,
// labeled windows, and antenna geometry.

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace curbside {

using ComplexSample = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kSubcarrierSpacingHz = 312.5e3;
inline constexpr int kDefaultSubcarriers = 30;

// Which side of the street the rider stands on, seen from the vehicle's
// direction of travel (+x). Positive y is Left.
enum class Side { Left, Right };

enum class Condition {
  OnlyRider,
  PeopleBothSides,
  TwoPeople,
  TwoCars,
  TwoCarsThreePeople,
};

std::string_view to_string(Side side);
std::string_view to_string(Condition condition);
Side side_from_string(std::string_view s);
Condition condition_from_string(std::string_view s);
const std::vector<Condition>& all_conditions();

// One received frame: per-antenna RSS plus the complex channel estimate for
// every reported subcarrier. Subcarrier k sits at carrier + k * 312.5 kHz.
struct CsiPacket {
  double t = 0.0;        // seconds since trace start, millisecond precision
  std::int64_t seq = 0;  // transmit-side sequence number; gaps mark losses
  std::vector<double> rss;                      // one entry per antenna, dB
  std::vector<std::vector<ComplexSample>> csi;  // [antenna][subcarrier]

  int n_ant() const { return static_cast<int>(csi.size()); }
  int n_sub() const {
    return csi.empty() ? 0 : static_cast<int>(csi.front().size());
  }
};

// Geometry of the antenna pair used for left/right differencing.
// used_pair.first is the antenna on the vehicle's left (+y), .second on the
// right (-y).
struct AntennaConfig {
  double spacing_m = 0.052;
  std::pair<int, int> used_pair{0, 1};
  double carrier_freq_hz = 5.18e9;
};

struct TraceHeader {
  int version = 1;
  int n_ant = 2;
  int n_sub = kDefaultSubcarriers;
  double carrier_freq_hz = 5.18e9;
  double antenna_spacing_m = 0.052;
  std::string ride_id;
  Condition condition = Condition::OnlyRider;
  Side side = Side::Right;
};

struct Trace {
  TraceHeader header;
  std::vector<CsiPacket> packets;
};

// A time slice of consecutive packets; the unit of classification.
struct Window {
  std::vector<CsiPacket> packets;
  Side label = Side::Right;
  std::string ride_id;
  Condition condition = Condition::OnlyRider;
  double start_time = 0.0;
};

}  // namespace curbside
