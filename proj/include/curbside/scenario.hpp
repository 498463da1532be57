#pragma once
// Drive-by scenario description for the channel simulator. The vehicle moves
// along +x on y = 0; the rider stands off-axis (y > 0 is the Left label).
// Everything is plain data; simulate() interprets it.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curbside/types.hpp"

namespace curbside {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
double norm(Vec2 v);

struct PropagationPath {
  enum class Kind { Direct, Reflector };
  Kind kind = Kind::Direct;
  // Reflection point for Kind::Reflector; the path runs tx -> via -> rx.
  Vec2 via{};
  double base_attenuation = 1.0;  // linear amplitude at 1 m path length
  // Extra attenuation applied while the direct sight line is blocked.
  double blocked_extra_attenuation_db = 0.0;
};

// An obstruction segment in the plane; blocking is tested against the
// rider-to-vehicle sight line.
struct Blocker {
  Vec2 a{};
  Vec2 b{};
};

// Packet-loss process: independent base loss plus blocked-state loss bursts.
// While the sight line is blocked, each delivered packet seeds a burst with
// probability nlos_burst_prob; a burst then discards a geometric number of
// packets with mean burst_mean_len.
struct LossModel {
  double base_loss_prob = 0.0;
  double nlos_burst_prob = 0.0;
  double burst_mean_len = 5.0;
};

// Closed-form delivery ratio for a permanently blocked link:
// (1 - base_loss_prob) / (1 + nlos_burst_prob * burst_mean_len).
double expected_pdr(const LossModel& loss);

// Receiver-chain imperfections common to all antennas of a packet. They
// cancel in any cross-antenna difference but corrupt absolute phase.
struct PhoneImpairments {
  bool random_common_phase = false;
  double sto_slope_max_rad = 0.0;  // per-packet phase slope across subcarriers
};

struct Scenario {
  std::string ride_id = "ride";
  Condition condition = Condition::OnlyRider;
  Vec2 rider_pos{0.0, -4.0};
  double vehicle_speed_mps = 6.7;
  double x_start = -30.0;
  double duration_s = 8.0;
  double packet_rate_pps = 100.0;
  AntennaConfig antenna;
  int n_sub = kDefaultSubcarriers;
  std::vector<PropagationPath> paths{PropagationPath{}};
  std::vector<Blocker> blockers;
  double path_loss_exponent = 1.0;
  // Applied to a path whose arrival source lies behind the moving vehicle.
  double rear_attenuation_db = 0.0;
  // Device-housing shadow: each antenna sits behind the mount body for
  // arrivals from the opposite side, so the off-side antenna loses up to
  // this many dB at full broadside (scaled by |sin aoa|, zero at boresight).
  // This is what makes the C - A amplitude difference carry the side cue.
  double antenna_shadow_db = 0.0;
  double noise_std = 0.0;  // std dev per real/imag component
  double rss_offset_db = 30.0;
  LossModel loss;
  PhoneImpairments impairments;
  // Optional fixed per-antenna, per-subcarrier phase rotations [ant][sub];
  // empty means none. These model uncalibrated receiver chains.
  std::vector<std::vector<double>> antenna_phase_offsets_rad;
  // Optional fixed per-antenna gain offsets in dB (uncalibrated chain gain
  // imbalance); empty means all zero.
  std::vector<double> antenna_gain_db;
  std::uint64_t seed = 1;

  Side side() const { return rider_pos.y > 0 ? Side::Left : Side::Right; }
  void validate() const;  // throws std::invalid_argument
};

nlohmann::json scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const Scenario& sc);

}  // namespace curbside
