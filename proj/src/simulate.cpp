#include "curbside/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "curbside/rng.hpp"

namespace curbside {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinPathLen = 1e-6;

double db_to_amplitude(double db) { return std::pow(10.0, -db / 20.0); }

double cross(Vec2 o, Vec2 a, Vec2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Vec2 p, Vec2 q, Vec2 r) {
  return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
         std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(q1, p1, q2)) return true;
  if (d2 == 0 && on_segment(q1, p2, q2)) return true;
  if (d3 == 0 && on_segment(p1, q1, p2)) return true;
  if (d4 == 0 && on_segment(p1, q2, p2)) return true;
  return false;
}

// Arrival source of a path as seen from the vehicle: the rider for the
// direct path, the reflection point for a reflector.
Vec2 arrival_source(const PropagationPath& path, Vec2 rider) {
  return path.kind == PropagationPath::Kind::Direct ? rider : path.via;
}

double path_length(const PropagationPath& path, Vec2 tx, Vec2 rx) {
  if (path.kind == PropagationPath::Kind::Direct) {
    return std::max(norm(rx - tx), kMinPathLen);
  }
  return std::max(norm(path.via - tx) + norm(rx - path.via), kMinPathLen);
}

}  // namespace

double subcarrier_freq_hz(double carrier_freq_hz, int k) {
  return carrier_freq_hz + static_cast<double>(k) * kSubcarrierSpacingHz;
}

double antenna_phase_delta(double aoa_rad, double spacing_m, double freq_hz) {
  return -kTwoPi * spacing_m * std::sin(aoa_rad) * freq_hz / kSpeedOfLight;
}

ComplexSample path_response(const PropagationPath& path, Vec2 tx, Vec2 rx,
                            double freq_hz, double path_loss_exponent,
                            double extra_attenuation_db) {
  const double len = path_length(path, tx, rx);
  const double amp = path.base_attenuation /
                     std::pow(len, path_loss_exponent) *
                     db_to_amplitude(extra_attenuation_db);
  const double tau = len / kSpeedOfLight;
  return std::polar(amp, -kTwoPi * freq_hz * tau);
}

bool sight_line_blocked(const Scenario& sc, Vec2 vehicle_pos) {
  for (const Blocker& b : sc.blockers) {
    if (segments_intersect(sc.rider_pos, vehicle_pos, b.a, b.b)) return true;
  }
  return false;
}

Trace simulate(const Scenario& sc) {
  sc.validate();

  Trace trace;
  trace.header.version = 1;
  trace.header.n_ant = 2;
  trace.header.n_sub = sc.n_sub;
  trace.header.carrier_freq_hz = sc.antenna.carrier_freq_hz;
  trace.header.antenna_spacing_m = sc.antenna.spacing_m;
  trace.header.ride_id = sc.ride_id;
  trace.header.condition = sc.condition;
  trace.header.side = sc.side();

  auto loss_rng = make_rng(sc.seed, "sim/loss");
  auto signal_rng = make_rng(sc.seed, "sim/signal");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> phase_dist(-std::numbers::pi,
                                                    std::numbers::pi);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Antenna index -> lateral offset. used_pair.first rides on the left.
  const double half = sc.antenna.spacing_m / 2.0;
  auto antenna_y = [&](int ant) {
    return ant == sc.antenna.used_pair.first ? half : -half;
  };

  const auto n_total =
      static_cast<std::int64_t>(std::llround(sc.duration_s * sc.packet_rate_pps));
  const double exit_prob = 1.0 / sc.loss.burst_mean_len;

  bool in_burst = false;
  for (std::int64_t i = 0; i < n_total; ++i) {
    const double t = static_cast<double>(i) / sc.packet_rate_pps;
    const Vec2 vehicle{sc.x_start + sc.vehicle_speed_mps * t, 0.0};
    const bool blocked = sight_line_blocked(sc, vehicle);

    // Loss chain. A blocked delivered packet may seed a burst that starts at
    // the next packet and discards a geometric number with mean
    // burst_mean_len, so a permanently blocked link delivers
    // (1 - p) / (1 + q * mu) of its packets.
    bool delivered;
    if (in_burst) {
      delivered = false;
      if (unit(loss_rng) < exit_prob) in_burst = false;
    } else {
      delivered = unit(loss_rng) >= sc.loss.base_loss_prob;
      if (blocked && unit(loss_rng) < sc.loss.nlos_burst_prob) in_burst = true;
    }
    if (!delivered) continue;

    double common_phase = 0.0;
    double sto_slope = 0.0;
    if (sc.impairments.random_common_phase) common_phase = phase_dist(signal_rng);
    if (sc.impairments.sto_slope_max_rad > 0.0) {
      sto_slope = sc.impairments.sto_slope_max_rad *
                  (2.0 * unit(signal_rng) - 1.0);
    }

    CsiPacket pkt;
    pkt.t = std::round(t * 1000.0) / 1000.0;
    pkt.seq = i;
    pkt.rss.resize(2);
    pkt.csi.assign(2, std::vector<ComplexSample>(sc.n_sub));

    for (int ant = 0; ant < 2; ++ant) {
      const bool is_left = ant == sc.antenna.used_pair.first;
      const Vec2 rx{vehicle.x, antenna_y(ant)};
      const double chain_gain =
          sc.antenna_gain_db.empty()
              ? 1.0
              : std::pow(10.0, sc.antenna_gain_db[ant] / 20.0);

      // Subcarrier-independent attenuation of each path at this antenna:
      // blockage, rear shadowing, and the device-housing shadow that cuts
      // arrivals from the antenna's off side in proportion to |sin(aoa)|.
      std::vector<double> path_extra_db(sc.paths.size());
      for (std::size_t p = 0; p < sc.paths.size(); ++p) {
        const PropagationPath& path = sc.paths[p];
        double extra_db = blocked ? path.blocked_extra_attenuation_db : 0.0;
        const Vec2 src = arrival_source(path, sc.rider_pos);
        if (src.x < vehicle.x) extra_db += sc.rear_attenuation_db;
        if (sc.antenna_shadow_db > 0.0) {
          const Vec2 dir = src - vehicle;
          const double len = std::max(norm(dir), kMinPathLen);
          const double sin_aoa = dir.y / len;  // positive: from the left
          const double off_side =
              is_left ? std::max(0.0, -sin_aoa) : std::max(0.0, sin_aoa);
          extra_db += sc.antenna_shadow_db * off_side;
        }
        path_extra_db[p] = extra_db;
      }

      double power_sum = 0.0;
      for (int k = 0; k < sc.n_sub; ++k) {
        const double f = subcarrier_freq_hz(sc.antenna.carrier_freq_hz, k);
        ComplexSample h{0.0, 0.0};
        for (std::size_t p = 0; p < sc.paths.size(); ++p) {
          h += path_response(sc.paths[p], sc.rider_pos, rx, f,
                             sc.path_loss_exponent, path_extra_db[p]);
        }
        h *= std::polar(1.0, common_phase + sto_slope * k);
        if (sc.noise_std > 0.0) {
          h += ComplexSample(sc.noise_std * gauss(signal_rng),
                             sc.noise_std * gauss(signal_rng));
        }
        if (!sc.antenna_phase_offsets_rad.empty()) {
          h *= std::polar(1.0, sc.antenna_phase_offsets_rad[ant][k]);
        }
        h *= chain_gain;
        pkt.csi[ant][k] = h;
        power_sum += std::norm(h);
      }
      const double mean_power =
          std::max(power_sum / static_cast<double>(sc.n_sub), 1e-30);
      pkt.rss[ant] = 10.0 * std::log10(mean_power) + sc.rss_offset_db;
    }
    trace.packets.push_back(std::move(pkt));
  }
  return trace;
}

LossModel loss_for_distance(const LossModel& base, double distance_m,
                            double ref_distance_m, double exponent) {
  LossModel scaled = base;
  scaled.nlos_burst_prob = std::min(
      1.0, base.nlos_burst_prob * std::pow(distance_m / ref_distance_m,
                                           exponent));
  return scaled;
}

std::vector<PdrPoint> pdr_range_analysis(const std::vector<double>& distances_m,
                                         int n_packets, const LossModel& base,
                                         double ref_distance_m, double exponent,
                                         std::uint64_t seed) {
  if (n_packets < 1) {
    throw std::invalid_argument("pdr_range_analysis: n_packets must be >= 1");
  }
  std::vector<PdrPoint> points;
  points.reserve(distances_m.size());
  const double rate = 250.0;
  for (std::size_t i = 0; i < distances_m.size(); ++i) {
    const double d = distances_m[i];
    Scenario sc;
    sc.ride_id = "pdr_probe";
    sc.rider_pos = {0.0, -d};
    sc.vehicle_speed_mps = 0.0;
    sc.x_start = 0.0;
    sc.packet_rate_pps = rate;
    sc.duration_s = static_cast<double>(n_packets) / rate;
    sc.n_sub = 4;
    sc.noise_std = 0.0;
    sc.loss = loss_for_distance(base, d, ref_distance_m, exponent);
    // Permanent blockage: the sight line from (0, -d) to the vehicle at the
    // origin always crosses this segment.
    sc.blockers = {Blocker{{-1.0, -d / 2.0}, {1.0, -d / 2.0}}};
    sc.seed = derive_seed(seed, "pdr/distance", i);
    const Trace trace = simulate(sc);
    PdrPoint p;
    p.distance_m = d;
    p.expected_pdr = expected_pdr(sc.loss);
    p.measured_pdr =
        static_cast<double>(trace.packets.size()) / static_cast<double>(n_packets);
    points.push_back(p);
  }
  return points;
}

std::vector<PdrPoint> default_pdr_study(int n_packets, std::uint64_t seed) {
  std::vector<double> distances;
  for (int d = 10; d <= 120; d += 10) distances.push_back(d);
  LossModel base;
  base.base_loss_prob = 0.005;
  base.nlos_burst_prob = 0.00947;
  base.burst_mean_len = 5.0;
  return pdr_range_analysis(distances, n_packets, base, 10.0, 1.8, seed);
}

}  // namespace curbside
