#pragma once
// Geometric multipath channel simulator. Produces labeled CSI traces whose
// frequency response per packet is the coherent sum of per-path responses
// a * exp(-j 2 pi f tau) plus receiver noise and phone-side impairments.

#include <cstdint>
#include <vector>

#include "curbside/scenario.hpp"
#include "curbside/types.hpp"

namespace curbside {

// Response of one path between tx and rx at frequency freq_hz. The amplitude
// is base_attenuation / len^path_loss_exponent further scaled down by
// extra_attenuation_db; the phase is -2 pi f len / c.
ComplexSample path_response(const PropagationPath& path, Vec2 tx, Vec2 rx,
                            double freq_hz, double path_loss_exponent,
                            double extra_attenuation_db);

// Phase lead of a plane wave from direction aoa_rad at the right antenna
// relative to the left one: -2 pi d sin(aoa) f / c. The angle is measured
// from the vehicle's travel direction boresight; positive is to the left.
double antenna_phase_delta(double aoa_rad, double spacing_m, double freq_hz);

// Frequency of subcarrier k: carrier + k * 312.5 kHz.
double subcarrier_freq_hz(double carrier_freq_hz, int k);

// True when any blocker segment crosses the rider-to-vehicle sight line.
bool sight_line_blocked(const Scenario& sc, Vec2 vehicle_pos);

// Runs the drive-by and returns the delivered packets. Identical scenarios
// (same seed) produce identical traces.
Trace simulate(const Scenario& sc);

// Packet-delivery-ratio study over distance. The burst trigger probability
// scales as base.nlos_burst_prob * (d / ref_distance_m)^exponent, capped at
// 1; each distance runs n_packets through simulate() with the sight line
// permanently blocked and compares the delivered fraction to the closed form.
struct PdrPoint {
  double distance_m = 0.0;
  double expected_pdr = 0.0;
  double measured_pdr = 0.0;
};

LossModel loss_for_distance(const LossModel& base, double distance_m,
                            double ref_distance_m, double exponent);

std::vector<PdrPoint> pdr_range_analysis(const std::vector<double>& distances_m,
                                         int n_packets, const LossModel& base,
                                         double ref_distance_m, double exponent,
                                         std::uint64_t seed);

// The outdoor range study at its defaults: 12 distances 10..120 m, burst
// probability growing from 0.00947 at the 10 m reference as (d/10)^1.8.
std::vector<PdrPoint> default_pdr_study(int n_packets, std::uint64_t seed);

}  // namespace curbside
