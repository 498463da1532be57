#pragma once
// Batch generation of labeled drive-by traces plus the manifest that the
// training pipeline consumes. Ride scenarios are drawn per (condition, side)
// cell from templates that differ in bystander and parked-car layout.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "curbside/scenario.hpp"
#include "curbside/types.hpp"

namespace curbside {

struct CorpusCell {
  Condition condition = Condition::OnlyRider;
  Side side = Side::Right;
  int n_rides = 0;
};

struct CorpusSpec {
  std::vector<CorpusCell> cells;
  double packet_rate_pps = 50.0;
  double noise_std = 0.002;
  double speed_min_mps = 4.47;
  double speed_max_mps = 8.94;
  double rider_dist_min_m = 3.2;
  double rider_dist_max_m = 5.0;
  double approach_min_m = 30.0;
  double approach_max_m = 38.0;
  double depart_min_m = 20.0;
  double depart_max_m = 26.0;
  double rear_attenuation_db = 12.0;
  double antenna_shadow_db = 8.0;
  LossModel loss{0.02, 0.15, 12.0};
  bool phone_impairments = true;
  // Fixed per-ride receiver-chain phase offsets and gain imbalance
  // (uncalibrated hardware differs from one recording device to the next).
  bool rx_chain_imperfections = true;
  std::uint64_t seed = 7;

  // 4 rides per (condition, side) cell at 50 packets/s; sized so the full
  // train/eval pipeline stays within a workstation test budget.
  static CorpusSpec desk(std::uint64_t seed);
  // Ride distribution and packet rate mirroring the field collection the
  // pipeline is calibrated against: 85 rides, up to 350 packets/s.
  static CorpusSpec field_scale(std::uint64_t seed);

  int total_rides() const;
};

struct ManifestRow {
  std::string ride_id;
  std::string path;  // relative to the corpus directory
  Condition condition = Condition::OnlyRider;
  Side side = Side::Right;
};

// Deterministic scenario for one ride of a cell; exposed for tests.
Scenario corpus_ride_scenario(const CorpusSpec& spec, Condition condition,
                              Side side, int ride_index);

// Simulates every ride into out_dir, writes manifest.csv and
// corpus_params.json, and returns the manifest rows in generation order.
std::vector<ManifestRow> make_corpus(const CorpusSpec& spec,
                                     const std::filesystem::path& out_dir);

std::vector<ManifestRow> load_manifest(const std::filesystem::path& corpus_dir);

}  // namespace curbside
