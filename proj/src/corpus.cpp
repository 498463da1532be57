#include "curbside/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "curbside/rng.hpp"
#include "curbside/simulate.hpp"
#include "curbside/trace_io.hpp"

namespace curbside {

using nlohmann::json;

namespace {

std::vector<CorpusCell> uniform_cells(int per_cell) {
  std::vector<CorpusCell> cells;
  for (Condition c : all_conditions()) {
    cells.push_back({c, Side::Left, per_cell});
    cells.push_back({c, Side::Right, per_cell});
  }
  return cells;
}

// A person modeled as a short segment parallel to the street, or a parked
// car as a longer one. x is the segment center, y its lateral offset.
Blocker lateral_segment(double cx, double y, double half_width) {
  return Blocker{{cx - half_width, y}, {cx + half_width, y}};
}

}  // namespace

CorpusSpec CorpusSpec::desk(std::uint64_t seed) {
  CorpusSpec spec;
  spec.cells = uniform_cells(4);
  spec.seed = seed;
  return spec;
}

CorpusSpec CorpusSpec::field_scale(std::uint64_t seed) {
  CorpusSpec spec;
  spec.cells = {
      {Condition::OnlyRider, Side::Left, 7},
      {Condition::OnlyRider, Side::Right, 6},
      {Condition::PeopleBothSides, Side::Left, 5},
      {Condition::PeopleBothSides, Side::Right, 6},
      {Condition::TwoPeople, Side::Left, 13},
      {Condition::TwoPeople, Side::Right, 14},
      {Condition::TwoCars, Side::Left, 10},
      {Condition::TwoCars, Side::Right, 12},
      {Condition::TwoCarsThreePeople, Side::Left, 6},
      {Condition::TwoCarsThreePeople, Side::Right, 6},
  };
  spec.packet_rate_pps = 350.0;
  spec.seed = seed;
  return spec;
}

int CorpusSpec::total_rides() const {
  int n = 0;
  for (const CorpusCell& c : cells) n += c.n_rides;
  return n;
}

Scenario corpus_ride_scenario(const CorpusSpec& spec, Condition condition,
                              Side side, int ride_index) {
  const std::string stream = std::string("corpus/") +
                             std::string(to_string(condition)) + "/" +
                             std::string(to_string(side));
  auto rng = make_rng(spec.seed, stream, static_cast<std::uint64_t>(ride_index));
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  const double sgn = side == Side::Left ? 1.0 : -1.0;
  const double rider_dist = uniform(spec.rider_dist_min_m, spec.rider_dist_max_m);
  const double speed = uniform(spec.speed_min_mps, spec.speed_max_mps);
  const double approach = uniform(spec.approach_min_m, spec.approach_max_m);
  const double depart = uniform(spec.depart_min_m, spec.depart_max_m);

  Scenario sc;
  char id[64];
  std::snprintf(id, sizeof(id), "%s_%s_r%02d",
                std::string(to_string(condition)).c_str(),
                std::string(to_string(side)).c_str(), ride_index);
  sc.ride_id = id;
  sc.condition = condition;
  sc.rider_pos = {0.0, sgn * rider_dist};
  sc.vehicle_speed_mps = speed;
  sc.x_start = -approach;
  sc.duration_s = (approach + depart) / speed;
  sc.packet_rate_pps = spec.packet_rate_pps;
  sc.noise_std = spec.noise_std;
  sc.rear_attenuation_db = spec.rear_attenuation_db;
  sc.antenna_shadow_db = spec.antenna_shadow_db;
  sc.loss = spec.loss;
  sc.impairments.random_common_phase = spec.phone_impairments;
  sc.impairments.sto_slope_max_rad = spec.phone_impairments ? 0.3 : 0.0;
  sc.seed = derive_seed(spec.seed, "ride/" + sc.ride_id);

  // Direct path plus two environmental reflectors: a facade across the
  // street and one behind the rider. Reflectors keep most of their power
  // while the sight line is blocked.
  PropagationPath direct;
  direct.kind = PropagationPath::Kind::Direct;
  direct.base_attenuation = 1.0;
  direct.blocked_extra_attenuation_db = uniform(14.0, 20.0);
  PropagationPath across;
  across.kind = PropagationPath::Kind::Reflector;
  across.via = {uniform(-8.0, 8.0), -sgn * uniform(3.0, 7.0)};
  across.base_attenuation = uniform(0.35, 0.6);
  across.blocked_extra_attenuation_db = 0.0;
  PropagationPath behind;
  behind.kind = PropagationPath::Kind::Reflector;
  behind.via = {uniform(-6.0, 6.0), sgn * (rider_dist + uniform(2.0, 5.0))};
  behind.base_attenuation = uniform(0.15, 0.3);
  behind.blocked_extra_attenuation_db = uniform(2.0, 5.0);
  sc.paths = {direct, across, behind};

  // Obstructions sit between the rider and the curb (closer to the street
  // than the rider), so they sweep through the sight line as the vehicle
  // approaches and departs.
  const double y_abs = rider_dist;
  auto person = [&](double cx, double toward_street) {
    return lateral_segment(cx + uniform(-0.3, 0.3),
                           sgn * (y_abs - toward_street + uniform(-0.15, 0.15)),
                           uniform(0.25, 0.4));
  };
  auto parked_car = [&](double cx) {
    return lateral_segment(cx + uniform(-0.5, 0.5),
                           sgn * (y_abs - 1.5 + uniform(-0.3, 0.3)), 2.25);
  };
  switch (condition) {
    case Condition::OnlyRider:
      break;
    case Condition::PeopleBothSides:
      sc.blockers = {person(-1.0, 0.4), person(1.0, 0.4)};
      break;
    case Condition::TwoPeople:
      sc.blockers = {person(-0.8, 1.2), person(0.6, 1.8)};
      break;
    case Condition::TwoCars:
      sc.blockers = {parked_car(-5.25), parked_car(5.25)};
      break;
    case Condition::TwoCarsThreePeople:
      sc.blockers = {parked_car(-5.25), parked_car(5.25), person(-1.5, 1.2),
                     person(0.5, 1.6), person(2.0, 1.0)};
      break;
  }

  // Each ride is recorded by an uncalibrated receiver: every RF chain adds a
  // fixed, ride-specific phase rotation (constant across the ride, nearly
  // constant across subcarriers) and a fixed gain offset. The phase offsets
  // make raw inter-antenna phase incomparable between rides; the gain
  // imbalance shifts every amplitude difference by a ride-specific bias.
  if (spec.rx_chain_imperfections) {
    sc.antenna_phase_offsets_rad.assign(2, std::vector<double>(sc.n_sub, 0.0));
    for (auto& chain : sc.antenna_phase_offsets_rad) {
      const double base = uniform(-std::numbers::pi, std::numbers::pi);
      for (double& sub : chain) sub = base + uniform(-0.05, 0.05);
    }
    sc.antenna_gain_db = {uniform(-0.3, 0.3), uniform(-0.3, 0.3)};
  }
  return sc;
}

std::vector<ManifestRow> make_corpus(const CorpusSpec& spec,
                                     const std::filesystem::path& out_dir) {
  if (spec.cells.empty()) {
    throw std::invalid_argument("corpus spec has no cells");
  }
  std::filesystem::create_directories(out_dir);
  std::vector<ManifestRow> rows;
  for (const CorpusCell& cell : spec.cells) {
    for (int i = 0; i < cell.n_rides; ++i) {
      const Scenario sc =
          corpus_ride_scenario(spec, cell.condition, cell.side, i);
      const Trace trace = simulate(sc);
      ManifestRow row;
      row.ride_id = sc.ride_id;
      row.path = sc.ride_id + ".jsonl";
      row.condition = cell.condition;
      row.side = cell.side;
      save_trace(out_dir / row.path, trace);
      rows.push_back(std::move(row));
    }
  }

  std::ofstream manifest(out_dir / "manifest.csv");
  if (!manifest) {
    throw std::runtime_error("cannot write manifest.csv in " +
                             out_dir.string());
  }
  manifest << "ride_id,path,condition,side\n";
  for (const ManifestRow& r : rows) {
    manifest << r.ride_id << ',' << r.path << ',' << to_string(r.condition)
             << ',' << to_string(r.side) << '\n';
  }

  json params = {
      {"packet_rate_pps", spec.packet_rate_pps},
      {"noise_std", spec.noise_std},
      {"speed_min_mps", spec.speed_min_mps},
      {"speed_max_mps", spec.speed_max_mps},
      {"rider_dist_min_m", spec.rider_dist_min_m},
      {"rider_dist_max_m", spec.rider_dist_max_m},
      {"approach_min_m", spec.approach_min_m},
      {"approach_max_m", spec.approach_max_m},
      {"depart_min_m", spec.depart_min_m},
      {"depart_max_m", spec.depart_max_m},
      {"rear_attenuation_db", spec.rear_attenuation_db},
      {"antenna_shadow_db", spec.antenna_shadow_db},
      {"rx_chain_imperfections", spec.rx_chain_imperfections},
      {"loss",
       {{"base_loss_prob", spec.loss.base_loss_prob},
        {"nlos_burst_prob", spec.loss.nlos_burst_prob},
        {"burst_mean_len", spec.loss.burst_mean_len}}},
      {"phone_impairments", spec.phone_impairments},
      {"seed", spec.seed},
      {"n_rides", spec.total_rides()},
  };
  std::ofstream params_out(out_dir / "corpus_params.json");
  params_out << params.dump(2) << '\n';
  return rows;
}

std::vector<ManifestRow> load_manifest(const std::filesystem::path& corpus_dir) {
  const auto path = corpus_dir / "manifest.csv";
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open manifest: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "ride_id,path,condition,side") {
    throw std::runtime_error("manifest header mismatch in " + path.string());
  }
  std::vector<ManifestRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string ride_id, rel_path, condition, side;
    if (!std::getline(ss, ride_id, ',') || !std::getline(ss, rel_path, ',') ||
        !std::getline(ss, condition, ',') || !std::getline(ss, side)) {
      throw std::runtime_error("manifest line " + std::to_string(line_no) +
                               " is malformed");
    }
    ManifestRow row;
    row.ride_id = ride_id;
    row.path = rel_path;
    row.condition = condition_from_string(condition);
    row.side = side_from_string(side);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace curbside
