#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curbside/corpus.hpp"
#include "curbside/scenario.hpp"
#include "curbside/trace_io.hpp"
#include "curbside/types.hpp"

namespace fs = std::filesystem;
using namespace curbside;

namespace {

fs::path test_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "curbside_test_corpus" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small corpus that keeps generation under a second: two cells, short rides.
CorpusSpec tiny_spec(std::uint64_t seed) {
  CorpusSpec spec = CorpusSpec::desk(seed);
  spec.cells = {
      {Condition::OnlyRider, Side::Left, 2},
      {Condition::TwoCars, Side::Right, 2},
  };
  spec.packet_rate_pps = 20.0;
  spec.approach_min_m = 8.0;
  spec.approach_max_m = 9.0;
  spec.depart_min_m = 5.0;
  spec.depart_max_m = 6.0;
  return spec;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

}  // namespace

TEST_CASE("preset corpus specs have the documented shape") {
  const CorpusSpec desk = CorpusSpec::desk(7);
  CHECK(desk.cells.size() == 10);
  CHECK(desk.total_rides() == 40);
  for (const CorpusCell& cell : desk.cells) CHECK(cell.n_rides == 4);
  CHECK(desk.packet_rate_pps == 50.0);
  CHECK(desk.seed == 7);

  const CorpusSpec field = CorpusSpec::field_scale(7);
  CHECK(field.cells.size() == 10);
  CHECK(field.total_rides() == 85);
  CHECK(field.packet_rate_pps == 350.0);

  // Every (condition, side) cell appears exactly once in both presets.
  for (const CorpusSpec& spec : {desk, field}) {
    std::set<std::pair<int, int>> seen;
    for (const CorpusCell& cell : spec.cells) {
      seen.insert({static_cast<int>(cell.condition),
                   static_cast<int>(cell.side)});
    }
    CHECK(seen.size() == 10);
  }
}

TEST_CASE("ride scenarios respect the spec ranges and side geometry") {
  const CorpusSpec spec = CorpusSpec::desk(7);
  for (Condition condition : all_conditions()) {
    for (Side side : {Side::Left, Side::Right}) {
      for (int i = 0; i < 4; ++i) {
        const Scenario sc = corpus_ride_scenario(spec, condition, side, i);
        CHECK(sc.condition == condition);
        CHECK(sc.side() == side);

        const double sgn = side == Side::Left ? 1.0 : -1.0;
        const double dist = std::abs(sc.rider_pos.y);
        CHECK(sc.rider_pos.x == 0.0);
        CHECK(sc.rider_pos.y * sgn > 0.0);
        CHECK(dist >= spec.rider_dist_min_m);
        CHECK(dist <= spec.rider_dist_max_m);
        CHECK(sc.vehicle_speed_mps >= spec.speed_min_mps);
        CHECK(sc.vehicle_speed_mps <= spec.speed_max_mps);
        CHECK(-sc.x_start >= spec.approach_min_m);
        CHECK(-sc.x_start <= spec.approach_max_m);
        const double travel = sc.duration_s * sc.vehicle_speed_mps;
        CHECK(travel + sc.x_start >= spec.depart_min_m - 1e-9);
        CHECK(travel + sc.x_start <= spec.depart_max_m + 1e-9);
        CHECK(sc.packet_rate_pps == spec.packet_rate_pps);
        CHECK(sc.noise_std == spec.noise_std);
        CHECK(sc.antenna_shadow_db == spec.antenna_shadow_db);
        CHECK(sc.rear_attenuation_db == spec.rear_attenuation_db);

        // Path layout: direct plus an across-street and a behind-rider
        // reflector, with attenuations inside the documented ranges.
        REQUIRE(sc.paths.size() == 3);
        CHECK(sc.paths[0].kind == PropagationPath::Kind::Direct);
        CHECK(sc.paths[0].blocked_extra_attenuation_db >= 14.0);
        CHECK(sc.paths[0].blocked_extra_attenuation_db <= 20.0);
        CHECK(sc.paths[1].kind == PropagationPath::Kind::Reflector);
        CHECK(sc.paths[1].via.y * sgn < 0.0);  // across the street
        CHECK(sc.paths[1].base_attenuation >= 0.35);
        CHECK(sc.paths[1].base_attenuation <= 0.6);
        CHECK(sc.paths[1].blocked_extra_attenuation_db == 0.0);
        CHECK(sc.paths[2].kind == PropagationPath::Kind::Reflector);
        CHECK(sc.paths[2].via.y * sgn > dist);  // beyond the rider
        CHECK(sc.paths[2].base_attenuation >= 0.15);
        CHECK(sc.paths[2].base_attenuation <= 0.3);

        // Blocker counts by scene template; obstructions sit on the rider's
        // side of the street, between the rider and the curb.
        const std::size_t expected_blockers =
            condition == Condition::OnlyRider              ? 0
            : condition == Condition::TwoCarsThreePeople   ? 5
                                                           : 2;
        CHECK(sc.blockers.size() == expected_blockers);
        for (const Blocker& b : sc.blockers) {
          CHECK(b.a.y * sgn > 0.0);
          CHECK(std::abs(b.a.y) < dist);
        }

        // Receiver-chain imperfections: per-chain phase offsets that are
        // nearly constant across subcarriers, and small gain offsets.
        REQUIRE(sc.antenna_phase_offsets_rad.size() == 2);
        for (const auto& chain : sc.antenna_phase_offsets_rad) {
          REQUIRE(static_cast<int>(chain.size()) == sc.n_sub);
          for (double v : chain) {
            CHECK(std::abs(v - chain[0]) <= 0.1);
          }
        }
        REQUIRE(sc.antenna_gain_db.size() == 2);
        for (double g : sc.antenna_gain_db) {
          CHECK(std::abs(g) <= 0.3);
        }

        CHECK_NOTHROW(sc.validate());
      }
    }
  }
}

TEST_CASE("ride ids encode condition, side, and index") {
  const CorpusSpec spec = CorpusSpec::desk(7);
  const Scenario sc =
      corpus_ride_scenario(spec, Condition::TwoCarsThreePeople, Side::Left, 3);
  CHECK(sc.ride_id == "two_cars_three_people_left_r03");
  const Scenario sc2 =
      corpus_ride_scenario(spec, Condition::OnlyRider, Side::Right, 0);
  CHECK(sc2.ride_id == "only_rider_right_r00");
}

TEST_CASE("ride scenarios are deterministic and vary per ride") {
  const CorpusSpec spec = CorpusSpec::desk(7);
  const Scenario a =
      corpus_ride_scenario(spec, Condition::TwoPeople, Side::Left, 1);
  const Scenario b =
      corpus_ride_scenario(spec, Condition::TwoPeople, Side::Left, 1);
  CHECK(scenario_to_json(a).dump() == scenario_to_json(b).dump());

  const Scenario c =
      corpus_ride_scenario(spec, Condition::TwoPeople, Side::Left, 2);
  CHECK(c.vehicle_speed_mps != a.vehicle_speed_mps);
  CHECK(c.seed != a.seed);

  // Disabling the chain imperfections removes them without moving any other
  // draw (the flags are applied after the geometry is sampled).
  CorpusSpec clean = spec;
  clean.rx_chain_imperfections = false;
  const Scenario d =
      corpus_ride_scenario(clean, Condition::TwoPeople, Side::Left, 1);
  CHECK(d.antenna_phase_offsets_rad.empty());
  CHECK(d.antenna_gain_db.empty());
  CHECK(d.vehicle_speed_mps == a.vehicle_speed_mps);
  CHECK(d.rider_pos.y == a.rider_pos.y);

  CorpusSpec quiet = spec;
  quiet.phone_impairments = false;
  const Scenario e =
      corpus_ride_scenario(quiet, Condition::TwoPeople, Side::Left, 1);
  CHECK(e.impairments.random_common_phase == false);
  CHECK(e.impairments.sto_slope_max_rad == 0.0);
  CHECK(a.impairments.random_common_phase == true);
  CHECK(a.impairments.sto_slope_max_rad == 0.3);
}

TEST_CASE("make_corpus writes traces, manifest, and params that load back") {
  const CorpusSpec spec = tiny_spec(11);
  const fs::path dir = test_dir("gen");
  const auto rows = make_corpus(spec, dir);

  REQUIRE(rows.size() == 4);
  CHECK(rows[0].ride_id == "only_rider_left_r00");
  CHECK(rows[1].ride_id == "only_rider_left_r01");
  CHECK(rows[2].ride_id == "two_cars_right_r00");
  CHECK(rows[3].ride_id == "two_cars_right_r01");

  for (const ManifestRow& row : rows) {
    const Trace trace = load_trace(dir / row.path);
    CHECK(trace.header.ride_id == row.ride_id);
    CHECK(trace.header.condition == row.condition);
    CHECK(trace.header.side == row.side);
    CHECK(!trace.packets.empty());
  }

  const auto loaded = load_manifest(dir);
  REQUIRE(loaded.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(loaded[i].ride_id == rows[i].ride_id);
    CHECK(loaded[i].path == rows[i].path);
    CHECK(loaded[i].condition == rows[i].condition);
    CHECK(loaded[i].side == rows[i].side);
  }

  const auto params =
      nlohmann::json::parse(read_file(dir / "corpus_params.json"));
  CHECK(params.at("seed").get<std::uint64_t>() == 11);
  CHECK(params.at("n_rides").get<int>() == 4);
  CHECK(params.at("packet_rate_pps").get<double>() == spec.packet_rate_pps);
  CHECK(params.at("antenna_shadow_db").get<double>() ==
        spec.antenna_shadow_db);
  CHECK(params.at("rx_chain_imperfections").get<bool>() == true);
  CHECK(params.at("loss").at("nlos_burst_prob").get<double>() ==
        spec.loss.nlos_burst_prob);
}

TEST_CASE("regenerating a corpus with the same seed is byte-identical") {
  const CorpusSpec spec = tiny_spec(11);
  const fs::path dir_a = test_dir("rep_a");
  const fs::path dir_b = test_dir("rep_b");
  make_corpus(spec, dir_a);
  make_corpus(spec, dir_b);

  for (const char* name :
       {"manifest.csv", "corpus_params.json", "only_rider_left_r00.jsonl",
        "two_cars_right_r01.jsonl"}) {
    CHECK(read_file(dir_a / name) == read_file(dir_b / name));
  }

  // A different seed changes the traces.
  const fs::path dir_c = test_dir("rep_c");
  make_corpus(tiny_spec(12), dir_c);
  CHECK(read_file(dir_a / "only_rider_left_r00.jsonl") !=
        read_file(dir_c / "only_rider_left_r00.jsonl"));
}

TEST_CASE("manifest loading rejects missing or malformed files") {
  SUBCASE("missing manifest") {
    CHECK_THROWS_AS(load_manifest(test_dir("missing")), std::runtime_error);
  }

  SUBCASE("wrong header") {
    const fs::path dir = test_dir("head");
    std::ofstream(dir / "manifest.csv") << "id,file\n";
    CHECK_THROWS_AS(load_manifest(dir), std::runtime_error);
  }

  SUBCASE("truncated row names its line number") {
    const fs::path dir = test_dir("trunc");
    std::ofstream(dir / "manifest.csv")
        << "ride_id,path,condition,side\n"
        << "only_rider_left_r00,only_rider_left_r00.jsonl,only_rider,left\n"
        << "broken_row_without_fields\n";
    try {
      load_manifest(dir);
      FAIL("expected runtime_error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }

  SUBCASE("unknown condition label") {
    const fs::path dir = test_dir("cond");
    std::ofstream(dir / "manifest.csv")
        << "ride_id,path,condition,side\n"
        << "x,x.jsonl,parade,left\n";
    CHECK_THROWS_AS(load_manifest(dir), std::invalid_argument);
  }
}

TEST_CASE("make_corpus rejects an empty cell list") {
  CorpusSpec spec = tiny_spec(7);
  spec.cells.clear();
  CHECK_THROWS_AS(make_corpus(spec, test_dir("empty")),
                  std::invalid_argument);
}
