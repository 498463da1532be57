#include "curbside/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace curbside {

using nlohmann::json;

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

double expected_pdr(const LossModel& loss) {
  return (1.0 - loss.base_loss_prob) /
         (1.0 + loss.nlos_burst_prob * loss.burst_mean_len);
}

void Scenario::validate() const {
  auto bad = [](const std::string& what) {
    throw std::invalid_argument("scenario: " + what);
  };
  if (rider_pos.y == 0.0) bad("rider must be off the travel axis (y != 0)");
  if (!(duration_s > 0.0)) bad("duration_s must be positive");
  if (!(packet_rate_pps > 0.0)) bad("packet_rate_pps must be positive");
  if (vehicle_speed_mps < 0.0) bad("vehicle_speed_mps must be non-negative");
  if (!(antenna.spacing_m > 0.0)) bad("antenna spacing must be positive");
  if (!(antenna.carrier_freq_hz > 0.0)) bad("carrier frequency must be positive");
  if (n_sub < 1) bad("n_sub must be at least 1");
  if (paths.empty()) bad("at least one propagation path is required");
  for (const PropagationPath& p : paths) {
    if (!(p.base_attenuation > 0.0) || p.base_attenuation > 1.0) {
      bad("path base_attenuation must be in (0, 1]");
    }
    if (p.blocked_extra_attenuation_db < 0.0) {
      bad("blocked_extra_attenuation_db must be >= 0");
    }
  }
  if (path_loss_exponent < 0.0) bad("path_loss_exponent must be >= 0");
  if (rear_attenuation_db < 0.0) bad("rear_attenuation_db must be >= 0");
  if (antenna_shadow_db < 0.0) bad("antenna_shadow_db must be >= 0");
  if (noise_std < 0.0) bad("noise_std must be >= 0");
  if (loss.base_loss_prob < 0.0 || loss.base_loss_prob > 1.0) {
    bad("base_loss_prob must lie in [0, 1]");
  }
  if (loss.nlos_burst_prob < 0.0 || loss.nlos_burst_prob > 1.0) {
    bad("nlos_burst_prob must lie in [0, 1]");
  }
  if (!(loss.burst_mean_len >= 1.0)) bad("burst_mean_len must be >= 1");
  if (impairments.sto_slope_max_rad < 0.0) {
    bad("sto_slope_max_rad must be >= 0");
  }
  if (!antenna_phase_offsets_rad.empty()) {
    if (antenna_phase_offsets_rad.size() != 2) {
      bad("antenna_phase_offsets_rad must have one row per antenna");
    }
    for (const auto& row : antenna_phase_offsets_rad) {
      if (static_cast<int>(row.size()) != n_sub) {
        bad("antenna_phase_offsets_rad rows must have n_sub entries");
      }
    }
  }
  if (!antenna_gain_db.empty() && antenna_gain_db.size() != 2) {
    bad("antenna_gain_db must have one entry per antenna");
  }
  for (double g : antenna_gain_db) {
    if (!std::isfinite(g)) bad("antenna_gain_db entries must be finite");
  }
}

namespace {

json vec2_to_json(Vec2 v) { return json{{"x", v.x}, {"y", v.y}}; }

Vec2 vec2_from_json(const json& j) {
  return Vec2{j.at("x").get<double>(), j.at("y").get<double>()};
}

const std::set<std::string>& known_scenario_keys() {
  static const std::set<std::string> kKeys = {
      "ride_id",        "condition",          "rider_pos",
      "vehicle_speed_mps", "x_start",         "duration_s",
      "packet_rate_pps", "antenna",           "n_sub",
      "paths",          "blockers",           "path_loss_exponent",
      "rear_attenuation_db", "antenna_shadow_db", "noise_std",
      "rss_offset_db",  "loss",               "impairments",
      "antenna_phase_offsets_rad", "antenna_gain_db", "seed",
  };
  return kKeys;
}

}  // namespace

json scenario_to_json(const Scenario& sc) {
  json paths = json::array();
  for (const PropagationPath& p : sc.paths) {
    paths.push_back(
        {{"kind", p.kind == PropagationPath::Kind::Direct ? "direct"
                                                          : "reflector"},
         {"via", vec2_to_json(p.via)},
         {"base_attenuation", p.base_attenuation},
         {"blocked_extra_attenuation_db", p.blocked_extra_attenuation_db}});
  }
  json blockers = json::array();
  for (const Blocker& b : sc.blockers) {
    blockers.push_back({{"a", vec2_to_json(b.a)}, {"b", vec2_to_json(b.b)}});
  }
  return json{
      {"ride_id", sc.ride_id},
      {"condition", std::string(to_string(sc.condition))},
      {"rider_pos", vec2_to_json(sc.rider_pos)},
      {"vehicle_speed_mps", sc.vehicle_speed_mps},
      {"x_start", sc.x_start},
      {"duration_s", sc.duration_s},
      {"packet_rate_pps", sc.packet_rate_pps},
      {"antenna",
       {{"spacing_m", sc.antenna.spacing_m},
        {"used_pair", {sc.antenna.used_pair.first, sc.antenna.used_pair.second}},
        {"carrier_freq_hz", sc.antenna.carrier_freq_hz}}},
      {"n_sub", sc.n_sub},
      {"paths", std::move(paths)},
      {"blockers", std::move(blockers)},
      {"path_loss_exponent", sc.path_loss_exponent},
      {"rear_attenuation_db", sc.rear_attenuation_db},
      {"antenna_shadow_db", sc.antenna_shadow_db},
      {"noise_std", sc.noise_std},
      {"rss_offset_db", sc.rss_offset_db},
      {"loss",
       {{"base_loss_prob", sc.loss.base_loss_prob},
        {"nlos_burst_prob", sc.loss.nlos_burst_prob},
        {"burst_mean_len", sc.loss.burst_mean_len}}},
      {"impairments",
       {{"random_common_phase", sc.impairments.random_common_phase},
        {"sto_slope_max_rad", sc.impairments.sto_slope_max_rad}}},
      {"antenna_phase_offsets_rad", sc.antenna_phase_offsets_rad},
      {"antenna_gain_db", sc.antenna_gain_db},
      {"seed", sc.seed},
  };
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("scenario: top level must be a JSON object");
  }
  for (const auto& [key, _] : j.items()) {
    if (!known_scenario_keys().count(key)) {
      throw std::invalid_argument("scenario: unknown key \"" + key + "\"");
    }
  }
  Scenario sc;
  sc.ride_id = j.value("ride_id", sc.ride_id);
  if (j.contains("condition")) {
    sc.condition = condition_from_string(j.at("condition").get<std::string>());
  }
  if (j.contains("rider_pos")) sc.rider_pos = vec2_from_json(j.at("rider_pos"));
  sc.vehicle_speed_mps = j.value("vehicle_speed_mps", sc.vehicle_speed_mps);
  sc.x_start = j.value("x_start", sc.x_start);
  sc.duration_s = j.value("duration_s", sc.duration_s);
  sc.packet_rate_pps = j.value("packet_rate_pps", sc.packet_rate_pps);
  if (j.contains("antenna")) {
    const json& a = j.at("antenna");
    sc.antenna.spacing_m = a.value("spacing_m", sc.antenna.spacing_m);
    if (a.contains("used_pair")) {
      sc.antenna.used_pair = {a.at("used_pair").at(0).get<int>(),
                              a.at("used_pair").at(1).get<int>()};
    }
    sc.antenna.carrier_freq_hz =
        a.value("carrier_freq_hz", sc.antenna.carrier_freq_hz);
  }
  sc.n_sub = j.value("n_sub", sc.n_sub);
  if (j.contains("paths")) {
    sc.paths.clear();
    for (const json& pj : j.at("paths")) {
      PropagationPath p;
      const std::string kind = pj.at("kind").get<std::string>();
      if (kind == "direct") {
        p.kind = PropagationPath::Kind::Direct;
      } else if (kind == "reflector") {
        p.kind = PropagationPath::Kind::Reflector;
      } else {
        throw std::invalid_argument("scenario: unknown path kind \"" + kind +
                                    "\"");
      }
      if (pj.contains("via")) p.via = vec2_from_json(pj.at("via"));
      p.base_attenuation = pj.value("base_attenuation", p.base_attenuation);
      p.blocked_extra_attenuation_db =
          pj.value("blocked_extra_attenuation_db",
                   p.blocked_extra_attenuation_db);
      sc.paths.push_back(p);
    }
  }
  if (j.contains("blockers")) {
    for (const json& bj : j.at("blockers")) {
      sc.blockers.push_back(
          Blocker{vec2_from_json(bj.at("a")), vec2_from_json(bj.at("b"))});
    }
  }
  sc.path_loss_exponent = j.value("path_loss_exponent", sc.path_loss_exponent);
  sc.rear_attenuation_db =
      j.value("rear_attenuation_db", sc.rear_attenuation_db);
  sc.antenna_shadow_db = j.value("antenna_shadow_db", sc.antenna_shadow_db);
  sc.noise_std = j.value("noise_std", sc.noise_std);
  sc.rss_offset_db = j.value("rss_offset_db", sc.rss_offset_db);
  if (j.contains("loss")) {
    const json& l = j.at("loss");
    sc.loss.base_loss_prob = l.value("base_loss_prob", sc.loss.base_loss_prob);
    sc.loss.nlos_burst_prob =
        l.value("nlos_burst_prob", sc.loss.nlos_burst_prob);
    sc.loss.burst_mean_len = l.value("burst_mean_len", sc.loss.burst_mean_len);
  }
  if (j.contains("impairments")) {
    const json& im = j.at("impairments");
    sc.impairments.random_common_phase =
        im.value("random_common_phase", sc.impairments.random_common_phase);
    sc.impairments.sto_slope_max_rad =
        im.value("sto_slope_max_rad", sc.impairments.sto_slope_max_rad);
  }
  if (j.contains("antenna_phase_offsets_rad")) {
    sc.antenna_phase_offsets_rad =
        j.at("antenna_phase_offsets_rad")
            .get<std::vector<std::vector<double>>>();
  }
  if (j.contains("antenna_gain_db")) {
    sc.antenna_gain_db = j.at("antenna_gain_db").get<std::vector<double>>();
  }
  sc.seed = j.value("seed", sc.seed);
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("scenario parse error in " + path.string() +
                             ": " + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const std::filesystem::path& path, const Scenario& sc) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open scenario file for writing: " +
                             path.string());
  }
  out << scenario_to_json(sc).dump(2) << '\n';
}

}  // namespace curbside
