#include "curbside/trace_io.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace curbside {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what, int line) {
  throw TraceFormatError(what, line);
}

TraceHeader parse_header(const json& j, int line) {
  TraceHeader h;
  try {
    h.version = j.at("version").get<int>();
    h.n_ant = j.at("n_ant").get<int>();
    h.n_sub = j.at("n_sub").get<int>();
    h.carrier_freq_hz = j.at("carrier_freq_hz").get<double>();
    h.antenna_spacing_m = j.at("antenna_spacing_m").get<double>();
    h.ride_id = j.at("ride_id").get<std::string>();
    h.condition = condition_from_string(j.at("condition").get<std::string>());
    h.side = side_from_string(j.at("side").get<std::string>());
  } catch (const json::exception& e) {
    fail(std::string("bad header: ") + e.what(), line);
  } catch (const std::invalid_argument& e) {
    fail(std::string("bad header: ") + e.what(), line);
  }
  if (h.version != 1) fail("unsupported version", line);
  if (h.n_ant < 2 || h.n_ant > 3) fail("n_ant must be 2 or 3", line);
  if (h.n_sub < 1) fail("n_sub must be positive", line);
  if (!(h.carrier_freq_hz > 0) || !(h.antenna_spacing_m > 0)) {
    fail("carrier frequency and antenna spacing must be positive", line);
  }
  return h;
}

CsiPacket parse_packet(const json& j, const TraceHeader& h, int line) {
  CsiPacket p;
  try {
    p.t = j.at("t").get<double>();
    p.seq = j.at("seq").get<std::int64_t>();
    p.rss = j.at("rss").get<std::vector<double>>();
    const json& csi = j.at("csi");
    if (!csi.is_array()) fail("csi must be an array", line);
    p.csi.reserve(csi.size());
    for (const json& ant : csi) {
      std::vector<ComplexSample> row;
      row.reserve(ant.size());
      for (const json& s : ant) {
        if (!s.is_array() || s.size() != 2) {
          fail("each csi sample must be [re, im]", line);
        }
        row.emplace_back(s[0].get<double>(), s[1].get<double>());
      }
      p.csi.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    fail(std::string("bad packet: ") + e.what(), line);
  }
  if (!std::isfinite(p.t)) fail("timestamp must be finite", line);
  if (p.seq < 0) fail("seq must be non-negative", line);
  if (static_cast<int>(p.rss.size()) != h.n_ant) {
    fail("rss length does not match n_ant", line);
  }
  if (p.n_ant() != h.n_ant) fail("csi antenna count mismatch", line);
  for (const auto& row : p.csi) {
    if (static_cast<int>(row.size()) != h.n_sub) {
      fail("csi subcarrier count mismatch", line);
    }
    for (ComplexSample s : row) {
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
        fail("csi sample must be finite", line);
      }
    }
  }
  for (double r : p.rss) {
    if (!std::isfinite(r)) fail("rss must be finite", line);
  }
  return p;
}

}  // namespace

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open trace file: " + path.string());
  }
  Trace trace;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!have_header) {
      trace.header = parse_header(j, line_no);
      have_header = true;
      continue;
    }
    CsiPacket p = parse_packet(j, trace.header, line_no);
    if (!trace.packets.empty() && p.t < trace.packets.back().t) {
      fail("timestamps must be non-decreasing", line_no);
    }
    trace.packets.push_back(std::move(p));
  }
  return trace;
}

void save_trace(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open trace file for writing: " +
                             path.string());
  }
  const TraceHeader& h = trace.header;
  json header = {
      {"version", h.version},
      {"n_ant", h.n_ant},
      {"n_sub", h.n_sub},
      {"carrier_freq_hz", h.carrier_freq_hz},
      {"antenna_spacing_m", h.antenna_spacing_m},
      {"ride_id", h.ride_id},
      {"condition", std::string(to_string(h.condition))},
      {"side", std::string(to_string(h.side))},
  };
  out << header.dump() << '\n';
  for (const CsiPacket& p : trace.packets) {
    json csi = json::array();
    for (const auto& row : p.csi) {
      json ant = json::array();
      for (ComplexSample s : row) {
        ant.push_back(json::array({s.real(), s.imag()}));
      }
      csi.push_back(std::move(ant));
    }
    json pj = {
        {"t", p.t}, {"seq", p.seq}, {"rss", p.rss}, {"csi", std::move(csi)}};
    out << pj.dump() << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace curbside
