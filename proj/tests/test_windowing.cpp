#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "curbside/rng.hpp"
#include "curbside/types.hpp"
#include "curbside/windowing.hpp"

using namespace curbside;

namespace {

Trace trace_at_times(const std::vector<double>& times) {
  Trace trace;
  trace.header.ride_id = "two_cars_R_r05";
  trace.header.condition = Condition::TwoCars;
  trace.header.side = Side::Right;
  std::int64_t seq = 0;
  for (double t : times) {
    CsiPacket p;
    p.t = t;
    p.seq = seq++;
    p.rss = {-40.0, -41.0};
    p.csi.assign(2, std::vector<ComplexSample>(trace.header.n_sub,
                                               ComplexSample(1.0, 0.0)));
    trace.packets.push_back(std::move(p));
  }
  return trace;
}

// Reference implementation: enumerate every candidate start, scan all packets.
std::vector<Window> brute_force_windows(const Trace& trace, double window_len,
                                        double stride) {
  std::vector<Window> out;
  if (trace.packets.empty()) return out;
  const double t0 = trace.packets.front().t;
  const double t_last = trace.packets.back().t;
  for (std::size_t k = 0;; ++k) {
    const double start = t0 + static_cast<double>(k) * stride;
    if (start > t_last) break;
    Window w;
    for (const CsiPacket& p : trace.packets) {
      if (p.t >= start && p.t < start + window_len) w.packets.push_back(p);
    }
    if (w.packets.empty()) continue;
    w.label = trace.header.side;
    w.ride_id = trace.header.ride_id;
    w.condition = trace.header.condition;
    w.start_time = start;
    out.push_back(std::move(w));
  }
  return out;
}

void check_same(const std::vector<Window>& got,
                const std::vector<Window>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].start_time == want[i].start_time);
    REQUIRE(got[i].packets.size() == want[i].packets.size());
    for (std::size_t j = 0; j < got[i].packets.size(); ++j) {
      CHECK(got[i].packets[j].seq == want[i].packets[j].seq);
    }
  }
}

}  // namespace

TEST_CASE("windowing matches the brute-force oracle on irregular traces") {
  auto rng = make_rng(7, "test/windowing");
  std::uniform_real_distribution<double> gap(0.0, 0.12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> times;
    double t = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    const int n = 40 + static_cast<int>(rng() % 160);
    for (int i = 0; i < n; ++i) {
      times.push_back(t);
      // Occasional repeated timestamps and occasional long dropouts.
      if (rng() % 7 == 0) times.push_back(t);
      t += (rng() % 11 == 0) ? 1.5 : gap(rng);
    }
    const Trace trace = trace_at_times(times);
    for (auto [len, stride] : {std::pair{1.0, 0.5}, std::pair{0.5, 0.5},
                               std::pair{0.4, 0.7}, std::pair{2.0, 0.25},
                               std::pair{0.05, 0.03}}) {
      check_same(make_windows(trace, len, stride),
                 brute_force_windows(trace, len, stride));
    }
  }
}

TEST_CASE("windowing on a hand-worked example") {
  const Trace trace = trace_at_times({0.0, 0.5, 1.0, 1.5, 2.0, 2.3});
  const auto windows = make_windows(trace, 1.0, 0.5);

  // Starts advance by the stride from the first packet until the last packet
  // time is passed; the [start, start + len) interval is half-open.
  REQUIRE(windows.size() == 5);
  const std::vector<double> starts = {0.0, 0.5, 1.0, 1.5, 2.0};
  const std::vector<std::size_t> sizes = {2, 2, 2, 3, 2};
  for (std::size_t i = 0; i < windows.size(); ++i) {
    CHECK(windows[i].start_time == starts[i]);
    CHECK(windows[i].packets.size() == sizes[i]);
  }
  // Packet at t=2.0 is excluded from the window [1.0, 2.0)...
  for (const CsiPacket& p : windows[2].packets) CHECK(p.t < 2.0);
  // ...and the trailing short window that holds the final packets is kept.
  CHECK(windows.back().packets.back().t == 2.3);
}

TEST_CASE("windows with no packets are dropped") {
  const Trace trace = trace_at_times({0.0, 5.0});
  const auto windows = make_windows(trace, 1.0, 1.0);
  REQUIRE(windows.size() == 2);
  CHECK(windows[0].start_time == 0.0);
  CHECK(windows[1].start_time == 5.0);
}

TEST_CASE("windows are anchored at the first packet timestamp") {
  const Trace trace = trace_at_times({10.25, 10.75, 11.25});
  const auto windows = make_windows(trace, 1.0, 0.5);
  REQUIRE(!windows.empty());
  CHECK(windows.front().start_time == 10.25);
}

TEST_CASE("windows carry the trace label, ride id, and condition") {
  const Trace trace = trace_at_times({0.0, 0.1, 0.2});
  const auto windows = make_windows(trace, 0.5, 0.5);
  REQUIRE(!windows.empty());
  for (const Window& w : windows) {
    CHECK(w.label == Side::Right);
    CHECK(w.ride_id == "two_cars_R_r05");
    CHECK(w.condition == Condition::TwoCars);
  }
}

TEST_CASE("each packet lands in at most ceil(window_len / stride) windows") {
  auto rng = make_rng(7, "test/windowing-coverage");
  std::uniform_real_distribution<double> gap(0.0, 0.05);
  std::vector<double> times;
  double t = 0.0;
  for (int i = 0; i < 500; ++i) {
    times.push_back(t);
    t += gap(rng);
  }
  const Trace trace = trace_at_times(times);
  for (auto [len, stride] :
       {std::pair{2.0, 0.5}, std::pair{1.0, 0.3}, std::pair{0.5, 0.5}}) {
    const auto windows = make_windows(trace, len, stride);
    std::map<std::int64_t, int> hits;
    for (const Window& w : windows) {
      for (const CsiPacket& p : w.packets) ++hits[p.seq];
    }
    const int bound = static_cast<int>(std::ceil(len / stride));
    for (const auto& [seq, count] : hits) {
      CHECK(count <= bound);
    }
    // Every packet is covered at least once (the stride never skips past a
    // packet because candidate starts continue until the last timestamp).
    CHECK(hits.size() == trace.packets.size());
  }
}

TEST_CASE("windowing rejects non-positive parameters and empty traces") {
  const Trace trace = trace_at_times({0.0});
  CHECK_THROWS_AS(make_windows(trace, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_windows(trace, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_windows(trace, -1.0, 0.5), std::invalid_argument);
  CHECK(make_windows(Trace{}, 1.0, 0.5).empty());
}
