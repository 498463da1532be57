#include "curbside/windowing.hpp"

#include <algorithm>
#include <stdexcept>

namespace curbside {

std::vector<Window> make_windows(const Trace& trace, double window_len,
                                 double stride) {
  if (!(window_len > 0.0) || !(stride > 0.0)) {
    throw std::invalid_argument("window_len and stride must be positive");
  }
  std::vector<Window> windows;
  const auto& packets = trace.packets;
  if (packets.empty()) return windows;

  const double t0 = packets.front().t;
  const double t_last = packets.back().t;
  auto lower = packets.begin();
  for (std::size_t k = 0;; ++k) {
    const double start = t0 + static_cast<double>(k) * stride;
    if (start > t_last) break;
    lower = std::lower_bound(
        lower, packets.end(), start,
        [](const CsiPacket& p, double t) { return p.t < t; });
    auto upper = std::lower_bound(
        lower, packets.end(), start + window_len,
        [](const CsiPacket& p, double t) { return p.t < t; });
    if (lower == upper) continue;
    Window w;
    w.packets.assign(lower, upper);
    w.label = trace.header.side;
    w.ride_id = trace.header.ride_id;
    w.condition = trace.header.condition;
    w.start_time = start;
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace curbside
