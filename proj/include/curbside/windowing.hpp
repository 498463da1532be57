#pragma once
// Sliding-window segmentation of a trace into labeled classification units.

#include <vector>

#include "curbside/types.hpp"

namespace curbside {

// Cuts [t0, t0 + k * stride) windows of length window_len seconds, where t0
// is the first packet's timestamp. A packet at time t belongs to a window
// starting at s iff s <= t < s + window_len, so each packet lands in at most
// ceil(window_len / stride) windows. Windows that would contain no packets
// are dropped; trailing windows shorter than window_len are kept.
std::vector<Window> make_windows(const Trace& trace, double window_len,
                                 double stride);

}  // namespace curbside
