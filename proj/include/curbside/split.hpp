#pragma once
// Ride-level train/val/test split, stratified by (condition, side) so every
// cell contributes to evaluation. Windows from one ride never straddle
// splits; that would leak heavily overlapped packets across sets.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "curbside/types.hpp"

namespace curbside {

struct RideInfo {
  std::string ride_id;
  Condition condition = Condition::OnlyRider;
  Side side = Side::Right;
};

struct CellSplit {
  Condition condition;
  Side side;
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

struct DatasetSplit {
  std::vector<CellSplit> cells;
  std::vector<std::string> warnings;

  std::set<std::string> train_ids() const;
  std::set<std::string> val_ids() const;
  std::set<std::string> test_ids() const;
};

// Shuffles each cell with a stream derived from (seed, condition, side), then
// allocates floor(0.2 n) rides to val and floor(0.2 n) to test, with test
// bumped to one ride when n >= 3 would otherwise leave it empty. Cells with
// fewer than 3 rides get a best-effort allocation plus a warning. Duplicate
// ride ids are rejected.
DatasetSplit split_dataset(const std::vector<RideInfo>& rides,
                           std::uint64_t seed);

}  // namespace curbside
