#include "curbside/split.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "curbside/rng.hpp"

namespace curbside {

namespace {

void collect(const std::vector<CellSplit>& cells,
             std::vector<std::string> CellSplit::*member,
             std::set<std::string>& out) {
  for (const CellSplit& cell : cells) {
    for (const std::string& id : cell.*member) out.insert(id);
  }
}

}  // namespace

std::set<std::string> DatasetSplit::train_ids() const {
  std::set<std::string> out;
  collect(cells, &CellSplit::train, out);
  return out;
}

std::set<std::string> DatasetSplit::val_ids() const {
  std::set<std::string> out;
  collect(cells, &CellSplit::val, out);
  return out;
}

std::set<std::string> DatasetSplit::test_ids() const {
  std::set<std::string> out;
  collect(cells, &CellSplit::test, out);
  return out;
}

DatasetSplit split_dataset(const std::vector<RideInfo>& rides,
                           std::uint64_t seed) {
  // Canonical cell order: condition enum order, Left before Right. Within a
  // cell, ids are sorted before shuffling so the result depends only on the
  // set of rides and the seed, not on input order.
  std::map<std::pair<int, int>, std::vector<std::string>> cells;
  std::set<std::string> seen;
  for (const RideInfo& r : rides) {
    if (!seen.insert(r.ride_id).second) {
      throw std::invalid_argument("duplicate ride_id: " + r.ride_id);
    }
    cells[{static_cast<int>(r.condition), static_cast<int>(r.side)}].push_back(
        r.ride_id);
  }

  DatasetSplit split;
  for (auto& [key, ids] : cells) {
    const Condition condition = static_cast<Condition>(key.first);
    const Side side = static_cast<Side>(key.second);
    std::sort(ids.begin(), ids.end());
    const std::string stream = std::string("split/") +
                               std::string(to_string(condition)) + "/" +
                               std::string(to_string(side));
    auto rng = make_rng(seed, stream);
    std::shuffle(ids.begin(), ids.end(), rng);

    const std::size_t n = ids.size();
    std::size_t n_val = n / 5;
    std::size_t n_test = n / 5;
    if (n >= 3 && n_test == 0) n_test = 1;
    const std::size_t n_train = n - n_val - n_test;
    if (n < 3) {
      split.warnings.push_back(stream + ": only " + std::to_string(n) +
                               " ride(s); split is best-effort");
    }

    CellSplit cell;
    cell.condition = condition;
    cell.side = side;
    cell.train.assign(ids.begin(), ids.begin() + n_train);
    cell.val.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
    cell.test.assign(ids.begin() + n_train + n_val, ids.end());
    split.cells.push_back(std::move(cell));
  }
  return split;
}

}  // namespace curbside
