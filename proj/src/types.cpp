#include "curbside/types.hpp"

#include <stdexcept>

namespace curbside {

std::string_view to_string(Side side) {
  return side == Side::Left ? "left" : "right";
}

std::string_view to_string(Condition condition) {
  switch (condition) {
    case Condition::OnlyRider:
      return "only_rider";
    case Condition::PeopleBothSides:
      return "people_both_sides";
    case Condition::TwoPeople:
      return "two_people";
    case Condition::TwoCars:
      return "two_cars";
    case Condition::TwoCarsThreePeople:
      return "two_cars_three_people";
  }
  throw std::invalid_argument("unknown condition value");
}

Side side_from_string(std::string_view s) {
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  throw std::invalid_argument("unknown side: " + std::string(s));
}

Condition condition_from_string(std::string_view s) {
  for (Condition c : all_conditions()) {
    if (to_string(c) == s) return c;
  }
  throw std::invalid_argument("unknown condition: " + std::string(s));
}

const std::vector<Condition>& all_conditions() {
  static const std::vector<Condition> kAll = {
      Condition::OnlyRider,     Condition::PeopleBothSides,
      Condition::TwoPeople,     Condition::TwoCars,
      Condition::TwoCarsThreePeople,
  };
  return kAll;
}

}  // namespace curbside
