#pragma once

#include <cstdint>
#include <map>

namespace shillkit {

using UserId = std::uint32_t;
using ItemId = std::uint32_t;

// One synthetic attacker: ratings split into selected / filler / target
// sections. The three maps are pairwise disjoint and every value lies on
// the integer 1-5 scale.
struct ShillingProfile {
  UserId user = 0;
  std::map<ItemId, double> selected;
  std::map<ItemId, double> filler;
  std::map<ItemId, double> target;

  std::size_t rating_count() const {
    return selected.size() + filler.size() + target.size();
  }
};

}  // namespace shillkit
