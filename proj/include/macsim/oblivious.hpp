#pragma once

#include "macsim/adversary.hpp"

namespace macsim {

struct GroupLayout;
struct PairLayout;
struct ThreadLayout;

ObliviousSchedule extract_schedule(const GroupLayout& layout, Round horizon);
ObliviousSchedule extract_schedule(const PairLayout& layout, Round horizon);
ObliviousSchedule extract_schedule(const ThreadLayout& layout, Round horizon);

}  // namespace macsim
