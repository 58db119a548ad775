#ifndef STRATMILP_RANDOM_MILP_HPP
#define STRATMILP_RANDOM_MILP_HPP

#include <cstdint>

#include "stratmilp/model.hpp"

namespace stratmilp {

/// Random feasible, bounded MILP for oracle cross-checks: up to max_bin
/// binaries, max_cont continuous variables in [0,3], and max_rows rows
/// built around a known feasible point (EQ rows with probability ~0.2).
MILPInstance make_random_milp(uint64_t seed, int max_bin = 8, int max_cont = 6,
                              int max_rows = 12);

}  // namespace stratmilp

#endif
