#ifndef STRATMILP_BNB_HPP
#define STRATMILP_BNB_HPP

#include "stratmilp/lp.hpp"
#include "stratmilp/model.hpp"

namespace stratmilp {

struct BnBConfig {
    double integrality_tol = 1e-6;
    double abs_gap = 1e-9;
    long node_limit = 1000000;
    double time_limit_s = 300.0;
};

struct BnBStats {
    long nodes = 0;
    long lp_iterations = 0;
    double wall_time_s = 0.0;
};

/// Exact branch-and-bound: most-fractional branching (lowest index ties),
/// best-bound node selection (FIFO ties). Integer entries of an OPTIMAL
/// solution are snapped to exact integers. Deterministic.
Solution solve_milp(const MILPInstance& inst, const BnBConfig& cfg = {},
                    BnBStats* stats = nullptr);

/// Test oracle: enumerates every integer assignment and solves the
/// continuous LP for each. Requires finite integer bounds with range <= 4
/// and at most 10 integer variables.
Solution solve_milp_exhaustive(const MILPInstance& inst);

}  // namespace stratmilp

#endif
