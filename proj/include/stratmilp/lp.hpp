#ifndef STRATMILP_LP_HPP
#define STRATMILP_LP_HPP

#include <vector>

#include "stratmilp/model.hpp"

namespace stratmilp {

enum class LPStatus { OPTIMAL, INFEASIBLE, UNBOUNDED };

struct LPResult {
    LPStatus status = LPStatus::INFEASIBLE;
    std::vector<double> x;             // valid iff OPTIMAL
    double objective = 0.0;
    std::vector<double> row_activity;  // g(A, x), valid iff OPTIMAL
    long iterations = 0;
};

/// Solves the continuous relaxation of `inst` (the integer index set is
/// ignored) with a two-phase revised simplex. OPTIMAL results are vertex
/// (basic feasible) solutions; output is deterministic for identical input.
LPResult solve_lp(const MILPInstance& inst);

/// Indices of rows satisfied with equality at x (relative tolerance
/// eps_tight), always including every EQ row. Sorted.
std::vector<int> tight_set(const MILPInstance& inst, const std::vector<double>& x,
                           double eps_tight = 1e-9);

}  // namespace stratmilp

#endif
