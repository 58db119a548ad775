#ifndef STRATMILP_REDUCTION_HPP
#define STRATMILP_REDUCTION_HPP

#include "stratmilp/lp.hpp"
#include "stratmilp/model.hpp"

namespace stratmilp {

constexpr double kRewardEps = 1e-12;  // inside the log
constexpr double kRewardMin = -20.0;  // reward of strategies with no solution
constexpr double kDenEps = 1e-10;     // suboptimality denominator guard

enum class ReducedStatus { OPTIMAL, INFEASIBLE, ELASTIC };

struct EvalRecord {
    double infeasibility = 0.0;  // p
    double suboptimality = 0.0;  // d
    double reward = kRewardMin;  // r
    ReducedStatus reduced_status = ReducedStatus::INFEASIBLE;
    double solve_time_s = 0.0;
    long lp_iterations = 0;
};

/// Normalized worst-case constraint violation of xhat against all rows of
/// the bound-materialized instance: ||(g - b)_+||_inf / max(||b||_inf, eps),
/// EQ rows contributing |g - b|.
double infeasibility(const MILPInstance& materialized, const std::vector<double>& xhat);

/// |f_hat - f_star| / max(|f_star|, eps_den).
double suboptimality(double f_hat, double f_star);

/// r = -log(p + d + eps_r), clamped below at kRewardMin.
double reward(double p, double d);

/// Reads the strategy of a solved instance: tight rows of the
/// bound-materialized system plus the rounded integer values. Throws on a
/// non-OPTIMAL solution.
Strategy extract_strategy(const MILPInstance& inst, const Solution& sol,
                          double eps_tight = 1e-9);

struct ApplyResult {
    Solution solution;
    EvalRecord record;
};

/// Applies a strategy: keeps only the tight rows (as inequalities), fixes
/// the integer variables, solves the reduced LP, and scores the recovered
/// point against the full materialized row set and the true optimum f_star.
/// An infeasible reduced LP falls back to an elastic solve minimizing the
/// worst violation over the tight rows.
ApplyResult apply_strategy(const MILPInstance& inst, const Strategy& s,
                           double f_star);

}  // namespace stratmilp

#endif
