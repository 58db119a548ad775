#include "stratmilp/reduction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace stratmilp {

double infeasibility(const MILPInstance& materialized, const std::vector<double>& xhat) {
    std::vector<double> g = materialized.row_activity(xhat);
    double worst = 0.0;
    double bnorm = 0.0;
    for (int i = 0; i < materialized.m; ++i) {
        double resid = g[i] - materialized.b[i];
        double viol = materialized.row_sense[i] == RowSense::EQ ? std::abs(resid)
                                                                : std::max(resid, 0.0);
        worst = std::max(worst, viol);
        bnorm = std::max(bnorm, std::abs(materialized.b[i]));
    }
    return worst / std::max(bnorm, kDenEps);
}

double suboptimality(double f_hat, double f_star) {
    return std::abs(f_hat - f_star) / std::max(std::abs(f_star), kDenEps);
}

double reward(double p, double d) {
    return std::max(-std::log(p + d + kRewardEps), kRewardMin);
}

Strategy extract_strategy(const MILPInstance& inst, const Solution& sol,
                          double eps_tight) {
    if (sol.status != SolStatus::OPTIMAL)
        throw std::invalid_argument("extract_strategy: solution is not OPTIMAL");
    MILPInstance mat = materialize_bounds(inst);
    Strategy s;
    s.tight_set = tight_set(mat, sol.x, eps_tight);
    s.integer_values.reserve(inst.integer_index_set.size());
    for (int j : inst.integer_index_set)
        s.integer_values.push_back(static_cast<long long>(std::llround(sol.x[j])));
    s.key = canonical_strategy_key(s);
    return s;
}

namespace {

MILPInstance select_rows(const MILPInstance& mat, const std::vector<int>& rows) {
    MILPInstance red;
    red.n = mat.n;
    red.m = static_cast<int>(rows.size());
    red.c = mat.c;
    red.lo = mat.lo;
    red.hi = mat.hi;
    red.integer_index_set = mat.integer_index_set;
    red.name = mat.name + "/reduced";
    red.A.resize(static_cast<size_t>(red.m) * red.n);
    red.b.resize(red.m);
    red.row_sense.resize(red.m);
    for (int k = 0; k < red.m; ++k) {
        int i = rows[k];
        std::copy(mat.A.begin() + static_cast<size_t>(i) * mat.n,
                  mat.A.begin() + static_cast<size_t>(i + 1) * mat.n,
                  red.A.begin() + static_cast<size_t>(k) * red.n);
        red.b[k] = mat.b[i];
        red.row_sense[k] = mat.row_sense[i];
    }
    return red;
}

// min t s.t. every reduced row holds up to slack t >= 0; always feasible.
LPResult solve_elastic(const MILPInstance& red) {
    MILPInstance el;
    el.n = red.n + 1;  // last variable is the violation bound t
    el.name = red.name + "/elastic";
    el.c.assign(el.n, 0.0);
    el.c[red.n] = 1.0;
    el.lo.assign(el.n, -kInf);
    el.hi.assign(el.n, kInf);
    for (int j = 0; j < red.n; ++j) {
        el.lo[j] = red.lo[j];
        el.hi[j] = red.hi[j];
    }
    el.lo[red.n] = 0.0;
    int m = 0;
    for (int i = 0; i < red.m; ++i)
        m += red.row_sense[i] == RowSense::EQ ? 2 : 1;
    el.m = m;
    el.A.assign(static_cast<size_t>(m) * el.n, 0.0);
    el.b.resize(m);
    el.row_sense.assign(m, RowSense::LE);
    int r = 0;
    for (int i = 0; i < red.m; ++i) {
        for (int j = 0; j < red.n; ++j) el.a(r, j) = red.a(i, j);
        el.a(r, red.n) = -1.0;
        el.b[r] = red.b[i];
        ++r;
        if (red.row_sense[i] == RowSense::EQ) {
            for (int j = 0; j < red.n; ++j) el.a(r, j) = -red.a(i, j);
            el.a(r, red.n) = -1.0;
            el.b[r] = -red.b[i];
            ++r;
        }
    }
    return solve_lp(el);
}

}  // namespace

ApplyResult apply_strategy(const MILPInstance& inst, const Strategy& s,
                           double f_star) {
    MILPInstance mat = materialize_bounds(inst);
    for (int i : s.tight_set)
        if (i < 0 || i >= mat.m)
            throw std::invalid_argument("apply_strategy: tight index out of range");
    if (s.integer_values.size() != inst.integer_index_set.size())
        throw std::invalid_argument("apply_strategy: integer value count mismatch");

    auto t0 = std::chrono::steady_clock::now();
    ApplyResult out;
    EvalRecord& rec = out.record;

    MILPInstance red = select_rows(mat, s.tight_set);
    FixedIntegerProblem fp = fix_integer_values(red, s.integer_values);
    LPResult lp = solve_lp(fp.continuous);
    rec.lp_iterations = lp.iterations;

    std::vector<double> xhat;
    double f_hat = 0.0;
    if (lp.status == LPStatus::OPTIMAL) {
        xhat = recompose_solution(fp, red, s.integer_values, lp.x);
        f_hat = lp.objective + fp.objective_constant;
        rec.reduced_status = ReducedStatus::OPTIMAL;
    } else if (lp.status == LPStatus::INFEASIBLE) {
        // Graded fallback: the point minimizing the worst tight-row violation.
        FixedIntegerProblem fpe = fix_integer_values(red, s.integer_values);
        MILPInstance cont = fpe.continuous;
        LPResult el = solve_elastic(cont);
        rec.lp_iterations += el.iterations;
        if (el.status == LPStatus::OPTIMAL) {
            std::vector<double> x_cont(el.x.begin(), el.x.end() - 1);
            xhat = recompose_solution(fpe, red, s.integer_values, x_cont);
            f_hat = fpe.objective_constant;
            for (size_t k = 0; k < fpe.continuous_cols.size(); ++k)
                f_hat += cont.c[k] * x_cont[k];
            rec.reduced_status = ReducedStatus::ELASTIC;
        }
    }

    if (xhat.empty()) {
        rec.reduced_status = ReducedStatus::INFEASIBLE;
        rec.infeasibility = std::exp(-kRewardMin);
        rec.suboptimality = std::exp(-kRewardMin);
        rec.reward = kRewardMin;
        out.solution.status = SolStatus::INFEASIBLE;
    } else {
        rec.infeasibility = infeasibility(mat, xhat);
        rec.suboptimality = suboptimality(f_hat, f_star);
        rec.reward = reward(rec.infeasibility, rec.suboptimality);
        out.solution.status = SolStatus::OPTIMAL;
        out.solution.x = std::move(xhat);
        out.solution.objective = f_hat;
    }
    rec.solve_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace stratmilp
