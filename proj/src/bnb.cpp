#include "stratmilp/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace stratmilp {

namespace {

struct Node {
    std::vector<double> lo, hi;  // bounds over all variables
    double bound;                // parent LP relaxation objective
    long id;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
        return a.id > b.id;                                 // FIFO tie-break
    }
};

// Most-fractional integer variable; -1 when integral within tol.
int pick_branch_var(const MILPInstance& inst, const std::vector<double>& x,
                    double tol) {
    int best = -1;
    double best_score = tol;
    for (int j : inst.integer_index_set) {
        double frac = x[j] - std::floor(x[j]);
        double dist = std::min(frac, 1.0 - frac);
        if (dist > best_score + 1e-15) {
            best_score = dist;
            best = j;
        }
    }
    return best;
}

}  // namespace

Solution solve_milp(const MILPInstance& inst, const BnBConfig& cfg, BnBStats* stats) {
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    Solution incumbent;
    incumbent.status = SolStatus::INFEASIBLE;
    double incumbent_obj = kInf;

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push({inst.lo, inst.hi, -kInf, 0});
    long next_id = 1;
    long nodes = 0;
    long lp_iters = 0;
    bool hit_limit = false;

    // Rounding heuristic: fix integers to the rounded relaxation values and
    // solve the remaining LP. Good incumbents early on are what lets
    // best-bound search prune; without this the tail of near-degenerate
    // instances explodes.
    auto try_rounding = [&](const std::vector<double>& x) {
        std::vector<long long> vals(inst.integer_index_set.size());
        for (size_t k = 0; k < vals.size(); ++k) {
            int j = inst.integer_index_set[k];
            long long v = std::llround(x[j]);
            long long vlo = static_cast<long long>(std::ceil(inst.lo[j] - 1e-9));
            long long vhi = static_cast<long long>(std::floor(inst.hi[j] + 1e-9));
            vals[k] = std::clamp(v, vlo, vhi);
        }
        FixedIntegerProblem fp = fix_integer_values(inst, vals);
        LPResult lp = solve_lp(fp.continuous);
        lp_iters += lp.iterations;
        if (lp.status != LPStatus::OPTIMAL) return;
        double obj = lp.objective + fp.objective_constant;
        if (obj < incumbent_obj - 1e-12) {
            incumbent.status = SolStatus::OPTIMAL;
            incumbent.x = recompose_solution(fp, inst, vals, lp.x);
            incumbent.objective = obj;
            incumbent_obj = obj;
        }
    };

    MILPInstance work = inst;
    while (!open.empty()) {
        if (nodes >= cfg.node_limit || elapsed() > cfg.time_limit_s) {
            hit_limit = true;
            break;
        }
        Node node = open.top();
        open.pop();
        if (node.bound >= incumbent_obj - cfg.abs_gap) continue;

        work.lo = node.lo;
        work.hi = node.hi;
        LPResult lp = solve_lp(work);
        ++nodes;
        lp_iters += lp.iterations;

        if (lp.status == LPStatus::UNBOUNDED) {
            if (nodes == 1) {
                Solution s;
                s.status = SolStatus::UNBOUNDED;
                if (stats) *stats = {nodes, lp_iters, elapsed()};
                return s;
            }
            continue;  // bounded variables at depth > 0 preclude this in practice
        }
        if (lp.status == LPStatus::INFEASIBLE) continue;
        if (lp.objective >= incumbent_obj - cfg.abs_gap) continue;

        if (nodes == 1 || nodes % 25 == 0) try_rounding(lp.x);
        if (lp.objective >= incumbent_obj - cfg.abs_gap) continue;

        int branch = pick_branch_var(inst, lp.x, cfg.integrality_tol);
        if (branch < 0) {
            incumbent.status = SolStatus::OPTIMAL;
            incumbent.x = lp.x;
            for (int j : inst.integer_index_set)
                incumbent.x[j] = std::round(incumbent.x[j]);
            incumbent.objective = 0.0;
            for (int j = 0; j < inst.n; ++j)
                incumbent.objective += inst.c[j] * incumbent.x[j];
            incumbent_obj = incumbent.objective;
            continue;
        }

        double v = lp.x[branch];
        Node down{node.lo, node.hi, lp.objective, next_id++};
        down.hi[branch] = std::floor(v);
        if (down.lo[branch] <= down.hi[branch]) open.push(std::move(down));
        Node up{node.lo, node.hi, lp.objective, next_id++};
        up.lo[branch] = std::floor(v) + 1.0;
        if (up.lo[branch] <= up.hi[branch]) open.push(std::move(up));
    }

    if (stats) *stats = {nodes, lp_iters, elapsed()};
    if (hit_limit && incumbent.status != SolStatus::OPTIMAL) {
        Solution s;
        s.status = SolStatus::LIMIT;
        return s;
    }
    if (hit_limit) {
        incumbent.status = SolStatus::LIMIT;  // incumbent without proof
    }
    return incumbent;
}

Solution solve_milp_exhaustive(const MILPInstance& inst) {
    const auto& I = inst.integer_index_set;
    const int d = static_cast<int>(I.size());
    if (d > 10)
        throw std::invalid_argument("solve_milp_exhaustive: too many integer variables");
    std::vector<long long> lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
        if (!std::isfinite(inst.lo[I[k]]) || !std::isfinite(inst.hi[I[k]]))
            throw std::invalid_argument(
                "solve_milp_exhaustive: integer variable with infinite bound");
        lo[k] = static_cast<long long>(std::ceil(inst.lo[I[k]] - 1e-9));
        hi[k] = static_cast<long long>(std::floor(inst.hi[I[k]] + 1e-9));
        if (hi[k] - lo[k] > 4)
            throw std::invalid_argument(
                "solve_milp_exhaustive: integer range exceeds enumeration budget");
    }

    Solution best;
    best.status = SolStatus::INFEASIBLE;
    double best_obj = kInf;
    bool any_unbounded = false;

    std::vector<long long> vals(d);
    auto recurse = [&](auto&& self, int k) -> void {
        if (k == d) {
            FixedIntegerProblem fp = fix_integer_values(inst, vals);
            LPResult lp = solve_lp(fp.continuous);
            if (lp.status == LPStatus::UNBOUNDED) {
                any_unbounded = true;
                return;
            }
            if (lp.status != LPStatus::OPTIMAL) return;
            double obj = lp.objective + fp.objective_constant;
            if (obj < best_obj - 1e-12) {
                best_obj = obj;
                best.status = SolStatus::OPTIMAL;
                best.x = recompose_solution(fp, inst, vals, lp.x);
                best.objective = obj;
            }
            return;
        }
        for (long long v = lo[k]; v <= hi[k]; ++v) {
            vals[k] = v;
            self(self, k + 1);
        }
    };
    recurse(recurse, 0);

    if (best.status != SolStatus::OPTIMAL && any_unbounded) {
        best.status = SolStatus::UNBOUNDED;
    }
    if (any_unbounded && best.status == SolStatus::OPTIMAL) {
        best.status = SolStatus::UNBOUNDED;
        best.x.clear();
    }
    return best;
}

}  // namespace stratmilp
