#include "stratmilp/inference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stratmilp/bnb.hpp"

namespace stratmilp {

std::vector<int> top_k(const VectorXd& r_hat, int k) {
    const int mp = static_cast<int>(r_hat.size());
    if (k < 1 || k > mp)
        throw std::invalid_argument("top_k: k out of range");
    std::vector<int> idx(mp);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return r_hat(a) > r_hat(b); });
    idx.resize(k);
    return idx;
}

SelectionResult select_strategy(const MILPInstance& inst,
                                const std::vector<int>& candidates,
                                const StrategyLibrary& library, double f_star) {
    if (candidates.empty())
        throw std::invalid_argument("select_strategy: empty candidate set");
    std::vector<ApplyResult> results(candidates.size());
    parallel_for(static_cast<int>(candidates.size()), [&](int t) {
        results[t] = apply_strategy(inst, library.strategies[candidates[t]], f_star);
    });

    // Infeasibilities within round-off of each other count as a tie so that
    // suboptimality decides; otherwise a candidate at exactly 0 would beat one
    // at 1e-16 regardless of solution quality.
    constexpr double kTieTol = 1e-9;
    int best = 0;
    for (size_t t = 1; t < results.size(); ++t) {
        const EvalRecord &a = results[t].record, &b = results[best].record;
        const bool p_tie = std::abs(a.infeasibility - b.infeasibility) <= kTieTol;
        if ((!p_tie && a.infeasibility < b.infeasibility) ||
            (p_tie && (a.suboptimality < b.suboptimality ||
                       (a.suboptimality == b.suboptimality &&
                        candidates[t] < candidates[best]))))
            best = static_cast<int>(t);
    }
    SelectionResult out;
    out.strategy_index = candidates[best];
    out.solution = results[best].solution;
    out.record = results[best].record;
    out.all_infeasible = true;
    for (const auto& r : results)
        if (r.record.reduced_status != ReducedStatus::INFEASIBLE)
            out.all_infeasible = false;
    return out;
}

std::vector<TestInstance> make_test_split(const ParameterizedFamily& fam, int n_test,
                                          uint64_t base_seed, const BnBConfig& bnb) {
    std::vector<TestInstance> split;
    uint64_t seed = base_seed;
    long skipped = 0;
    while (static_cast<int>(split.size()) < n_test) {
        MILPInstance inst = sample_instance(fam, seed);
        auto t0 = std::chrono::steady_clock::now();
        Solution sol = solve_milp(inst, bnb);
        double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        if (sol.status == SolStatus::OPTIMAL) {
            TestInstance ti;
            ti.varying.resize(fam.varying.size());
            for (size_t k = 0; k < fam.varying.size(); ++k)
                ti.varying(static_cast<Eigen::Index>(k)) =
                    get_coord(inst, fam.varying[k]);
            ti.instance = std::move(inst);
            ti.f_star = sol.objective;
            ti.bnb_time_s = dt;
            split.push_back(std::move(ti));
        } else if (++skipped > 2L * n_test + 20) {
            throw std::runtime_error("make_test_split: too many unsolvable instances");
        }
        ++seed;
    }
    return split;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

Metrics evaluate(const RewardModel& model, const std::vector<TestInstance>& split,
                 const StrategyLibrary& library, int k, double eps1, double eps2) {
    Metrics m;
    m.n_instances = static_cast<int>(split.size());
    const int m_mat =
        split.empty() ? 0 : materialized_row_count(split.front().instance);
    const int n_int =
        split.empty() ? 0
                      : static_cast<int>(split.front().instance.integer_index_set.size());
    int accurate = 0;
    for (const TestInstance& ti : split) {
        auto t0 = std::chrono::steady_clock::now();
        MatrixXd tokens = encode_batch(ti.varying, library, m_mat, n_int, model.norm);
        VectorXd r_hat = forward(model, tokens);
        std::vector<int> cands = top_k(r_hat, std::min<int>(k, library.size()));
        SelectionResult sel = select_strategy(ti.instance, cands, library, ti.f_star);
        double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();

        double p = sel.record.infeasibility, d = sel.record.suboptimality;
        if (p <= eps1 && d <= eps2) ++accurate;
        m.per_instance_p.push_back(p);
        m.per_instance_d.push_back(d);
        m.per_instance_inference_s.push_back(dt);
        m.per_instance_bnb_s.push_back(ti.bnb_time_s);
        m.per_instance_choice.push_back(sel.strategy_index);
    }
    if (m.n_instances > 0) {
        m.accuracy = static_cast<double>(accurate) / m.n_instances;
        auto mean = [](const std::vector<double>& v) {
            return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        };
        m.mean_infeasibility = mean(m.per_instance_p);
        m.max_infeasibility = *std::max_element(m.per_instance_p.begin(),
                                                m.per_instance_p.end());
        m.mean_suboptimality = mean(m.per_instance_d);
        m.max_suboptimality = *std::max_element(m.per_instance_d.begin(),
                                                m.per_instance_d.end());
        m.median_inference_s = median(m.per_instance_inference_s);
        m.median_bnb_s = median(m.per_instance_bnb_s);
        if (m.median_inference_s > 0.0)
            m.speedup_ratio = m.median_bnb_s / m.median_inference_s;
    }
    return m;
}

}  // namespace stratmilp
