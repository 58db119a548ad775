#include "stratmilp/datagen.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace stratmilp {

bool Dataset::reward_table_complete() const {
    if (static_cast<int>(reward_table.size()) != num_instances()) return false;
    if (reward_filled.size() != reward_table.size()) return false;
    for (int i = 0; i < num_instances(); ++i) {
        if (static_cast<int>(reward_table[i].size()) != library.size()) return false;
        for (char f : reward_filled[i])
            if (!f) return false;
        if (static_cast<int>(reward_filled[i].size()) != library.size()) return false;
    }
    return true;
}

double good_turing(const std::vector<int>& strategy_counts) {
    long n = 0, n1 = 0;
    for (int c : strategy_counts) {
        n += c;
        if (c == 1) ++n1;
    }
    if (n < 1) throw std::invalid_argument("good_turing: empty count multiset");
    return static_cast<double>(n1) / static_cast<double>(n);
}

Dataset generate_dataset(const ParameterizedFamily& fam, const DatagenConfig& cfg,
                         const std::function<void(int, int, double)>& progress) {
    if (cfg.min_n < 1 || cfg.min_n > cfg.max_n)
        throw std::invalid_argument("generate_dataset: need 1 <= min_n <= max_n");
    if (cfg.gt_threshold <= 0.0 || cfg.gt_threshold > 1.0)
        throw std::invalid_argument("generate_dataset: gt_threshold must be in (0,1]");
    ValidationReport rep = validate_family(fam);
    if (!rep.ok())
        throw std::invalid_argument("generate_dataset: invalid family: " +
                                    rep.issues.front());

    Dataset ds;
    ds.family = fam;
    uint64_t seed = cfg.base_seed;
    while (ds.num_instances() < cfg.max_n) {
        MILPInstance inst = sample_instance(fam, seed);
        Solution sol = solve_milp(inst, cfg.bnb);
        if (sol.status != SolStatus::OPTIMAL) {
            ds.skipped_seeds.push_back(seed);
            long attempted = ds.num_instances() + ds.skipped_seeds.size();
            if (attempted >= 20 &&
                ds.skipped_seeds.size() * 2 > static_cast<size_t>(attempted))
                throw std::runtime_error(
                    "generate_dataset: over 50% of sampled instances unsolvable");
            ++seed;
            continue;
        }
        Strategy s = extract_strategy(inst, sol);
        auto [idx, fresh] = ds.library.add(std::move(s));

        DatasetRecord rec;
        rec.instance_id = ds.num_instances();
        rec.seed = seed;
        rec.varying.reserve(fam.varying.size());
        for (const auto& pc : fam.varying) rec.varying.push_back(get_coord(inst, pc));
        rec.f_star = sol.objective;
        rec.label_key = ds.library.strategies[idx].key;
        rec.label_index = idx;
        ds.records.push_back(std::move(rec));
        ++seed;

        ds.final_good_turing = good_turing(ds.library.provenance);
        if (progress)
            progress(ds.num_instances(), ds.library.size(), ds.final_good_turing);
        if (ds.num_instances() >= cfg.min_n &&
            ds.final_good_turing <= cfg.gt_threshold)
            break;
    }
    return ds;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MSK_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) workers = v;
    }
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

void fill_reward_table(Dataset& ds, std::optional<std::pair<int, int>> inst_range,
                       std::optional<std::pair<int, int>> strat_range) {
    const int n = ds.num_instances();
    const int mstrat = ds.library.size();
    auto [i0, i1] = inst_range.value_or(std::make_pair(0, n));
    auto [j0, j1] = strat_range.value_or(std::make_pair(0, mstrat));
    if (i0 < 0 || i1 > n || j0 < 0 || j1 > mstrat || i0 > i1 || j0 > j1)
        throw std::invalid_argument("fill_reward_table: range out of bounds");

    if (static_cast<int>(ds.reward_table.size()) != n) ds.reward_table.resize(n);
    if (static_cast<int>(ds.reward_filled.size()) != n) ds.reward_filled.resize(n);

    parallel_for(i1 - i0, [&](int off) {
        int i = i0 + off;
        auto& row = ds.reward_table[i];
        auto& filled = ds.reward_filled[i];
        if (static_cast<int>(row.size()) != mstrat) row.resize(mstrat);
        if (static_cast<int>(filled.size()) != mstrat) filled.resize(mstrat, 0);
        bool todo = false;
        for (int j = j0; j < j1 && !todo; ++j) todo = !filled[j];
        if (!todo) return;
        MILPInstance inst = ds.instance(i);
        for (int j = j0; j < j1; ++j) {
            if (filled[j]) continue;
            row[j] = apply_strategy(inst, ds.library.strategies[j],
                                    ds.records[i].f_star)
                         .record;
            filled[j] = 1;
        }
    });
}

}  // namespace stratmilp
