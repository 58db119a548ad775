#ifndef STRATMILP_DATAGEN_HPP
#define STRATMILP_DATAGEN_HPP

#include <functional>
#include <optional>

#include "stratmilp/bnb.hpp"
#include "stratmilp/model.hpp"
#include "stratmilp/reduction.hpp"

namespace stratmilp {

struct DatasetRecord {
    int instance_id = 0;
    uint64_t seed = 0;
    std::vector<double> varying;  // sampled values of the varying coords
    double f_star = 0.0;
    std::string label_key;
    int label_index = 0;  // index into the RAW library
};

struct Dataset {
    ParameterizedFamily family;
    std::vector<DatasetRecord> records;
    StrategyLibrary library;
    std::vector<uint64_t> skipped_seeds;
    double final_good_turing = 0.0;
    // Dense N x M table of evaluations; empty until filled.
    std::vector<std::vector<EvalRecord>> reward_table;
    std::vector<std::vector<char>> reward_filled;  // same shape as reward_table

    int num_instances() const { return static_cast<int>(records.size()); }
    bool reward_table_complete() const;
    MILPInstance instance(int i) const {
        return sample_instance(family, records[i].seed);
    }
};

/// N1 / N over a multiset of per-strategy label counts.
double good_turing(const std::vector<int>& strategy_counts);

struct DatagenConfig {
    double gt_threshold = 0.05;
    int min_n = 100;
    int max_n = 2000;
    uint64_t base_seed = 1;
    BnBConfig bnb;
};

/// Samples, labels, and deduplicates until the Good-Turing estimator drops
/// below the threshold (checked at every N >= min_n) or max_n is reached.
/// Unsolvable instances are skipped; more than 50% skipped aborts.
Dataset generate_dataset(const ParameterizedFamily& fam, const DatagenConfig& cfg,
                         const std::function<void(int, int, double)>& progress = {});

/// Fills reward_table[i][j] = apply_strategy(theta_i, s_j) for the requested
/// ranges (defaults: everything). Idempotent; already-filled rows are kept.
void fill_reward_table(Dataset& ds, std::optional<std::pair<int, int>> inst_range = {},
                       std::optional<std::pair<int, int>> strat_range = {});

/// Index-deterministic parallel loop; worker count from MSK_THREADS (>=1).
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace stratmilp

#endif
