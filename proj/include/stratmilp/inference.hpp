#ifndef STRATMILP_INFERENCE_HPP
#define STRATMILP_INFERENCE_HPP

#include "stratmilp/learner.hpp"
#include "stratmilp/reduction.hpp"

namespace stratmilp {

/// Indices of the k largest predicted rewards, ties to the lower index.
std::vector<int> top_k(const VectorXd& r_hat, int k);

struct SelectionResult {
    int strategy_index = -1;  // index into the candidate library
    Solution solution;
    EvalRecord record;
    bool all_infeasible = false;
};

/// Applies every candidate and keeps the one with the lowest infeasibility
/// (ties, up to round-off: lower suboptimality, then lower index). Candidate
/// evaluations run in parallel; the result is order-independent.
SelectionResult select_strategy(const MILPInstance& inst,
                                const std::vector<int>& candidates,
                                const StrategyLibrary& library, double f_star);

struct Metrics {
    double accuracy = 0.0;
    double mean_infeasibility = 0.0, max_infeasibility = 0.0;
    double mean_suboptimality = 0.0, max_suboptimality = 0.0;
    double median_inference_s = 0.0;   // encode + forward + candidate solves
    double median_bnb_s = 0.0;
    double speedup_ratio = 0.0;        // median_bnb / median_inference
    int n_instances = 0;
    std::vector<double> per_instance_p, per_instance_d;
    std::vector<double> per_instance_inference_s, per_instance_bnb_s;
    std::vector<int> per_instance_choice;
};

struct TestInstance {
    MILPInstance instance;
    VectorXd varying;
    double f_star = 0.0;
    double bnb_time_s = 0.0;
};

/// Samples and labels a test split (seeds base_seed, base_seed+1, ...;
/// unsolvable instances skipped).
std::vector<TestInstance> make_test_split(const ParameterizedFamily& fam, int n_test,
                                          uint64_t base_seed,
                                          const BnBConfig& bnb = {});

Metrics evaluate(const RewardModel& model, const std::vector<TestInstance>& split,
                 const StrategyLibrary& library, int k, double eps1 = 1e-4,
                 double eps2 = 1e-4);

}  // namespace stratmilp

#endif
