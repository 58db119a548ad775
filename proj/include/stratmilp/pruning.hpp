#ifndef STRATMILP_PRUNING_HPP
#define STRATMILP_PRUNING_HPP

#include "stratmilp/datagen.hpp"
#include "stratmilp/model.hpp"

namespace stratmilp {

/// Instance-Strategy bipartite graph: strategy j covers instance i when
/// both the infeasibility and suboptimality of applying j to i are within
/// the thresholds.
struct BipartiteGraph {
    int n_instances = 0;
    int n_strategies = 0;
    double eps_p = 1e-4;
    double eps_d = 1e-4;
    std::vector<std::vector<int>> covered;  // per strategy, sorted instances
    std::vector<int> uncovered_instances;   // instances with no edge at all
};

BipartiteGraph build_bipartite(const Dataset& ds, double eps_p = 1e-4,
                               double eps_d = 1e-4);

struct PruneResult {
    StrategyLibrary library;       // origin PRUNED, selection order preserved
    std::vector<int> selected;     // old indices in selection order
    std::vector<int> old_to_new;   // -1 for dropped strategies
};

/// Greedy set cover: repeatedly pick the strategy covering the most still
/// uncovered instances (ties to the lowest strategy index). Throws if some
/// instance has no edge.
PruneResult greedy_set_cover(const BipartiteGraph& g, const StrategyLibrary& library);

}  // namespace stratmilp

#endif
