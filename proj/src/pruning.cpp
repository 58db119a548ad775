#include "stratmilp/pruning.hpp"

#include <stdexcept>

namespace stratmilp {

BipartiteGraph build_bipartite(const Dataset& ds, double eps_p, double eps_d) {
    if (!ds.reward_table_complete())
        throw std::invalid_argument("build_bipartite: reward table incomplete");
    BipartiteGraph g;
    g.n_instances = ds.num_instances();
    g.n_strategies = ds.library.size();
    g.eps_p = eps_p;
    g.eps_d = eps_d;
    g.covered.assign(g.n_strategies, {});
    std::vector<char> has_edge(g.n_instances, 0);
    for (int i = 0; i < g.n_instances; ++i)
        for (int j = 0; j < g.n_strategies; ++j) {
            const EvalRecord& r = ds.reward_table[i][j];
            if (r.infeasibility <= eps_p && r.suboptimality <= eps_d) {
                g.covered[j].push_back(i);
                has_edge[i] = 1;
            }
        }
    for (int i = 0; i < g.n_instances; ++i)
        if (!has_edge[i]) g.uncovered_instances.push_back(i);
    return g;
}

PruneResult greedy_set_cover(const BipartiteGraph& g, const StrategyLibrary& library) {
    if (!g.uncovered_instances.empty())
        throw std::invalid_argument(
            "greedy_set_cover: instances without any covering strategy");
    if (g.n_strategies != library.size())
        throw std::invalid_argument("greedy_set_cover: library size mismatch");

    const int words = (g.n_instances + 63) / 64;
    std::vector<std::vector<uint64_t>> sets(g.n_strategies,
                                            std::vector<uint64_t>(words, 0));
    for (int j = 0; j < g.n_strategies; ++j)
        for (int i : g.covered[j]) sets[j][i >> 6] |= uint64_t{1} << (i & 63);

    std::vector<uint64_t> uncovered(words, 0);
    for (int i = 0; i < g.n_instances; ++i)
        uncovered[i >> 6] |= uint64_t{1} << (i & 63);
    int remaining = g.n_instances;

    PruneResult out;
    out.old_to_new.assign(g.n_strategies, -1);
    while (remaining > 0) {
        int best = -1;
        int best_gain = 0;
        for (int j = 0; j < g.n_strategies; ++j) {
            if (out.old_to_new[j] >= 0) continue;
            int gain = 0;
            for (int w = 0; w < words; ++w)
                gain += __builtin_popcountll(sets[j][w] & uncovered[w]);
            if (gain > best_gain) {  // strict: ties keep the lowest index
                best_gain = gain;
                best = j;
            }
        }
        if (best < 0)
            throw std::runtime_error("greedy_set_cover: cover stalled");
        out.old_to_new[best] = static_cast<int>(out.selected.size());
        out.selected.push_back(best);
        for (int w = 0; w < words; ++w) uncovered[w] &= ~sets[best][w];
        remaining -= best_gain;
    }

    out.library.origin = LibraryOrigin::PRUNED;
    for (int j : out.selected) {
        out.library.strategies.push_back(library.strategies[j]);
        out.library.provenance.push_back(library.provenance[j]);
    }
    return out;
}

}  // namespace stratmilp
