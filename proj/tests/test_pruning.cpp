#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "stratmilp/datagen.hpp"
#include "stratmilp/families.hpp"
#include "stratmilp/pruning.hpp"

using namespace stratmilp;

namespace {

// Dataset shell with a hand-placed p/d table; only the fields the graph
// builder and the cover need are populated.
Dataset table_dataset(const std::vector<std::vector<std::pair<double, double>>>& pd) {
    Dataset ds;
    const int n = static_cast<int>(pd.size());
    const int m = n > 0 ? static_cast<int>(pd[0].size()) : 0;
    ds.records.resize(n);
    for (int j = 0; j < m; ++j) {
        Strategy s;
        s.tight_set = {j};
        s.key = canonical_strategy_key(s);
        ds.library.add(std::move(s));
    }
    ds.reward_table.assign(n, std::vector<EvalRecord>(m));
    ds.reward_filled.assign(n, std::vector<char>(m, 1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            ds.reward_table[i][j].infeasibility = pd[i][j].first;
            ds.reward_table[i][j].suboptimality = pd[i][j].second;
        }
    return ds;
}

BipartiteGraph graph_from_sets(int n_inst,
                               const std::vector<std::vector<int>>& covered) {
    BipartiteGraph g;
    g.n_instances = n_inst;
    g.n_strategies = static_cast<int>(covered.size());
    g.covered = covered;
    std::vector<char> has(n_inst, 0);
    for (const auto& c : covered)
        for (int i : c) has[i] = 1;
    for (int i = 0; i < n_inst; ++i)
        if (!has[i]) g.uncovered_instances.push_back(i);
    return g;
}

StrategyLibrary dummy_library(int m) {
    StrategyLibrary lib;
    for (int j = 0; j < m; ++j) {
        Strategy s;
        s.tight_set = {j};
        lib.add(std::move(s));
    }
    return lib;
}

}  // namespace

TEST_CASE("infinite thresholds produce the complete bipartite graph") {
    auto ds = table_dataset({{{5.0, 0.0}, {0.0, 9.0}}, {{1.0, 1.0}, {2.0, 2.0}}});
    auto g = build_bipartite(ds, kInf, kInf);
    CHECK(g.covered[0] == std::vector<int>{0, 1});
    CHECK(g.covered[1] == std::vector<int>{0, 1});
    CHECK(g.uncovered_instances.empty());
}

TEST_CASE("5x3 hand table yields the expected edge set") {
    const double in = 1.0;  // above either threshold
    auto ds = table_dataset({
        {{0.0, 0.0}, {in, 0.0}, {0.0, in}},   // covered by s0 only
        {{0.0, 0.0}, {0.0, 0.0}, {in, in}},   // s0, s1
        {{in, 0.0}, {0.0, 0.0}, {0.0, 0.0}},  // s1, s2
        {{in, in}, {in, in}, {0.0, 0.0}},     // s2 only
        {{0.0, 0.0}, {in, in}, {0.0, 0.0}},   // s0, s2
    });
    auto g = build_bipartite(ds, 1e-4, 1e-4);
    CHECK(g.covered[0] == std::vector<int>{0, 1, 4});
    CHECK(g.covered[1] == std::vector<int>{1, 2});
    CHECK(g.covered[2] == std::vector<int>{2, 3, 4});
    CHECK(g.uncovered_instances.empty());

    // Greedy: s0 covers 3, then s2 covers {2,3}; s1 never needed.
    auto pr = greedy_set_cover(g, ds.library);
    CHECK(pr.selected == std::vector<int>{0, 2});
    CHECK(pr.library.origin == LibraryOrigin::PRUNED);
    CHECK(pr.old_to_new == std::vector<int>{0, -1, 1});
}

TEST_CASE("uncovered instance aborts the cover") {
    auto g = graph_from_sets(2, {{0}});
    CHECK(g.uncovered_instances == std::vector<int>{1});
    auto lib = dummy_library(1);
    CHECK_THROWS(greedy_set_cover(g, lib));
}

TEST_CASE("A covers {0,1}, B covers {1,2}: both picked, A first") {
    auto g = graph_from_sets(3, {{0, 1}, {1, 2}});
    auto lib = dummy_library(2);
    auto pr = greedy_set_cover(g, lib);
    CHECK(pr.selected == std::vector<int>{0, 1});
}

TEST_CASE("a universal strategy wins alone") {
    auto g = graph_from_sets(4, {{1, 2}, {0, 1, 2, 3}, {0, 3}});
    auto lib = dummy_library(3);
    auto pr = greedy_set_cover(g, lib);
    CHECK(pr.selected == std::vector<int>{1});
    CHECK(pr.library.size() == 1);
}

TEST_CASE("greedy stays within the harmonic bound on random 30x12 graphs") {
    // H(30) <= ln 30 + 1; the optimum comes from exhaustive subset search.
    const double bound_factor = std::log(30.0) + 1.0;
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 20; ++trial) {
        CAPTURE(trial);
        const int n = 30, m = 12;
        std::vector<std::vector<int>> covered(m);
        // Each instance gets >= 1 edge; extra edges with probability 0.2.
        for (int i = 0; i < n; ++i) {
            covered[rng() % m].push_back(i);
            for (int j = 0; j < m; ++j)
                if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.2)
                    covered[j].push_back(i);
        }
        for (auto& c : covered) {
            std::sort(c.begin(), c.end());
            c.erase(std::unique(c.begin(), c.end()), c.end());
        }
        auto g = graph_from_sets(n, covered);
        REQUIRE(g.uncovered_instances.empty());
        auto lib = dummy_library(m);
        auto pr = greedy_set_cover(g, lib);

        // Exhaustive optimum over all 2^12 subsets.
        std::vector<uint32_t> masks(m, 0);  // n = 30 fits in 32 bits
        for (int j = 0; j < m; ++j)
            for (int i : covered[j]) masks[j] |= uint32_t{1} << i;
        const uint32_t full = (uint32_t{1} << n) - 1;
        int opt = m;
        for (uint32_t sub = 0; sub < (uint32_t{1} << m); ++sub) {
            uint32_t got = 0;
            for (int j = 0; j < m; ++j)
                if (sub & (uint32_t{1} << j)) got |= masks[j];
            if (got == full)
                opt = std::min(opt, __builtin_popcount(sub));
        }
        CHECK(pr.library.size() <= bound_factor * opt);
        CHECK(pr.library.size() >= opt);
    }
}

TEST_CASE("labeled fuel-cell dataset: full cover and a smaller pruned library") {
    FuelCellParams p;
    auto fam = build_fuel_cell_family(p, 0.25);
    DatagenConfig dc;
    dc.min_n = 120;
    dc.max_n = 400;
    dc.base_seed = 3;
    dc.bnb.node_limit = 3000;
    auto ds = generate_dataset(fam, dc);
    fill_reward_table(ds);
    auto g = build_bipartite(ds, 1e-4, 1e-4);
    CHECK(g.uncovered_instances.empty());
    auto pr = greedy_set_cover(g, ds.library);
    CHECK(pr.library.size() < ds.library.size());
    // selected/old_to_new agree.
    for (int j = 0; j < ds.library.size(); ++j) {
        int nj = pr.old_to_new[j];
        if (nj >= 0) CHECK(pr.selected[nj] == j);
    }
}
