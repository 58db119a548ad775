#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stratmilp/bnb.hpp"
#include "stratmilp/datagen.hpp"
#include "stratmilp/families.hpp"
#include "stratmilp/pruning.hpp"

using namespace stratmilp;

TEST_CASE("fuel cell: zero load with the cell off costs nothing") {
    FuelCellParams p;
    p.horizon = 2;
    p.z_init = 0.0;
    p.s_init = 0.0;
    p.e_init = 0.0;
    p.p_load = {0.0, 0.0};
    auto fam = build_fuel_cell_family(p, 0.0);
    REQUIRE(validate_family(fam).ok());
    auto sol = solve_milp(fam.base_instance);
    REQUIRE(sol.status == SolStatus::OPTIMAL);
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("fuel cell: load beyond storage plus capacity is infeasible") {
    FuelCellParams p;
    p.horizon = 2;
    p.e_init = 0.5;
    p.e_max = 1.0;
    p.p_max = 1.0;
    p.p_load = {10.0, 0.0};  // cannot be served in period 0
    auto fam = build_fuel_cell_family(p, 0.0);
    auto sol = solve_milp(fam.base_instance);
    CHECK(sol.status == SolStatus::INFEASIBLE);
}

TEST_CASE("fuel cell base instance is well-formed and solvable") {
    FuelCellParams p;  // T = 5 defaults
    auto fam = build_fuel_cell_family(p, 0.25);
    REQUIRE(validate_family(fam).ok());
    auto sol = solve_milp(fam.base_instance);
    REQUIRE(sol.status == SolStatus::OPTIMAL);
    // 7 variables and 5 rows per period.
    CHECK(fam.base_instance.n == 7 * p.horizon);
    CHECK(fam.base_instance.m == 5 * p.horizon);
    // All on/off and switch indicators are integral.
    CHECK(static_cast<int>(fam.base_instance.integer_index_set.size()) ==
          4 * p.horizon);
}

TEST_CASE("fuel cell T=5 family: pipeline terminates and the cover holds") {
    FuelCellParams p;
    auto fam = build_fuel_cell_family(p, 0.25);
    DatagenConfig dc;
    dc.min_n = 150;
    dc.max_n = 400;
    dc.base_seed = 11;
    dc.bnb.node_limit = 3000;
    auto ds = generate_dataset(fam, dc);
    CHECK(ds.library.size() < ds.num_instances());
    fill_reward_table(ds);
    auto g = build_bipartite(ds, 1e-4, 1e-4);
    CHECK(g.uncovered_instances.empty());
    // Multi-coverage: pruning buys a strictly smaller library.
    auto pr = greedy_set_cover(g, ds.library);
    CHECK(pr.library.size() < ds.library.size());
}

TEST_CASE("inventory: zero demand costs nothing") {
    InventoryParams p;
    p.items = 1;
    p.periods = 1;
    p.demand_base = 0.0;
    p.stock_init = 0.0;
    auto fam = build_inventory_family(p, 0.0);
    REQUIRE(validate_family(fam).ok());
    auto sol = solve_milp(fam.base_instance);
    REQUIRE(sol.status == SolStatus::OPTIMAL);
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("inventory: demand above total capacity is infeasible") {
    InventoryParams p;
    p.items = 1;
    p.periods = 1;
    p.order_cap = 1.0;
    p.stock_init = 0.0;
    p.demand_base = 5.0;
    auto fam = build_inventory_family(p, 0.0);
    auto sol = solve_milp(fam.base_instance);
    CHECK(sol.status == SolStatus::INFEASIBLE);
}

TEST_CASE("inventory base instance solves with positive cost") {
    InventoryParams p;  // 3 items x 4 periods defaults
    auto fam = build_inventory_family(p, 0.1);
    REQUIRE(validate_family(fam).ok());
    auto sol = solve_milp(fam.base_instance);
    REQUIRE(sol.status == SolStatus::OPTIMAL);
    CHECK(sol.objective > 0.0);
}
