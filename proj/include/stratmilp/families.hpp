#ifndef STRATMILP_FAMILIES_HPP
#define STRATMILP_FAMILIES_HPP

#include "stratmilp/model.hpp"

namespace stratmilp {

/// Fuel-cell energy management over T periods, linearized (no quadratic
/// fuel term). Decision layout per period t: power P_t, stored energy
/// E_{t+1}, on/off state z_t, switch-up w+_t, switch-down w-_t, switch
/// indicator d_t, and switch count s_{t+1}.
struct FuelCellParams {
    int horizon = 5;          // T
    double alpha = 0.0;       // quadratic fuel coefficient; must be 0
    double beta = 1.0;        // linear fuel cost
    double gamma = 0.4;       // on-state cost
    double switch_cost = 0.05;  // wear cost per switch
    double tau = 1.0;         // sampling time
    double e_min = 0.0;
    double e_max = 2.5;
    double e_init = 0.5;
    double p_max = 3.0;
    int n_switch = 2;         // switch budget within the sliding window
    double z_init = 1.0;      // fixed across the family (kept integral)
    double s_init = 1.0;
    std::vector<double> p_load;  // length T; default: sinusoid-like profile
    std::vector<double> d_past;  // length T; fixed across the family
};

/// Varying coordinates: the load profile and initial energy/switch-count
/// (through the equality RHS entries), plus the per-period output capacity
/// coefficient in the coupling rows. Costs stay uniform across the family.
ParameterizedFamily build_fuel_cell_family(const FuelCellParams& params, double r);

/// Synthetic multi-item lot-sizing stand-in for the inventory scenario:
/// per item/period order quantity x, stock s, and a binary order indicator.
struct InventoryParams {
    int items = 3;
    int periods = 4;
    double order_cap = 12.0;       // per item/period order limit
    double warehouse_cap = 30.0;   // total stock per period
    double holding_cost = 0.3;
    double order_fixed_cost = 2.0;
    double unit_cost = 1.0;
    double demand_base = 4.0;      // per item/period demand center
    double stock_init = 2.0;
};

/// Varying coordinates: every demand entry and every unit-cost entry.
ParameterizedFamily build_inventory_family(const InventoryParams& params, double r);

}  // namespace stratmilp

#endif
