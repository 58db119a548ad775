#include "stratmilp/families.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stratmilp {

namespace {

// Keep only coordinates whose base entry is nonzero (zero entries must not
// be perturbed).
void add_varying(ParameterizedFamily& fam, ParamCoord pc) {
    if (get_coord(fam.base_instance, pc) != 0.0) fam.varying.push_back(pc);
}

}  // namespace

ParameterizedFamily build_fuel_cell_family(const FuelCellParams& params, double r) {
    if (params.horizon < 2)
        throw std::invalid_argument("fuel cell: horizon must be at least 2");
    if (params.alpha != 0.0)
        throw std::invalid_argument("fuel cell: quadratic objective not supported");
    if (r < 0.0) throw std::invalid_argument("fuel cell: negative radius");

    const int T = params.horizon;
    std::vector<double> load = params.p_load;
    if (load.empty()) {
        load.resize(T);
        for (int t = 0; t < T; ++t)
            load[t] = 1.5 + 0.8 * std::sin(0.9 * t) + 0.3 * (t % 3);
    }
    if (static_cast<int>(load.size()) != T)
        throw std::invalid_argument("fuel cell: load profile length mismatch");
    std::vector<double> d_past = params.d_past;
    if (d_past.empty()) d_past.assign(T, 0.0);
    if (static_cast<int>(d_past.size()) != T)
        throw std::invalid_argument("fuel cell: switch history length mismatch");

    // Variable layout.
    const int vP = 0;          // P_t, t in [0, T)
    const int vE = vP + T;     // E_{t+1}, t in [0, T)
    const int vZ = vE + T;     // z_t
    const int vWp = vZ + T;    // w+_t
    const int vWm = vWp + T;   // w-_t
    const int vD = vWm + T;    // d_t
    const int vS = vD + T;     // s_{t+1}
    const int n = vS + T;

    MILPInstance inst;
    inst.name = "fuel_cell_T" + std::to_string(T);
    inst.n = n;
    inst.c.assign(n, 0.0);
    inst.lo.assign(n, 0.0);
    inst.hi.assign(n, kInf);
    for (int t = 0; t < T; ++t) {
        inst.c[vP + t] = params.beta;
        inst.c[vZ + t] = params.gamma;
        inst.c[vD + t] = params.switch_cost;
        inst.lo[vE + t] = params.e_min;
        inst.hi[vE + t] = params.e_max;
        inst.hi[vZ + t] = 1.0;
        inst.hi[vWp + t] = 1.0;
        inst.hi[vWm + t] = 1.0;
        inst.hi[vD + t] = 1.0;
        inst.hi[vS + t] = static_cast<double>(params.n_switch);
        inst.integer_index_set.push_back(vZ + t);
        inst.integer_index_set.push_back(vWp + t);
        inst.integer_index_set.push_back(vWm + t);
        inst.integer_index_set.push_back(vD + t);
    }
    std::sort(inst.integer_index_set.begin(), inst.integer_index_set.end());

    std::vector<int> energy_rows, switch_rows, coupling_rows;
    int s_row = -1;
    auto add_row = [&](RowSense sense, double rhs) {
        inst.A.insert(inst.A.end(), n, 0.0);
        inst.b.push_back(rhs);
        inst.row_sense.push_back(sense);
        return inst.m++;
    };

    for (int t = 0; t < T; ++t) {
        // Energy balance: E_{t+1} - E_t - tau P_t = -tau Pl_t  (E_0 folded in).
        int row = add_row(RowSense::EQ, t == 0
                                            ? params.e_init - params.tau * load[t]
                                            : -params.tau * load[t]);
        inst.a(row, vE + t) = 1.0;
        if (t > 0) inst.a(row, vE + t - 1) = -1.0;
        inst.a(row, vP + t) = -params.tau;
        energy_rows.push_back(row);

        // State recursion: z_t - z_{t-1} - w+_t + w-_t = [z_init at t=0].
        row = add_row(RowSense::EQ, t == 0 ? params.z_init : 0.0);
        inst.a(row, vZ + t) = 1.0;
        if (t > 0) inst.a(row, vZ + t - 1) = -1.0;
        inst.a(row, vWp + t) = -1.0;
        inst.a(row, vWm + t) = 1.0;

        // Switch indicator: d_t = w+_t + w-_t.
        row = add_row(RowSense::EQ, 0.0);
        inst.a(row, vD + t) = 1.0;
        inst.a(row, vWp + t) = -1.0;
        inst.a(row, vWm + t) = -1.0;

        // Window count: s_{t+1} - s_t - d_t = -d_{t-T}  (s_0 folded in).
        row = add_row(RowSense::EQ, t == 0 ? params.s_init - d_past[t] : -d_past[t]);
        inst.a(row, vS + t) = 1.0;
        if (t > 0) inst.a(row, vS + t - 1) = -1.0;
        inst.a(row, vD + t) = -1.0;
        switch_rows.push_back(row);
        if (t == 0) s_row = row;

        // Output coupling: P_t <= Pmax z_t.
        row = add_row(RowSense::LE, 0.0);
        inst.a(row, vP + t) = 1.0;
        inst.a(row, vZ + t) = -params.p_max;
        coupling_rows.push_back(row);
    }

    ParameterizedFamily fam;
    fam.name = inst.name;
    fam.base_instance = std::move(inst);
    fam.radius = r;
    for (int row : energy_rows)
        add_varying(fam, {ParamCoord::Target::B, row, 0});
    add_varying(fam, {ParamCoord::Target::B, s_row, 0});
    // Vary the per-period output capacity (the z coefficient in the coupling
    // row) rather than any cost coefficient: total production is fixed by the
    // energy balance, so with uniform costs on/off schedules that serve the
    // same load tie exactly and one strategy can cover many instances.
    for (int t = 0; t < T; ++t)
        add_varying(fam, {ParamCoord::Target::A, coupling_rows[t], vZ + t});
    return fam;
}

ParameterizedFamily build_inventory_family(const InventoryParams& params, double r) {
    if (params.items < 1 || params.periods < 1)
        throw std::invalid_argument("inventory: item/period counts must be >= 1");
    if (r < 0.0) throw std::invalid_argument("inventory: negative radius");

    const int K = params.items, T = params.periods;
    auto xi = [&](int k, int t) { return (k * T + t); };           // order
    const int sBase = K * T;
    auto si = [&](int k, int t) { return sBase + k * T + t; };     // stock
    const int yBase = 2 * K * T;
    auto yi = [&](int k, int t) { return yBase + k * T + t; };     // indicator
    const int n = 3 * K * T;

    MILPInstance inst;
    inst.name = "inventory_" + std::to_string(K) + "x" + std::to_string(T);
    inst.n = n;
    inst.c.assign(n, 0.0);
    inst.lo.assign(n, 0.0);
    inst.hi.assign(n, kInf);
    for (int k = 0; k < K; ++k)
        for (int t = 0; t < T; ++t) {
            inst.c[xi(k, t)] = params.unit_cost;
            inst.c[si(k, t)] = params.holding_cost;
            inst.c[yi(k, t)] = params.order_fixed_cost;
            inst.hi[xi(k, t)] = params.order_cap;
            inst.hi[yi(k, t)] = 1.0;
            inst.integer_index_set.push_back(yi(k, t));
        }

    auto add_row = [&](RowSense sense, double rhs) {
        inst.A.insert(inst.A.end(), n, 0.0);
        inst.b.push_back(rhs);
        inst.row_sense.push_back(sense);
        return inst.m++;
    };

    std::vector<int> balance_rows;
    for (int k = 0; k < K; ++k)
        for (int t = 0; t < T; ++t) {
            // Stock balance: s_{k,t} - s_{k,t-1} - x_{k,t} = -demand.
            int row = add_row(RowSense::EQ,
                              (t == 0 ? params.stock_init : 0.0) - params.demand_base);
            inst.a(row, si(k, t)) = 1.0;
            if (t > 0) inst.a(row, si(k, t - 1)) = -1.0;
            inst.a(row, xi(k, t)) = -1.0;
            balance_rows.push_back(row);
        }
    for (int k = 0; k < K; ++k)
        for (int t = 0; t < T; ++t) {
            int row = add_row(RowSense::LE, 0.0);  // x <= cap * y
            inst.a(row, xi(k, t)) = 1.0;
            inst.a(row, yi(k, t)) = -params.order_cap;
        }
    for (int t = 0; t < T; ++t) {
        int row = add_row(RowSense::LE, params.warehouse_cap);
        for (int k = 0; k < K; ++k) inst.a(row, si(k, t)) = 1.0;
    }

    ParameterizedFamily fam;
    fam.name = inst.name;
    fam.base_instance = std::move(inst);
    fam.radius = r;
    for (int row : balance_rows)
        add_varying(fam, {ParamCoord::Target::B, row, 0});
    for (int k = 0; k < K; ++k)
        for (int t = 0; t < T; ++t)
            add_varying(fam, {ParamCoord::Target::C, 0, xi(k, t)});
    return fam;
}

}  // namespace stratmilp
