#include "stratmilp/random_milp.hpp"

#include <random>

namespace stratmilp {

MILPInstance make_random_milp(uint64_t seed, int max_bin, int max_cont,
                              int max_rows) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coef(-2, 2);
    std::uniform_int_distribution<int> obj(-10, 10);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int nb =
        max_bin >= 1 ? std::uniform_int_distribution<int>(1, max_bin)(rng) : 0;
    const int nc = std::uniform_int_distribution<int>(nb > 0 ? 0 : 1, max_cont)(rng);
    const int n = nb + nc;

    MILPInstance inst;
    inst.name = "random-" + std::to_string(seed);
    inst.n = n;
    inst.c.resize(n);
    inst.lo.assign(n, 0.0);
    inst.hi.resize(n);
    for (int j = 0; j < n; ++j) {
        inst.c[j] = obj(rng) / 2.0;
        inst.hi[j] = j < nb ? 1.0 : 3.0;
        if (j < nb) inst.integer_index_set.push_back(j);
    }

    // Anchor point: rows get RHS values that keep it feasible, so the
    // instance is feasible and (via the bounds) bounded.
    std::vector<double> x0(n);
    for (int j = 0; j < n; ++j)
        x0[j] = j < nb ? static_cast<double>(rng() & 1) : 3.0 * unit(rng);

    std::uniform_int_distribution<int> row_count(1, max_rows);
    const int m = row_count(rng);
    inst.m = m;
    inst.A.assign(static_cast<size_t>(m) * n, 0.0);
    inst.b.resize(m);
    inst.row_sense.resize(m);
    for (int i = 0; i < m; ++i) {
        double act = 0.0;
        bool nonzero = false;
        for (int j = 0; j < n; ++j) {
            double v = unit(rng) < 0.6 ? coef(rng) : 0.0;
            inst.a(i, j) = v;
            act += v * x0[j];
            if (v != 0.0) nonzero = true;
        }
        if (!nonzero) {
            inst.a(i, i % n) = 1.0;
            act += x0[i % n];
        }
        if (unit(rng) < 0.2) {
            inst.row_sense[i] = RowSense::EQ;
            inst.b[i] = act;
        } else {
            inst.row_sense[i] = RowSense::LE;
            inst.b[i] = act + 3.0 * unit(rng);
        }
    }
    return inst;
}

}  // namespace stratmilp
