#include "stratmilp/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stratmilp {

std::vector<double> MILPInstance::row_activity(const std::vector<double>& x) const {
    std::vector<double> g(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        const double* row = A.data() + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) s += row[j] * x[j];
        g[i] = s;
    }
    return g;
}

ValidationReport validate_instance(const MILPInstance& inst) {
    ValidationReport rep;
    auto add = [&](const std::string& s) { rep.issues.push_back(s); };
    if (inst.n <= 0) add("variable count must be positive");
    if (inst.m < 0) add("row count must be nonnegative");
    if (static_cast<int>(inst.c.size()) != inst.n)
        add("dimension mismatch: |c| != n");
    if (inst.A.size() != static_cast<size_t>(inst.m) * std::max(inst.n, 0))
        add("dimension mismatch: A is not m x n");
    if (static_cast<int>(inst.b.size()) != inst.m)
        add("dimension mismatch: |b| != m");
    if (static_cast<int>(inst.row_sense.size()) != inst.m)
        add("dimension mismatch: |row_sense| != m");
    if (static_cast<int>(inst.lo.size()) != inst.n ||
        static_cast<int>(inst.hi.size()) != inst.n)
        add("dimension mismatch: bounds are not length n");

    for (size_t k = 0; k < inst.integer_index_set.size(); ++k) {
        int j = inst.integer_index_set[k];
        if (j < 0 || j >= inst.n) {
            add("integer index out of range");
            break;
        }
        if (k > 0 && inst.integer_index_set[k - 1] == j) {
            add("duplicate integer index");
            break;
        }
        if (k > 0 && inst.integer_index_set[k - 1] > j) {
            add("integer index set not sorted");
            break;
        }
    }
    if (inst.lo.size() == inst.hi.size() &&
        static_cast<int>(inst.lo.size()) == inst.n) {
        for (int j = 0; j < inst.n; ++j)
            if (inst.lo[j] > inst.hi[j]) {
                add("variable bound with lo > hi");
                break;
            }
    }
    auto finite_all = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    if (!finite_all(inst.c) || !finite_all(inst.A) || !finite_all(inst.b))
        add("non-finite entry in c, A, or b");
    return rep;
}

double get_coord(const MILPInstance& inst, const ParamCoord& pc) {
    switch (pc.target) {
        case ParamCoord::Target::B: return inst.b[pc.row];
        case ParamCoord::Target::C: return inst.c[pc.col];
        case ParamCoord::Target::A: return inst.a(pc.row, pc.col);
    }
    return 0.0;
}

void set_coord(MILPInstance& inst, const ParamCoord& pc, double v) {
    switch (pc.target) {
        case ParamCoord::Target::B: inst.b[pc.row] = v; break;
        case ParamCoord::Target::C: inst.c[pc.col] = v; break;
        case ParamCoord::Target::A: inst.a(pc.row, pc.col) = v; break;
    }
}

ValidationReport validate_family(const ParameterizedFamily& fam) {
    ValidationReport rep = validate_instance(fam.base_instance);
    if (fam.radius < 0.0) rep.issues.push_back("radius must be nonnegative");
    for (const auto& pc : fam.varying) {
        bool in_range = true;
        switch (pc.target) {
            case ParamCoord::Target::B:
                in_range = pc.row >= 0 && pc.row < fam.base_instance.m;
                break;
            case ParamCoord::Target::C:
                in_range = pc.col >= 0 && pc.col < fam.base_instance.n;
                break;
            case ParamCoord::Target::A:
                in_range = pc.row >= 0 && pc.row < fam.base_instance.m &&
                           pc.col >= 0 && pc.col < fam.base_instance.n;
                break;
        }
        if (!in_range) {
            rep.issues.push_back("varying coordinate out of range");
            continue;
        }
        if (get_coord(fam.base_instance, pc) == 0.0)
            rep.issues.push_back("varying coordinate with zero base entry");
    }
    return rep;
}

MILPInstance sample_instance(const ParameterizedFamily& fam, uint64_t seed) {
    MILPInstance inst = fam.base_instance;
    const int dim = static_cast<int>(fam.varying.size());
    if (dim == 0 || fam.radius == 0.0) return inst;

    // Uniform ball draw: Gaussian direction scaled by r * U^(1/dim).
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> g(dim);
    double norm2 = 0.0;
    for (int k = 0; k < dim; ++k) {
        g[k] = gauss(rng);
        norm2 += g[k] * g[k];
    }
    double norm = std::sqrt(norm2);
    if (norm == 0.0) norm = 1.0;
    double rad = fam.radius * std::pow(unif(rng), 1.0 / dim);
    for (int k = 0; k < dim; ++k) {
        const ParamCoord& pc = fam.varying[k];
        set_coord(inst, pc, get_coord(fam.base_instance, pc) + rad * g[k] / norm);
    }
    return inst;
}

std::string canonical_strategy_key(const Strategy& s) {
    std::vector<int> tight = s.tight_set;
    std::sort(tight.begin(), tight.end());
    tight.erase(std::unique(tight.begin(), tight.end()), tight.end());
    std::ostringstream os;
    os << "T:";
    for (size_t k = 0; k < tight.size(); ++k) {
        if (k) os << ',';
        os << tight[k];
    }
    os << "|V:";
    for (size_t k = 0; k < s.integer_values.size(); ++k) {
        if (k) os << ',';
        os << s.integer_values[k];
    }
    return os.str();
}

std::pair<int, bool> StrategyLibrary::add(Strategy s) {
    if (s.key.empty()) s.key = canonical_strategy_key(s);
    for (int j = 0; j < size(); ++j) {
        if (strategies[j].key == s.key) {
            provenance[j]++;
            return {j, false};
        }
    }
    strategies.push_back(std::move(s));
    provenance.push_back(1);
    return {size() - 1, true};
}

int materialized_row_count(const MILPInstance& inst) {
    int extra = 0;
    for (int j = 0; j < inst.n; ++j) {
        if (std::isfinite(inst.hi[j])) ++extra;
        if (std::isfinite(inst.lo[j])) ++extra;
    }
    return inst.m + extra;
}

MILPInstance materialize_bounds(const MILPInstance& inst) {
    MILPInstance out = inst;
    for (int j = 0; j < inst.n; ++j) {
        if (std::isfinite(inst.hi[j])) {
            std::vector<double> row(inst.n, 0.0);
            row[j] = 1.0;
            out.A.insert(out.A.end(), row.begin(), row.end());
            out.b.push_back(inst.hi[j]);
            out.row_sense.push_back(RowSense::LE);
            out.m++;
        }
        if (std::isfinite(inst.lo[j])) {
            std::vector<double> row(inst.n, 0.0);
            row[j] = -1.0;
            out.A.insert(out.A.end(), row.begin(), row.end());
            out.b.push_back(-inst.lo[j]);
            out.row_sense.push_back(RowSense::LE);
            out.m++;
        }
        out.lo[j] = -kInf;
        out.hi[j] = kInf;
    }
    return out;
}

FixedIntegerProblem fix_integer_values(const MILPInstance& inst,
                                       const std::vector<long long>& values) {
    if (values.size() != inst.integer_index_set.size())
        throw std::invalid_argument("fix_integer_values: value count mismatch");
    FixedIntegerProblem fp;
    std::vector<bool> is_int(inst.n, false);
    for (int j : inst.integer_index_set) is_int[j] = true;
    for (int j = 0; j < inst.n; ++j)
        if (!is_int[j]) fp.continuous_cols.push_back(j);

    MILPInstance& red = fp.continuous;
    red.n = static_cast<int>(fp.continuous_cols.size());
    red.m = inst.m;
    red.name = inst.name + "/fixed";
    red.row_sense = inst.row_sense;
    red.b = inst.b;
    red.c.resize(red.n);
    red.lo.resize(red.n);
    red.hi.resize(red.n);
    for (int k = 0; k < red.n; ++k) {
        int j = fp.continuous_cols[k];
        red.c[k] = inst.c[j];
        red.lo[k] = inst.lo[j];
        red.hi[k] = inst.hi[j];
    }
    red.A.resize(static_cast<size_t>(red.m) * red.n);
    for (int i = 0; i < inst.m; ++i) {
        double shift = 0.0;
        for (size_t k = 0; k < inst.integer_index_set.size(); ++k)
            shift += inst.a(i, inst.integer_index_set[k]) *
                     static_cast<double>(values[k]);
        red.b[i] -= shift;
        for (int k = 0; k < red.n; ++k)
            red.a(i, k) = inst.a(i, fp.continuous_cols[k]);
    }
    for (size_t k = 0; k < inst.integer_index_set.size(); ++k)
        fp.objective_constant += inst.c[inst.integer_index_set[k]] *
                                 static_cast<double>(values[k]);
    return fp;
}

std::vector<double> recompose_solution(const FixedIntegerProblem& fp,
                                       const MILPInstance& inst,
                                       const std::vector<long long>& values,
                                       const std::vector<double>& x_cont) {
    std::vector<double> x(inst.n, 0.0);
    for (size_t k = 0; k < inst.integer_index_set.size(); ++k)
        x[inst.integer_index_set[k]] = static_cast<double>(values[k]);
    for (size_t k = 0; k < fp.continuous_cols.size(); ++k)
        x[fp.continuous_cols[k]] = x_cont[k];
    return x;
}

}  // namespace stratmilp
