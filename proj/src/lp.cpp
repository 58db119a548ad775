#include "stratmilp/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stratmilp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kDegenTol = 1e-12;
constexpr int kRefactorPeriod = 50;

// How each original variable maps into the nonnegative standard form.
struct ColMap {
    enum class Kind { SHIFT, MIRROR, SPLIT } kind;
    int col0 = -1;    // standard column index
    int col1 = -1;    // second column for SPLIT
    double offset = 0.0;
};

struct StandardForm {
    Eigen::MatrixXd A;     // m_std x total columns (incl. slacks + artificials)
    Eigen::VectorXd b;     // >= 0 after sign normalization
    Eigen::VectorXd cost;  // phase II costs (0 on slacks/artificials)
    std::vector<ColMap> map;
    int n_struct = 0;      // structural columns (var images)
    int n_slack = 0;
    int n_art = 0;
    int first_art = 0;
    std::vector<int> slack_of_row;  // column of the row's slack, -1 if none
    double obj_offset = 0.0;
};

StandardForm build_standard_form(const MILPInstance& inst) {
    StandardForm sf;
    int ns = 0;
    sf.map.resize(inst.n);
    int extra_rows = 0;
    for (int j = 0; j < inst.n; ++j) {
        bool lo_f = std::isfinite(inst.lo[j]);
        bool hi_f = std::isfinite(inst.hi[j]);
        if (lo_f) {
            sf.map[j].kind = ColMap::Kind::SHIFT;
            sf.map[j].offset = inst.lo[j];
            sf.map[j].col0 = ns++;
            if (hi_f) ++extra_rows;  // y <= hi - lo
        } else if (hi_f) {
            sf.map[j].kind = ColMap::Kind::MIRROR;
            sf.map[j].offset = inst.hi[j];
            sf.map[j].col0 = ns++;
        } else {
            sf.map[j].kind = ColMap::Kind::SPLIT;
            sf.map[j].col0 = ns++;
            sf.map[j].col1 = ns++;
        }
    }
    sf.n_struct = ns;
    const int m_std = inst.m + extra_rows;
    int n_slack = extra_rows;  // every extra row gets a slack
    for (int i = 0; i < inst.m; ++i)
        if (inst.row_sense[i] == RowSense::LE) ++n_slack;
    sf.n_slack = n_slack;

    const int total = ns + n_slack + m_std;  // artificials reserved per row
    sf.A = Eigen::MatrixXd::Zero(m_std, total);
    sf.b = Eigen::VectorXd::Zero(m_std);
    sf.cost = Eigen::VectorXd::Zero(total);
    sf.slack_of_row.assign(m_std, -1);

    auto put = [&](int row, int var, double coef) {
        const ColMap& cm = sf.map[var];
        switch (cm.kind) {
            case ColMap::Kind::SHIFT:
                sf.A(row, cm.col0) += coef;
                sf.b(row) -= coef * cm.offset;
                break;
            case ColMap::Kind::MIRROR:
                sf.A(row, cm.col0) -= coef;
                sf.b(row) -= coef * cm.offset;
                break;
            case ColMap::Kind::SPLIT:
                sf.A(row, cm.col0) += coef;
                sf.A(row, cm.col1) -= coef;
                break;
        }
    };

    int slack_col = ns;
    for (int i = 0; i < inst.m; ++i) {
        sf.b(i) += inst.b[i];
        for (int j = 0; j < inst.n; ++j) {
            double coef = inst.a(i, j);
            if (coef != 0.0) put(i, j, coef);
        }
        if (inst.row_sense[i] == RowSense::LE) {
            sf.A(i, slack_col) = 1.0;
            sf.slack_of_row[i] = slack_col++;
        }
    }
    int row = inst.m;
    for (int j = 0; j < inst.n; ++j) {
        if (sf.map[j].kind == ColMap::Kind::SHIFT && std::isfinite(inst.hi[j])) {
            sf.A(row, sf.map[j].col0) = 1.0;
            sf.b(row) = inst.hi[j] - inst.lo[j];
            sf.A(row, slack_col) = 1.0;
            sf.slack_of_row[row] = slack_col++;
            ++row;
        }
    }

    for (int j = 0; j < inst.n; ++j) {
        const ColMap& cm = sf.map[j];
        double cj = inst.c[j];
        switch (cm.kind) {
            case ColMap::Kind::SHIFT:
                sf.cost(cm.col0) = cj;
                sf.obj_offset += cj * cm.offset;
                break;
            case ColMap::Kind::MIRROR:
                sf.cost(cm.col0) = -cj;
                sf.obj_offset += cj * cm.offset;
                break;
            case ColMap::Kind::SPLIT:
                sf.cost(cm.col0) = cj;
                sf.cost(cm.col1) = -cj;
                break;
        }
    }

    // Sign-normalize rows so b >= 0, then place artificial columns.
    sf.first_art = ns + n_slack;
    for (int i = 0; i < m_std; ++i) {
        if (sf.b(i) < 0.0) {
            sf.A.row(i) = -sf.A.row(i);
            sf.b(i) = -sf.b(i);
        }
        sf.A(i, sf.first_art + i) = 1.0;
    }
    sf.n_art = m_std;
    return sf;
}

// In-place revised simplex state over a StandardForm.
struct Simplex {
    StandardForm& sf;
    int m;
    std::vector<int> basis;          // basis[i] = column basic in row i
    std::vector<char> in_basis;
    Eigen::MatrixXd Binv;
    Eigen::VectorXd xB;
    long iterations = 0;
    long degenerate = 0;
    long bland_after;

    explicit Simplex(StandardForm& s) : sf(s), m(static_cast<int>(s.b.size())) {
        bland_after = 3L * (sf.A.cols() + m);
        basis.resize(m);
        in_basis.assign(sf.A.cols(), 0);
        for (int i = 0; i < m; ++i) {
            // Prefer the row's slack when its coefficient stayed +1.
            int sc = sf.slack_of_row[i];
            if (sc >= 0 && sf.A(i, sc) > 0.5)
                basis[i] = sc;
            else
                basis[i] = sf.first_art + i;
            in_basis[basis[i]] = 1;
        }
        refactor();
    }

    void refactor() {
        Eigen::MatrixXd B(m, m);
        for (int i = 0; i < m; ++i) B.col(i) = sf.A.col(basis[i]);
        Binv = B.partialPivLu().inverse();
        xB = Binv * sf.b;
    }

    // Minimizes cost over allowed columns. Returns 0 = optimal, 1 = unbounded.
    int run(const Eigen::VectorXd& cost, bool allow_artificials) {
        const int total = static_cast<int>(sf.A.cols());
        const int art_end = allow_artificials ? total : sf.first_art;
        long pivots_since_refactor = 0;
        for (;;) {
            Eigen::VectorXd cB(m);
            for (int i = 0; i < m; ++i) cB(i) = cost(basis[i]);
            Eigen::VectorXd y = Binv.transpose() * cB;

            int enter = -1;
            bool bland = degenerate > bland_after;
            double best = -kDualTol;
            for (int j = 0; j < art_end; ++j) {
                if (in_basis[j]) continue;
                double dj = cost(j) - y.dot(sf.A.col(j));
                if (bland) {
                    if (dj < -kDualTol) { enter = j; break; }
                } else if (dj < best) {
                    best = dj;
                    enter = j;
                }
            }
            if (enter < 0) return 0;

            Eigen::VectorXd w = Binv * sf.A.col(enter);
            int leave = -1;
            double min_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                if (w(i) > kPivotTol) {
                    double ratio = xB(i) / w(i);
                    if (leave < 0 || ratio < min_ratio - kDegenTol ||
                        (ratio < min_ratio + kDegenTol && basis[i] < basis[leave])) {
                        leave = i;
                        min_ratio = std::max(ratio, 0.0);
                    }
                }
            }
            if (leave < 0) return 1;  // unbounded direction

            if (min_ratio <= kDegenTol) ++degenerate;
            in_basis[basis[leave]] = 0;
            in_basis[enter] = 1;
            basis[leave] = enter;

            double piv = w(leave);
            Binv.row(leave) /= piv;
            for (int i = 0; i < m; ++i) {
                if (i == leave) continue;
                double f = w(i);
                if (f != 0.0) Binv.row(i) -= f * Binv.row(leave);
            }
            for (int i = 0; i < m; ++i)
                if (i != leave) xB(i) -= w(i) * min_ratio;
            xB(leave) = min_ratio;

            ++iterations;
            if (++pivots_since_refactor >= kRefactorPeriod) {
                refactor();
                pivots_since_refactor = 0;
            }
        }
    }
};

}  // namespace

LPResult solve_lp(const MILPInstance& inst) {
    LPResult res;

    if (inst.n == 0) {
        // Constant problem: rows are pure feasibility checks.
        for (int i = 0; i < inst.m; ++i) {
            double scale = 1.0 + std::abs(inst.b[i]);
            if (inst.row_sense[i] == RowSense::LE && 0.0 > inst.b[i] + 1e-9 * scale)
                return res;
            if (inst.row_sense[i] == RowSense::EQ && std::abs(inst.b[i]) > 1e-9 * scale)
                return res;
        }
        res.status = LPStatus::OPTIMAL;
        res.objective = 0.0;
        res.row_activity.assign(inst.m, 0.0);
        return res;
    }

    StandardForm sf = build_standard_form(inst);
    const int m_std = static_cast<int>(sf.b.size());

    if (m_std == 0) {
        // Only sign restrictions: optimum at y = 0 unless some cost < 0.
        for (int j = 0; j < sf.n_struct; ++j)
            if (sf.cost(j) < -kDualTol) {
                res.status = LPStatus::UNBOUNDED;
                return res;
            }
        res.status = LPStatus::OPTIMAL;
        res.x.assign(inst.n, 0.0);
        for (int j = 0; j < inst.n; ++j)
            if (sf.map[j].kind != ColMap::Kind::SPLIT) res.x[j] = sf.map[j].offset;
        res.objective = 0.0;
        for (int j = 0; j < inst.n; ++j) res.objective += inst.c[j] * res.x[j];
        res.row_activity = inst.row_activity(res.x);
        return res;
    }

    Simplex sx(sf);

    // Phase I: minimize sum of artificials.
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(sf.A.cols());
    for (int i = 0; i < sf.n_art; ++i) phase1(sf.first_art + i) = 1.0;
    sx.run(phase1, true);
    double infeas = 0.0;
    for (int i = 0; i < m_std; ++i)
        if (sx.basis[i] >= sf.first_art) infeas += sx.xB(i);
    double feas_tol = 1e-7 * (1.0 + sf.b.lpNorm<Eigen::Infinity>());
    if (infeas > feas_tol) {
        res.iterations = sx.iterations;
        return res;  // INFEASIBLE
    }

    // Drive remaining artificials out of the basis; drop dependent rows.
    std::vector<char> keep_row(m_std, 1);
    for (int i = 0; i < m_std; ++i) {
        if (sx.basis[i] < sf.first_art) continue;
        Eigen::RowVectorXd bi = sx.Binv.row(i);
        int pivot_col = -1;
        for (int j = 0; j < sf.first_art; ++j) {
            if (sx.in_basis[j]) continue;
            if (std::abs(bi.dot(sf.A.col(j))) > 1e-7) { pivot_col = j; break; }
        }
        if (pivot_col >= 0) {
            sx.in_basis[sx.basis[i]] = 0;
            sx.in_basis[pivot_col] = 1;
            sx.basis[i] = pivot_col;
            sx.refactor();
        } else {
            keep_row[i] = 0;  // row is a linear combination of the others
        }
    }
    bool dropped = std::find(keep_row.begin(), keep_row.end(), 0) != keep_row.end();
    if (dropped) {
        std::vector<int> rows;
        for (int i = 0; i < m_std; ++i)
            if (keep_row[i]) rows.push_back(i);
        Eigen::MatrixXd A2(rows.size(), sf.A.cols());
        Eigen::VectorXd b2(rows.size());
        std::vector<int> basis2;
        for (size_t k = 0; k < rows.size(); ++k) {
            A2.row(k) = sf.A.row(rows[k]);
            b2(k) = sf.b(rows[k]);
            basis2.push_back(sx.basis[rows[k]]);
        }
        sf.A = std::move(A2);
        sf.b = std::move(b2);
        sx.m = static_cast<int>(rows.size());
        std::fill(sx.in_basis.begin(), sx.in_basis.end(), 0);
        sx.basis = basis2;
        for (int col : basis2) sx.in_basis[col] = 1;
        sx.refactor();
    }

    // Phase II.
    int rc = sx.run(sf.cost, false);
    res.iterations = sx.iterations;
    if (rc == 1) {
        res.status = LPStatus::UNBOUNDED;
        return res;
    }

    Eigen::VectorXd y = Eigen::VectorXd::Zero(sf.A.cols());
    for (int i = 0; i < sx.m; ++i) y(sx.basis[i]) = std::max(sx.xB(i), 0.0);
    res.x.assign(inst.n, 0.0);
    for (int j = 0; j < inst.n; ++j) {
        const ColMap& cm = sf.map[j];
        switch (cm.kind) {
            case ColMap::Kind::SHIFT: res.x[j] = cm.offset + y(cm.col0); break;
            case ColMap::Kind::MIRROR: res.x[j] = cm.offset - y(cm.col0); break;
            case ColMap::Kind::SPLIT: res.x[j] = y(cm.col0) - y(cm.col1); break;
        }
    }
    res.objective = 0.0;
    for (int j = 0; j < inst.n; ++j) res.objective += inst.c[j] * res.x[j];
    res.row_activity = inst.row_activity(res.x);
    res.status = LPStatus::OPTIMAL;
    return res;
}

std::vector<int> tight_set(const MILPInstance& inst, const std::vector<double>& x,
                           double eps_tight) {
    if (static_cast<int>(x.size()) != inst.n)
        throw std::invalid_argument("tight_set: x has wrong length");
    std::vector<double> g = inst.row_activity(x);
    std::vector<int> out;
    for (int i = 0; i < inst.m; ++i) {
        if (inst.row_sense[i] == RowSense::EQ ||
            std::abs(g[i] - inst.b[i]) <= eps_tight * (1.0 + std::abs(inst.b[i])))
            out.push_back(i);
    }
    return out;
}

}  // namespace stratmilp
