#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "stratmilp/lp.hpp"
#include "stratmilp/model.hpp"

using namespace stratmilp;

namespace {

// Brute-force LP oracle: materialize the bounds, enumerate every subset of n
// rows, solve the square system, keep the best feasible solution. Valid for
// feasible, bounded problems whose optimum is attained at a vertex.
double vertex_enum_optimum(const MILPInstance& inst, bool* found) {
    MILPInstance mat = materialize_bounds(inst);
    const int n = mat.n, m = mat.m;
    double best = std::numeric_limits<double>::infinity();
    *found = false;
    std::vector<int> pick(n);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == n) {
            Eigen::MatrixXd B(n, n);
            Eigen::VectorXd rhs(n);
            for (int r = 0; r < n; ++r) {
                for (int j = 0; j < n; ++j) B(r, j) = mat.a(pick[r], j);
                rhs(r) = mat.b[pick[r]];
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
            if (!lu.isInvertible()) return;
            Eigen::VectorXd x = lu.solve(rhs);
            // Feasibility over all rows.
            for (int i = 0; i < m; ++i) {
                double g = 0.0;
                for (int j = 0; j < n; ++j) g += mat.a(i, j) * x(j);
                double slack = mat.b[i] - g;
                if (mat.row_sense[i] == RowSense::EQ ? std::abs(slack) > 1e-7
                                                     : slack < -1e-7)
                    return;
            }
            double obj = 0.0;
            for (int j = 0; j < n; ++j) obj += mat.c[j] * x(j);
            if (obj < best) best = obj;
            *found = true;
            return;
        }
        for (int i = start; i <= m - (n - depth); ++i) {
            pick[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

MILPInstance random_lp(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<int> nd(2, 6), md(2, 10);
    MILPInstance inst;
    inst.n = nd(rng);
    inst.m = md(rng);
    inst.name = "rand-lp";
    for (int j = 0; j < inst.n; ++j) {
        inst.c.push_back(coef(rng));
        inst.lo.push_back(0.0);
        inst.hi.push_back(2.0);  // box keeps everything bounded
    }
    // Feasibility anchor: rows get enough slack to contain x0.
    std::vector<double> x0(inst.n);
    for (double& v : x0) v = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    for (int i = 0; i < inst.m; ++i) {
        double act = 0.0;
        for (int j = 0; j < inst.n; ++j) {
            double a = coef(rng);
            inst.A.push_back(a);
            act += a * x0[j];
        }
        inst.b.push_back(act + std::uniform_real_distribution<double>(0.0, 1.5)(rng));
        inst.row_sense.push_back(RowSense::LE);
    }
    return inst;
}

}  // namespace

TEST_CASE("box corner: min -x1-x2 over the unit box") {
    MILPInstance inst;
    inst.n = 2;
    inst.m = 2;
    inst.c = {-1.0, -1.0};
    inst.A = {1.0, 0.0, 0.0, 1.0};
    inst.b = {1.0, 1.0};
    inst.row_sense = {RowSense::LE, RowSense::LE};
    inst.lo = {0.0, 0.0};
    inst.hi = {kInf, kInf};
    auto res = solve_lp(inst);
    REQUIRE(res.status == LPStatus::OPTIMAL);
    CHECK(res.objective == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("null objective is optimal with value 0") {
    MILPInstance inst;
    inst.n = 1;
    inst.m = 1;
    inst.c = {0.0};
    inst.A = {1.0};
    inst.b = {1.0};
    inst.row_sense = {RowSense::LE};
    inst.lo = {0.0};
    inst.hi = {kInf};
    auto res = solve_lp(inst);
    REQUIRE(res.status == LPStatus::OPTIMAL);
    CHECK(res.objective == doctest::Approx(0.0));
}

TEST_CASE("infeasible system is reported") {
    MILPInstance inst;
    inst.n = 1;
    inst.m = 2;
    inst.c = {1.0};
    inst.A = {1.0, -1.0};
    inst.b = {1.0, -2.0};  // x <= 1 and x >= 2
    inst.row_sense = {RowSense::LE, RowSense::LE};
    inst.lo = {-kInf};
    inst.hi = {kInf};
    CHECK(solve_lp(inst).status == LPStatus::INFEASIBLE);
}

TEST_CASE("unbounded ray is reported") {
    MILPInstance inst;
    inst.n = 1;
    inst.m = 1;
    inst.c = {-1.0};
    inst.A = {-1.0};
    inst.b = {0.0};  // x >= 0, minimize -x
    inst.row_sense = {RowSense::LE};
    inst.lo = {-kInf};
    inst.hi = {kInf};
    CHECK(solve_lp(inst).status == LPStatus::UNBOUNDED);
}

TEST_CASE("50 random LPs match brute-force vertex enumeration") {
    for (uint64_t seed = 1; seed <= 50; ++seed) {
        CAPTURE(seed);
        auto inst = random_lp(seed);
        auto res = solve_lp(inst);
        REQUIRE(res.status == LPStatus::OPTIMAL);
        bool found = false;
        double oracle = vertex_enum_optimum(inst, &found);
        REQUIRE(found);
        CHECK(res.objective == doctest::Approx(oracle).epsilon(1e-8));
        // Row feasibility invariant of OPTIMAL results.
        for (int i = 0; i < inst.m; ++i) {
            double tol = 1e-7 * (1.0 + std::abs(inst.b[i]));
            CHECK(res.row_activity[i] <= inst.b[i] + tol);
        }
    }
}

TEST_CASE("tight_set: strictly interior point returns only EQ rows") {
    MILPInstance inst;
    inst.n = 2;
    inst.m = 3;
    inst.c = {0.0, 0.0};
    inst.A = {1.0, 0.0, 0.0, 1.0, 1.0, 1.0};
    inst.b = {5.0, 5.0, 3.0};
    inst.row_sense = {RowSense::LE, RowSense::LE, RowSense::EQ};
    inst.lo = {-kInf, -kInf};
    inst.hi = {kInf, kInf};
    auto t = tight_set(inst, {1.0, 2.0});  // row 2 holds exactly, rows 0,1 slack
    CHECK(t == std::vector<int>{2});
}

TEST_CASE("tight_set: boundary of a single LE row") {
    MILPInstance inst;
    inst.n = 1;
    inst.m = 3;
    inst.c = {0.0};
    inst.A = {1.0, 2.0, -1.0};
    inst.b = {10.0, 4.0, 5.0};
    inst.row_sense = {RowSense::LE, RowSense::LE, RowSense::LE};
    inst.lo = {-kInf};
    inst.hi = {kInf};
    auto t = tight_set(inst, {2.0});  // row 1: 2*2 = 4 exactly
    CHECK(t == std::vector<int>{1});
}

TEST_CASE("tight_set at an LP vertex lists both active rows") {
    MILPInstance inst;
    inst.n = 2;
    inst.m = 2;
    inst.c = {-1.0, -1.0};
    inst.A = {1.0, 2.0, 2.0, 1.0};
    inst.b = {4.0, 4.0};
    inst.row_sense = {RowSense::LE, RowSense::LE};
    inst.lo = {0.0, 0.0};
    inst.hi = {kInf, kInf};
    auto res = solve_lp(inst);
    REQUIRE(res.status == LPStatus::OPTIMAL);
    // Vertex of the two rows: x = (4/3, 4/3); residuals vanish on both.
    CHECK(res.x[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
    auto t = tight_set(inst, res.x);
    CHECK(t == std::vector<int>{0, 1});
}

TEST_CASE("identical input yields identical output") {
    auto inst = random_lp(7);
    auto a = solve_lp(inst);
    auto b = solve_lp(inst);
    CHECK(a.objective == b.objective);
    CHECK(a.x == b.x);
    CHECK(a.iterations == b.iterations);
}
