#ifndef STRATMILP_MODEL_HPP
#define STRATMILP_MODEL_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace stratmilp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { LE, EQ };

enum class SolStatus { OPTIMAL, INFEASIBLE, UNBOUNDED, LIMIT };

/// One concrete MILP instance: min c'x s.t. A x {<=,=} b, lo <= x <= hi,
/// x_j integer for j in the integer index set. A is stored dense row-major.
struct MILPInstance {
    int n = 0;                      // variable count
    int m = 0;                      // row count
    std::vector<double> c;          // length n
    std::vector<double> A;          // m*n, row-major
    std::vector<double> b;          // length m
    std::vector<RowSense> row_sense;
    std::vector<int> integer_index_set;  // sorted, unique
    std::vector<double> lo, hi;     // per-variable bounds, +-inf allowed
    std::string name;

    double a(int i, int j) const { return A[static_cast<size_t>(i) * n + j]; }
    double& a(int i, int j) { return A[static_cast<size_t>(i) * n + j]; }

    /// Row activity g_i(A_i, x) for all rows.
    std::vector<double> row_activity(const std::vector<double>& x) const;
};

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

/// Lists every invariant violation; never throws.
ValidationReport validate_instance(const MILPInstance& inst);

/// Identifies one scalar entry of theta = <A, c, b>.
struct ParamCoord {
    enum class Target { B, C, A };
    Target target = Target::B;
    int row = 0;  // row index for B and A
    int col = 0;  // column index for C and A
};

double get_coord(const MILPInstance& inst, const ParamCoord& pc);
void set_coord(MILPInstance& inst, const ParamCoord& pc, double v);

/// A family of instances: the base instance plus a ball B(theta_bar, r)
/// over the selected varying coordinates.
struct ParameterizedFamily {
    MILPInstance base_instance;
    std::vector<ParamCoord> varying;
    double radius = 0.0;
    std::string name;
};

ValidationReport validate_family(const ParameterizedFamily& fam);

/// Draws the varying coordinates uniformly from the Euclidean ball of
/// radius r centered at the base values. Pure function of (family, seed).
MILPInstance sample_instance(const ParameterizedFamily& fam, uint64_t seed);

struct Solution {
    SolStatus status = SolStatus::INFEASIBLE;
    std::vector<double> x;
    double objective = 0.0;
};

/// A reduced model: tight-constraint row indices (over the
/// bound-materialized row space) plus exact integer values aligned with
/// the instance's integer index set.
struct Strategy {
    std::vector<int> tight_set;           // sorted, unique
    std::vector<long long> integer_values;
    std::string key;                      // canonical_strategy_key
};

/// Deterministic key; equal iff (tight_set, integer_values) equal.
std::string canonical_strategy_key(const Strategy& s);

enum class LibraryOrigin { RAW, PRUNED };

struct StrategyLibrary {
    std::vector<Strategy> strategies;
    LibraryOrigin origin = LibraryOrigin::RAW;
    std::vector<int> provenance;  // per-strategy count of instances labeled

    int size() const { return static_cast<int>(strategies.size()); }
    /// Returns the index of the strategy (inserting if new) and whether it
    /// was newly added.
    std::pair<int, bool> add(Strategy s);
};

/// Rewrites every finite variable bound as an explicit LE row so that
/// tight-constraint extraction uniformly covers active bounds. Row order:
/// original rows first, then per variable (ascending) the upper bound row
/// followed by the lower bound row when finite. All bounds in the result
/// are +-inf.
MILPInstance materialize_bounds(const MILPInstance& inst);

/// Number of rows materialize_bounds would produce.
int materialized_row_count(const MILPInstance& inst);

/// Substitutes fixed integer values into the instance: integer columns are
/// removed, their contribution moved to b, and the constant c_I * v is
/// returned so objective(reduced) + constant = objective(full).
struct FixedIntegerProblem {
    MILPInstance continuous;        // integer columns removed, I empty
    double objective_constant = 0.0;
    std::vector<int> continuous_cols;  // original indices of kept columns
};
FixedIntegerProblem fix_integer_values(const MILPInstance& inst,
                                       const std::vector<long long>& values);

/// Recomposes a full-length solution vector from the continuous part of a
/// fixed-integer solve plus the fixed integer values.
std::vector<double> recompose_solution(const FixedIntegerProblem& fp,
                                       const MILPInstance& inst,
                                       const std::vector<long long>& values,
                                       const std::vector<double>& x_cont);

}  // namespace stratmilp

#endif
