#pragma once

#include <string>
#include <vector>

#include "effbudget/lp.hpp"

namespace effbudget {

using Vec = std::vector<double>;

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}
    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

// Problem data for  min c1.x + c2.(y~ - y)  s.t.  A x + B y <= g,  y <= y~.
// The optional equality block A_eq x + B_eq y = g_eq is kept as-is by every
// model except the admissible-interval LP, which robustifies only its <= half.
struct NominalInstance {
    Matrix A, B;
    Vec c1, c2, g;
    Vec y_nom, y_low, y_up;

    Matrix A_eq, B_eq;
    Vec g_eq;
    Vec x_upper;                  // empty: unbounded above
    std::vector<int> integer_x;
    std::vector<std::vector<int>> budget_groups;  // empty: one group
    bool non_centered = false;
    bool check_assumption1 = true;
    double constant = 0.0;        // objective bookkeeping added by app builders
    std::vector<std::string> x_names, y_names;

    int p() const { return static_cast<int>(c1.size()); }
    int m() const { return static_cast<int>(c2.size()); }
    int n() const { return A.rows; }
    int n_eq() const { return A_eq.rows; }

    std::vector<std::vector<int>> groups() const;
    // Every violated invariant, in a fixed order; empty when valid.
    std::vector<std::string> violations(const Tolerances& tol = {}) const;
    // Throws Error(instance) naming the first violation.
    void validate(const Tolerances& tol = {}) const;
};

struct BudgetSpec {
    double gamma = 0.0;
    std::vector<double> per_group;  // overrides gamma when non-empty

    double for_group(std::size_t g) const { return per_group.empty() ? gamma : per_group.at(g); }
    void validate(const NominalInstance& inst) const;
};

enum class Variant { nominal, conventional, full_budget, effective, admissible };
const char* to_string(Variant v);

// Column offsets of the blocks in a built model; -1 when absent.
struct ModelLayout {
    int x = 0, y = -1, zp = -1, zm = -1, xi = -1, mu = -1, r = -1, lam = -1;
    int p = 0, m = 0;
    std::vector<int> group_of;
};

struct BuiltModel {
    MixedProgram mp;
    ModelLayout lay;
    Variant variant = Variant::nominal;
    double constant_term = 0.0;  // c2.y_nom (or c2.s_mid) inside the offset
    double base_constant = 0.0;  // NominalInstance::constant inside the offset
};

struct RobustSolution {
    Variant variant = Variant::nominal;
    Status status = Status::infeasible;
    Vec x, y;
    Vec deviations;  // z+ or r
    Vec z_minus;
    double objective = 0.0;
    double worst_case_term = 0.0;
    double constant_term = 0.0;
    double gamma = 0.0;
    double gamma_effective = 0.0;
    std::vector<char> cases;
    std::int64_t iterations = 0;
    std::int64_t nodes = 0;
};

// Adds x, y columns and the original rows to bm; y has bounds [0, y_cap]
// (unbounded when y_cap is empty).
void add_core(BuiltModel& bm, const NominalInstance& inst, const Vec& y_cap);
double dot(const Vec& a, const Vec& b);

BuiltModel build_nominal(const NominalInstance& inst);
BuiltModel build_conventional(const NominalInstance& inst, const BudgetSpec& budget);
BuiltModel build_full_budget(const NominalInstance& inst);
// Deterministic model with the resource caps replaced by `caps`.
BuiltModel build_with_caps(const NominalInstance& inst, const Vec& caps);

RobustSolution solve_built(const BuiltModel& bm, const SolverOptions& opt = {});

RobustSolution solve_nominal(const NominalInstance& inst, const SolverOptions& opt = {});
RobustSolution solve_conventional(const NominalInstance& inst, const BudgetSpec& budget,
                                  const SolverOptions& opt = {});
RobustSolution solve_full_budget(const NominalInstance& inst, const SolverOptions& opt = {});

struct WorstCase {
    double value = 0.0;
    Vec z_plus;
};
WorstCase worst_case_inner(const NominalInstance& inst, const BudgetSpec& budget);

bool insensitivity_holds(const RobustSolution& sol, const NominalInstance& inst,
                         const Tolerances& tol = {});

// Rows (index into A) that satisfy the insensitivity condition at sol.
std::vector<int> insensitive_rows(const RobustSolution& sol, const NominalInstance& inst,
                                  const Tolerances& tol = {});

}  // namespace effbudget
