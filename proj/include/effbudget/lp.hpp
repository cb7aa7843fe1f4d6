#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace effbudget {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Tolerances {
    double feas = 1e-7;
    double obj_rel = 1e-6;
    double cls = 1e-7;

    double obj(double value) const;
};

enum class Rel { le, eq, ge };

struct Row {
    std::vector<std::pair<int, double>> coeffs;
    Rel rel = Rel::le;
    double rhs = 0.0;
    std::string name;
};

// min cost.x + offset over bounded variables and linear rows.
struct LinearProgram {
    int num_vars = 0;
    std::vector<double> cost;
    double offset = 0.0;
    std::vector<Row> rows;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::string> names;

    int add_var(double lo, double up, double c, std::string name = {});
    int add_row(std::vector<std::pair<int, double>> coeffs, Rel rel, double rhs,
                std::string name = {});

    // Throws Error(model) on NaN/inf data, bad indices or crossed bounds.
    void validate() const;
    double evaluate(const std::vector<double>& x) const;
    double row_activity(int r, const std::vector<double>& x) const;
};

struct MixedProgram {
    LinearProgram base;
    std::vector<int> integral_vars;

    void mark_integer(int var);
    void mark_binary(int var);
    bool is_binary(int var) const;
    void validate() const;
};

enum class Status { optimal, infeasible, unbounded };
const char* to_string(Status s);

struct LpSolution {
    Status status = Status::infeasible;
    std::vector<double> primal;
    double objective = 0.0;
    // One per row, sign convention of the minimization Lagrangian:
    // <= rows have duals <= 0, >= rows have duals >= 0.
    std::vector<double> duals;
    std::vector<double> reduced_costs;
    // Unbounded ray (primal space) or Farkas multipliers (row space).
    std::vector<double> certificate;
    std::int64_t iterations = 0;
    std::int64_t nodes = 0;
};

struct SolverOptions {
    Tolerances tol;
    std::int64_t iteration_cap = 50000;
    std::int64_t node_cap = 100000;
    double int_tol = 1e-6;
    double gap_abs = 1e-6;
};

LpSolution solve_lp(const LinearProgram& lp, const SolverOptions& opt = {});
LpSolution solve_milp(const MixedProgram& mp, const SolverOptions& opt = {});

// Lagrangian dual bound from the returned row duals and reduced costs.
double dual_objective(const LinearProgram& lp, const LpSolution& sol);

struct Violation {
    enum class Kind { row, lower_bound, upper_bound } kind;
    int index;
    double amount;
};

struct FeasibilityReport {
    bool feasible = true;
    double max_violation = 0.0;
    std::vector<Violation> violations;
};

FeasibilityReport check_feasible(const LinearProgram& lp, const std::vector<double>& point,
                                 double tol_feas = 1e-7);

// Fixed-column MPS with generated 8-character names.
void write_mps(std::ostream& os, const MixedProgram& mp, const std::string& name = "EFFBUDGT");

}  // namespace effbudget
