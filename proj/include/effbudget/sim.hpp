#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "effbudget/effective.hpp"
#include "effbudget/robust.hpp"

namespace effbudget {

struct Scenario {
    Vec y_actual;
    Vec z;  // |y_actual - y_nom| / (y_up - y_nom), 0 where the range is empty
    std::uint64_t seed_index = 0;
};

struct SamplingOptions {
    std::int64_t max_draws = 10'000'000;  // per budget group
    double min_acceptance = 1e-4;
};

// Seed of scenario `index` under base seed `seed` (splitmix64 mixing).
std::uint64_t scenario_seed(std::uint64_t seed, std::uint64_t index);

// Uniform draws per coordinate in [y_low, y_up], rejected per budget group
// until sum_{j in group} z_j <= gamma_group. Groups are independent, so this
// is uniform on the accepted set. A zero group budget pins the group at y_nom.
// Throws Error(sampling) when a group's acceptance rate stays below
// min_acceptance after max_draws draws.
std::vector<Scenario> generate_scenarios(const NominalInstance& inst, const BudgetSpec& budget, int n,
                                         std::uint64_t seed, const SamplingOptions& opt = {});

struct PrescientResult {
    Status status = Status::infeasible;
    double cost = 0.0;
};

// Deterministic model with the caps set to the realization.
PrescientResult prescient_solve(const NominalInstance& inst, const Scenario& sc, const SolverOptions& opt = {});

// Over- and under-generation against the realization:
// penalty * sum_j |y_plan_j - y_actual_j|.
double adjustment_cost(const Vec& y_plan, const Vec& y_actual, double penalty);

// |day-ahead objective + adjustment - prescient cost|.
double delta_c(const RobustSolution& day_ahead, const Scenario& sc, double prescient_cost, double penalty);

struct DeltaCReport {
    Variant approach = Variant::nominal;
    std::vector<double> delta_c;  // per scenario; NaN where the prescient model failed
    int excluded = 0;
    double mean = 0.0, min = 0.0, max = 0.0;
    double adjustment_penalty = 50.0;
};

struct SimulationOptions {
    SolverOptions lp;
    SamplingOptions sampling;
    double penalty = 50.0;
    int jobs = 1;
};

// Solves each approach once at `budget`, then evaluates every scenario.
std::vector<DeltaCReport> simulate(const NominalInstance& inst, const BudgetSpec& budget,
                                   const std::vector<Variant>& approaches, int n, std::uint64_t seed,
                                   const SimulationOptions& opt = {});

struct SweepRow {
    double gamma = 0.0;
    Variant approach = Variant::nominal;
    double objective = 0.0;
    double utilization = 0.0;  // sum of y
    double gamma_effective = 0.0;
    Status status = Status::optimal;
};

// Rows sorted by gamma, then by the order of `approaches`. The gamma value is
// applied to every budget group. Errors are rethrown with the failing gamma.
std::vector<SweepRow> sweep_gamma(const NominalInstance& inst, const std::vector<double>& grid,
                                  const std::vector<Variant>& approaches, const SolverOptions& opt = {},
                                  int jobs = 1);

// gamma,approach,objective,utilization,gamma_effective
std::string sweep_csv(const std::vector<SweepRow>& rows);
// scenario,approach,delta_c
std::string sim_csv(const std::vector<DeltaCReport>& reports);

// Fixed-precision number formatting shared by every CSV writer.
std::string format_number(double v);

}  // namespace effbudget
