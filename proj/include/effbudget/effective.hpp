#pragma once

#include <string>
#include <vector>

#include "effbudget/robust.hpp"

namespace effbudget {

struct AdmissibleInterval {
    Vec s_low, s_up, s_mid;
    std::vector<char> cases;  // 'a'..'d'
    double stage1_objective = 0.0;
    std::int64_t iterations = 0;
};

struct EffectiveParams {
    Vec h, e, v;
    double budget_offset = 0.0;
    double gamma_effective = 0.0;
    Vec group_offset;           // per budget group
    Vec group_gamma_effective;  // per budget group
};

AdmissibleInterval stage1_admissible(const NominalInstance& inst, const SolverOptions& opt = {});

// Per-coordinate labels; throws Error(classification) when no case fits.
std::vector<char> classify(const Vec& s_low, const Vec& s_up, const Vec& y_low, const Vec& y_nom,
                           const Vec& y_up, double tol_class = 1e-7);

EffectiveParams effective_params(const AdmissibleInterval& interval, const NominalInstance& inst,
                                 const BudgetSpec& budget);

BuiltModel build_stage2(const NominalInstance& inst, const EffectiveParams& params,
                        const AdmissibleInterval& interval);

// Robust model over the admissible set (interval used as the uncertainty box).
BuiltModel build_admissible(const NominalInstance& inst, const AdmissibleInterval& interval,
                            const BudgetSpec& budget, bool with_z_minus = true);

struct EffectiveResult {
    AdmissibleInterval interval;
    EffectiveParams params;
    RobustSolution solution;
    double conventional_worst_term = 0.0;  // greedy value over the original set
};

EffectiveResult solve_effective(const NominalInstance& inst, const BudgetSpec& budget,
                                const SolverOptions& opt = {});
// Same, reusing a Stage-I result (sweeps compute it once).
EffectiveResult solve_effective(const NominalInstance& inst, const AdmissibleInterval& interval,
                                const BudgetSpec& budget, const SolverOptions& opt = {});

// Constant separating the effective and conventional objectives when both
// pick the same plan: at gamma = 0 it is sum over h=0 of c2 (y_nom - s_up),
// at full budget sum of c2 (y_up - s_up).
double ineffective_penalty(const NominalInstance& inst, const AdmissibleInterval& interval, bool full_budget);

// CSV rows with header j,y_low,y_nom,y_up,s_low,s_mid,s_up,case,h,e,v
std::string stage1_csv(const NominalInstance& inst, const AdmissibleInterval& interval,
                       const EffectiveParams& params);

}  // namespace effbudget
