#pragma once

#include <string>
#include <utility>
#include <vector>

#include "effbudget/effective.hpp"
#include "effbudget/robust.hpp"

namespace effbudget {

// { y_nom + sum_k mu_k axes[k] : sum (mu_k / lengths[k])^2 <= gamma^2, sum |mu_k| <= budget }
struct BudgetedEllipsoid {
    Vec center;
    std::vector<Vec> axes;  // axes[k] is the unit vector v_k
    Vec lengths;
    double gamma = 1.0;
    double budget = 0.0;

    int m() const { return static_cast<int>(center.size()); }
    // Throws Error(instance) on non-orthonormal axes or non-positive lengths.
    void validate() const;
};

// Support function of the ellipsoid (budget ignored) along +/- each axis.
std::pair<Vec, Vec> bounding_box(const BudgetedEllipsoid& ell);

// Axis intercepts a_j = y_nom_j + gamma / sqrt(sum_k (v_kj / l_k)^2).
Vec axis_intercepts(const BudgetedEllipsoid& ell);

// Labels 1..4 per axis; throws Error(classification) when no case fits.
std::vector<int> classify_ellipsoid(const BudgetedEllipsoid& ell, const AdmissibleInterval& iv, const Vec& y_low,
                                    double tol_class = 1e-7);

struct EffectiveEllipsoid {
    std::vector<int> I, Ic;
    Vec lengths;  // s_up - y_nom on I, 0 elsewhere
    Vec cap;      // s_up
    Vec center;
    std::vector<Vec> axes;
    double gamma = 1.0;
    double budget = 0.0;
    bool degenerate = false;  // I empty
};

EffectiveEllipsoid effective_ellipsoid(const BudgetedEllipsoid& ell, const AdmissibleInterval& iv);

struct EllipsoidOptions {
    SolverOptions lp;
    double cut_tol = 1e-6;
    int max_cuts = 200;
};

struct EllipsoidSolution {
    RobustSolution solution;
    Vec worst_mu;   // adversarial deviation, feasible within cut_tol
    Vec plan_mu;    // deviation the plan relies on in its caps
    int cuts = 0;
};

// Throws Error(solver_stalled) when the cut cap is reached.
EllipsoidSolution solve_ellipsoid_stage2(const NominalInstance& inst, const EffectiveEllipsoid& eff,
                                         const EllipsoidOptions& opt = {});

// Convenience: box -> instance bounds -> Stage I -> effective set -> stage 2.
struct EllipsoidPipeline {
    AdmissibleInterval interval;
    std::vector<int> cases;
    EffectiveEllipsoid effective;
    EllipsoidSolution result;
};
EllipsoidPipeline solve_ellipsoid(const NominalInstance& inst, const BudgetedEllipsoid& ell,
                                  const EllipsoidOptions& opt = {});

}  // namespace effbudget
