#include "effbudget/ellipsoid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "effbudget/error.hpp"

namespace effbudget {

void BudgetedEllipsoid::validate() const {
    const int n = m();
    if (n == 0) throw Error(ErrorKind::instance, "ellipsoid: empty center");
    if (static_cast<int>(axes.size()) != n || static_cast<int>(lengths.size()) != n)
        throw Error(ErrorKind::instance, "ellipsoid: need " + std::to_string(n) + " axes and lengths");
    for (int a = 0; a < n; ++a) {
        if (static_cast<int>(axes[a].size()) != n) throw Error(ErrorKind::instance, "ellipsoid: axis dimension");
        if (!(lengths[a] > 0.0)) throw Error(ErrorKind::instance, "ellipsoid: lengths must be positive");
        for (int b = a; b < n; ++b) {
            double d = 0.0;
            for (int i = 0; i < n; ++i) d += axes[a][i] * axes[b][i];
            if (std::fabs(d - (a == b ? 1.0 : 0.0)) > 1e-9)
                throw Error(ErrorKind::instance, "ellipsoid: axes " + std::to_string(a) + "," + std::to_string(b) +
                                                     " are not orthonormal");
        }
    }
    if (!(gamma >= 0.0)) throw Error(ErrorKind::instance, "ellipsoid: gamma must be nonnegative");
    double total = 0.0;
    for (double l : lengths) total += l;
    if (!(budget >= 0.0) || budget > total + 1e-12)
        throw Error(ErrorKind::budget, "ellipsoid: budget outside [0, sum of lengths]");
}

std::pair<Vec, Vec> bounding_box(const BudgetedEllipsoid& ell) {
    ell.validate();
    const int n = ell.m();
    Vec lo(n), up(n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += std::pow(ell.lengths[k] * ell.axes[k][j], 2);
        double r = ell.gamma * std::sqrt(s);
        lo[j] = ell.center[j] - r;
        up[j] = ell.center[j] + r;
    }
    return {lo, up};
}

Vec axis_intercepts(const BudgetedEllipsoid& ell) {
    ell.validate();
    const int n = ell.m();
    Vec a(n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += std::pow(ell.axes[k][j] / ell.lengths[k], 2);
        a[j] = ell.center[j] + ell.gamma / std::sqrt(s);
    }
    return a;
}

std::vector<int> classify_ellipsoid(const BudgetedEllipsoid& ell, const AdmissibleInterval& iv, const Vec& y_low,
                                    double tol) {
    Vec a = axis_intercepts(ell);
    const int n = ell.m();
    if (static_cast<int>(iv.s_up.size()) != n || static_cast<int>(y_low.size()) != n)
        throw Error(ErrorKind::state, "classify_ellipsoid: length mismatch");
    std::vector<int> out(n);
    for (int j = 0; j < n; ++j) {
        double su = iv.s_up[j], sl = iv.s_low[j], yn = ell.center[j];
        double t = tol * (1.0 + std::fabs(a[j]));
        bool low_ok = std::fabs(sl - y_low[j]) <= t;
        // An axis reaching its intercept counts as fully usable.
        if (low_ok && su >= a[j] - t) out[j] = 1;
        else if (low_ok && su > yn + t) out[j] = 2;
        else if (low_ok && su > y_low[j] + t) out[j] = 3;
        else if (std::fabs(sl - su) <= t && su <= y_low[j] + t) out[j] = 4;
        else {
            std::ostringstream os;
            os << "ellipsoid axis " << j << " fits no case: s_low=" << sl << " s_up=" << su << " a=" << a[j];
            throw Error(ErrorKind::classification, os.str());
        }
    }
    return out;
}

EffectiveEllipsoid effective_ellipsoid(const BudgetedEllipsoid& ell, const AdmissibleInterval& iv) {
    ell.validate();
    const int n = ell.m();
    EffectiveEllipsoid e;
    e.center = ell.center;
    e.axes = ell.axes;
    e.gamma = ell.gamma;
    e.budget = ell.budget;
    e.cap = iv.s_up;
    e.lengths.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        if (iv.s_up[j] > ell.center[j]) {
            e.I.push_back(j);
            e.lengths[j] = iv.s_up[j] - ell.center[j];
        } else {
            e.Ic.push_back(j);
        }
    }
    e.degenerate = e.I.empty();
    return e;
}

namespace {

// Adds mu+ / mu- columns for the effective axes; returns first column.
int add_mu(LinearProgram& lp, const EffectiveEllipsoid& e, double cost_sign, const Vec& c2) {
    const int first = lp.num_vars;
    const int k = static_cast<int>(e.I.size());
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < k; ++a) {
            int j = e.I[a];
            double c = 0.0;
            for (int i : e.I) c += c2[i] * e.axes[j][i];
            double sign = s == 0 ? 1.0 : -1.0;
            lp.add_var(0.0, e.gamma * e.lengths[j], cost_sign * sign * c, (s == 0 ? "mup" : "mum") + std::to_string(j));
        }
    std::vector<std::pair<int, double>> l1;
    for (int c = 0; c < 2 * k; ++c) l1.push_back({first + c, 1.0});
    lp.add_row(std::move(l1), Rel::le, e.budget, "l1");
    return first;
}

Vec mu_of(const EffectiveEllipsoid& e, const std::vector<double>& primal, int first) {
    const int k = static_cast<int>(e.I.size());
    Vec mu(e.center.size(), 0.0);
    for (int a = 0; a < k; ++a) mu[e.I[a]] = primal[first + a] - primal[first + k + a];
    return mu;
}

double quad(const EffectiveEllipsoid& e, const Vec& mu) {
    double f = 0.0;
    for (int j : e.I) f += std::pow(mu[j] / e.lengths[j], 2);
    return f;
}

// Kelley loop on the quadratic constraint; mutates lp by appending cuts.
LpSolution kelley(LinearProgram& lp, const EffectiveEllipsoid& e, int first, const EllipsoidOptions& opt, int& cuts,
                  const char* what) {
    const int k = static_cast<int>(e.I.size());
    const double g2 = e.gamma * e.gamma;
    while (true) {
        LpSolution s = solve_lp(lp, opt.lp);
        if (s.status != Status::optimal)
            throw Error(ErrorKind::solver_stalled, std::string(what) + ": cutting-plane LP " + to_string(s.status));
        Vec mu = mu_of(e, s.primal, first);
        double f = quad(e, mu);
        if (f <= g2 * (1.0 + opt.cut_tol) + opt.cut_tol * 1e-12) return s;
        if (cuts >= opt.max_cuts) {
            std::ostringstream os;
            os << what << ": cut cap " << opt.max_cuts << " reached, best bound " << s.objective
               << ", violation " << f - g2;
            throw Error(ErrorKind::solver_stalled, os.str());
        }
        std::vector<std::pair<int, double>> row;
        for (int a = 0; a < k; ++a) {
            int j = e.I[a];
            double gcoef = 2.0 * mu[j] / (e.lengths[j] * e.lengths[j]);
            if (gcoef == 0.0) continue;
            row.push_back({first + a, gcoef});
            row.push_back({first + k + a, -gcoef});
        }
        lp.add_row(std::move(row), Rel::le, g2 + f, "cut" + std::to_string(cuts));
        ++cuts;
    }
}

// Pulls mu back onto the quadratic constraint after the cutting planes stop.
Vec project(const EffectiveEllipsoid& e, Vec mu) {
    double f = quad(e, mu), g2 = e.gamma * e.gamma;
    if (f > g2 && f > 0.0) {
        double s = std::sqrt(g2 / f);
        for (double& v : mu) v *= s;
    }
    return mu;
}

}  // namespace

EllipsoidSolution solve_ellipsoid_stage2(const NominalInstance& inst, const EffectiveEllipsoid& e,
                                         const EllipsoidOptions& opt) {
    inst.validate(opt.lp.tol);
    const int m = inst.m();
    if (static_cast<int>(e.center.size()) != m) throw Error(ErrorKind::state, "ellipsoid dimension mismatch");
    EllipsoidSolution out;

    // Adversary: W = max sum_{i in I} c2_i (V mu)_i over the effective set.
    double worst = 0.0;
    Vec worst_mu(m, 0.0);
    if (!e.degenerate) {
        LinearProgram adv;
        int first = add_mu(adv, e, -1.0, inst.c2);
        LpSolution s = kelley(adv, e, first, opt, out.cuts, "worst case");
        worst_mu = project(e, mu_of(e, s.primal, first));
        for (int i : e.I) {
            double d = 0.0;
            for (int j : e.I) d += worst_mu[j] * e.axes[j][i];
            worst += inst.c2[i] * d;
        }
    }

    // Plan: caps y_I <= y_nom_I + (V mu)_I, y_Ic <= s_up.
    BuiltModel bm;
    bm.variant = Variant::effective;
    Vec caps(m, kInf);
    for (int j : e.Ic) caps[j] = e.cap[j];
    for (int j : e.I) caps[j] = e.degenerate ? e.center[j] : kInf;
    add_core(bm, inst, caps);
    LinearProgram& lp = bm.mp.base;
    int first = -1;
    if (!e.degenerate) {
        first = add_mu(lp, e, 0.0, inst.c2);
        const int k = static_cast<int>(e.I.size());
        for (int i : e.I) {
            std::vector<std::pair<int, double>> row{{bm.lay.y + i, 1.0}};
            for (int a = 0; a < k; ++a) {
                double v = e.axes[e.I[a]][i];
                if (v == 0.0) continue;
                row.push_back({first + a, -v});
                row.push_back({first + k + a, v});
            }
            lp.add_row(std::move(row), Rel::le, e.center[i], "cap" + std::to_string(i));
        }
    }
    double constant = 0.0;
    for (int i : e.I) constant += inst.c2[i] * e.center[i];
    for (int i : e.Ic) constant += inst.c2[i] * e.cap[i];
    bm.constant_term = constant;
    lp.offset += constant + worst;

    LpSolution s;
    if (!bm.mp.integral_vars.empty()) {
        if (!e.degenerate && e.gamma > 0.0)
            throw Error(ErrorKind::model, "ellipsoidal stage 2 supports continuous x only");
        s = solve_milp(bm.mp, opt.lp);
    } else if (e.degenerate) {
        s = solve_lp(lp, opt.lp);
    } else {
        s = kelley(lp, e, first, opt, out.cuts, "stage 2");
    }
    RobustSolution& rs = out.solution;
    rs.variant = Variant::effective;
    rs.status = s.status;
    rs.iterations = s.iterations;
    if (s.status != Status::optimal) return out;
    rs.x.assign(s.primal.begin(), s.primal.begin() + inst.p());
    rs.y.assign(s.primal.begin() + bm.lay.y, s.primal.begin() + bm.lay.y + m);
    rs.objective = s.objective;
    rs.constant_term = constant;
    rs.worst_case_term = constant + worst;
    rs.gamma = e.budget;
    rs.gamma_effective = e.budget;
    out.worst_mu = worst_mu;
    out.plan_mu = first >= 0 ? project(e, mu_of(e, s.primal, first)) : Vec(m, 0.0);
    rs.deviations = out.plan_mu;
    return out;
}

EllipsoidPipeline solve_ellipsoid(const NominalInstance& inst, const BudgetedEllipsoid& ell,
                                  const EllipsoidOptions& opt) {
    auto [lo, up] = bounding_box(ell);
    NominalInstance boxed = inst;
    boxed.y_nom = ell.center;
    boxed.y_up = up;
    boxed.y_low = lo;
    for (double& v : boxed.y_low)
        if (v < 0.0) {
            v = 0.0;
            boxed.non_centered = true;
        }
    EllipsoidPipeline p;
    p.interval = stage1_admissible(boxed, opt.lp);
    p.cases = classify_ellipsoid(ell, p.interval, boxed.y_low, opt.lp.tol.cls);
    p.effective = effective_ellipsoid(ell, p.interval);
    p.result = solve_ellipsoid_stage2(boxed, p.effective, opt);
    return p;
}

}  // namespace effbudget
