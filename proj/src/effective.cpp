#include "effbudget/effective.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "effbudget/error.hpp"

namespace effbudget {

namespace {

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol * (1.0 + std::fabs(b)); }

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

AdmissibleInterval stage1_admissible(const NominalInstance& inst, const SolverOptions& opt) {
    inst.validate(opt.tol);
    const int p = inst.p(), m = inst.m();
    MixedProgram mp;
    LinearProgram& lp = mp.base;
    const int xs = 0;
    for (int k = 0; k < p; ++k) lp.add_var(0.0, inst.x_upper.empty() ? kInf : inst.x_upper[k], 0.0, "x" + std::to_string(k));
    for (int k : inst.integer_x) mp.mark_integer(xs + k);
    const int lo = lp.num_vars;
    for (int j = 0; j < m; ++j) lp.add_var(0.0, inst.y_low[j], -1.0, "sl" + std::to_string(j));
    const int up = lp.num_vars;
    for (int j = 0; j < m; ++j) lp.add_var(0.0, inst.y_up[j], -1.0, "su" + std::to_string(j));
    double constant = 0.0;
    for (int j = 0; j < m; ++j) constant += inst.y_up[j] + inst.y_low[j];
    lp.offset = constant;

    // Only the <= half of an equality row is robustified.
    auto add_block = [&](const Matrix& A, const Matrix& B, const Vec& g, const char* tag) {
        for (int i = 0; i < A.rows; ++i) {
            std::vector<std::pair<int, double>> row;
            for (int k = 0; k < p; ++k)
                if (A(i, k) != 0.0) row.push_back({xs + k, A(i, k)});
            for (int j = 0; j < m; ++j) {
                double b = B(i, j);
                if (b == 0.0) continue;
                row.push_back({lo + j, b});
                int a = lp.add_var(0.0, kInf, 0.0, std::string("a") + tag + std::to_string(i) + "_" + std::to_string(j));
                row.push_back({a, 1.0});
                lp.add_row({{a, 1.0}, {up + j, -b}, {lo + j, b}}, Rel::ge, 0.0,
                           std::string("alpha") + tag + std::to_string(i) + "_" + std::to_string(j));
            }
            lp.add_row(std::move(row), Rel::le, g[i], std::string(tag) + std::to_string(i));
        }
    };
    add_block(inst.A, inst.B, inst.g, "r");
    add_block(inst.A_eq, inst.B_eq, inst.g_eq, "e");
    for (int j = 0; j < m; ++j) lp.add_row({{lo + j, 1.0}, {up + j, -1.0}}, Rel::le, 0.0, "order" + std::to_string(j));

    LpSolution s = mp.integral_vars.empty() ? solve_lp(lp, opt) : solve_milp(mp, opt);
    if (s.status == Status::infeasible) throw Error(ErrorKind::instance, "no admissible point");
    if (s.status != Status::optimal) throw Error(ErrorKind::solver_stalled, "stage I: unexpected unbounded LP");

    AdmissibleInterval out;
    out.s_low.resize(m);
    out.s_up.resize(m);
    out.s_mid.resize(m);
    for (int j = 0; j < m; ++j) {
        // Snap to the bounds the LP converged to within round-off.
        double sl = s.primal[lo + j], su = s.primal[up + j];
        if (near(sl, inst.y_low[j], 1e-10)) sl = inst.y_low[j];
        if (near(su, inst.y_up[j], 1e-10)) su = inst.y_up[j];
        if (su < sl) su = sl;
        out.s_low[j] = sl;
        out.s_up[j] = su;
        out.s_mid[j] = 0.5 * (sl + su);
    }
    out.stage1_objective = s.objective;
    out.iterations = s.iterations;
    out.cases = classify(out.s_low, out.s_up, inst.y_low, inst.y_nom, inst.y_up, opt.tol.cls);
    return out;
}

std::vector<char> classify(const Vec& s_low, const Vec& s_up, const Vec& y_low, const Vec& y_nom,
                           const Vec& y_up, double tol) {
    const std::size_t m = s_low.size();
    if (s_up.size() != m || y_low.size() != m || y_nom.size() != m || y_up.size() != m)
        throw Error(ErrorKind::state, "classify: length mismatch");
    std::vector<char> out(m);
    for (std::size_t j = 0; j < m; ++j) {
        double sl = s_low[j], su = s_up[j];
        double tl = tol * (1.0 + std::fabs(y_up[j]));
        bool low_ok = std::fabs(sl - y_low[j]) <= tl;
        if (low_ok && std::fabs(su - y_up[j]) <= tl) out[j] = 'a';
        else if (low_ok && su > y_nom[j] + tl && su < y_up[j] - tl) out[j] = 'b';
        else if (low_ok && su > y_low[j] + tl && su <= y_nom[j] + tl) out[j] = 'c';
        else if (std::fabs(sl - su) <= tl && su <= y_low[j] + tl) out[j] = 'd';
        else {
            std::ostringstream os;
            os.precision(12);
            os << "coordinate " << j << " fits no case: s_low=" << sl << " s_up=" << su << " y_low=" << y_low[j]
               << " y_nom=" << y_nom[j] << " y_up=" << y_up[j];
            throw Error(ErrorKind::classification, os.str());
        }
    }
    return out;
}

EffectiveParams effective_params(const AdmissibleInterval& iv, const NominalInstance& inst,
                                 const BudgetSpec& budget) {
    const int m = inst.m();
    if (static_cast<int>(iv.cases.size()) != m || static_cast<int>(iv.s_up.size()) != m)
        throw Error(ErrorKind::state, "effective parameters need a classified interval");
    budget.validate(inst);
    EffectiveParams ep;
    ep.h.assign(m, 0.0);
    ep.e.assign(m, 0.0);
    ep.v.assign(m, 0.0);
    for (int j = 0; j < m; ++j) {
        if (iv.cases[j] != 'a' && iv.cases[j] != 'b') continue;
        ep.h[j] = 1.0;
        double half = iv.s_up[j] - iv.s_mid[j];
        ep.e[j] = ratio(half, inst.y_up[j] - inst.y_nom[j]);
        ep.v[j] = iv.cases[j] == 'a' ? 0.0 : std::clamp(ratio(inst.y_nom[j] - iv.s_mid[j], half), 0.0, 1.0);
    }
    auto groups = inst.groups();
    ep.group_offset.assign(groups.size(), 0.0);
    ep.group_gamma_effective.assign(groups.size(), 0.0);
    double total = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (int j : groups[g]) ep.group_offset[g] += ep.v[j] * ep.e[j];
        ep.group_gamma_effective[g] = budget.for_group(g) + ep.group_offset[g];
        ep.budget_offset += ep.group_offset[g];
        total += ep.group_gamma_effective[g];
    }
    // Mean over groups; equals the single effective budget when ungrouped.
    ep.gamma_effective = total / static_cast<double>(groups.size());
    return ep;
}

BuiltModel build_stage2(const NominalInstance& inst, const EffectiveParams& ep, const AdmissibleInterval& iv) {
    inst.validate();
    const int m = inst.m();
    auto groups = inst.groups();
    if (static_cast<int>(ep.e.size()) != m || ep.group_gamma_effective.size() != groups.size())
        throw Error(ErrorKind::state, "stage II: parameters do not match the instance");
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double G = ep.group_gamma_effective[g], off = ep.group_offset[g];
        if (!(G >= off - 1e-12) || G > off + static_cast<double>(groups[g].size()) + 1e-12)
            throw Error(ErrorKind::budget, "effective budget " + std::to_string(G) + " outside [" + std::to_string(off) +
                                               ", " + std::to_string(off + groups[g].size()) + "]");
    }
    BuiltModel bm;
    bm.variant = Variant::effective;
    add_core(bm, inst, {});
    LinearProgram& lp = bm.mp.base;
    bm.lay.r = lp.num_vars;
    for (int j = 0; j < m; ++j) lp.add_var(ep.v[j], 1.0, 0.0, "r" + std::to_string(j));
    bm.lay.xi = lp.num_vars;
    for (std::size_t g = 0; g < groups.size(); ++g) lp.add_var(0.0, kInf, ep.group_gamma_effective[g], "xi" + std::to_string(g));
    bm.lay.mu = lp.num_vars;
    for (int j = 0; j < m; ++j) lp.add_var(0.0, kInf, 1.0, "mu" + std::to_string(j));
    bm.lay.lam = lp.num_vars;
    for (int j = 0; j < m; ++j) lp.add_var(0.0, kInf, -ep.v[j], "lam" + std::to_string(j));

    for (int j = 0; j < m; ++j) {
        double half = iv.s_up[j] - iv.s_mid[j];
        std::vector<std::pair<int, double>> row{{bm.lay.y + j, 1.0}};
        if (half != 0.0) row.push_back({bm.lay.r + j, -half});
        lp.add_row(std::move(row), Rel::le, iv.s_mid[j], "cap" + std::to_string(j));
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::vector<std::pair<int, double>> row;
        for (int j : groups[g])
            if (ep.e[j] != 0.0) row.push_back({bm.lay.r + j, ep.e[j]});
        lp.add_row(std::move(row), Rel::le, ep.group_gamma_effective[g], "budget" + std::to_string(g));
    }
    for (int j = 0; j < m; ++j) {
        std::vector<std::pair<int, double>> row{{bm.lay.mu + j, 1.0}, {bm.lay.lam + j, -1.0}};
        if (ep.e[j] != 0.0) row.push_back({bm.lay.xi + bm.lay.group_of[j], ep.e[j]});
        lp.add_row(std::move(row), Rel::ge, inst.c2[j] * (iv.s_up[j] - iv.s_mid[j]), "dual" + std::to_string(j));
    }
    bm.constant_term = dot(inst.c2, iv.s_mid);
    lp.offset += bm.constant_term;
    return bm;
}

BuiltModel build_admissible(const NominalInstance& inst, const AdmissibleInterval& iv, const BudgetSpec& budget,
                            bool with_z_minus) {
    NominalInstance adm = inst;
    adm.y_low = iv.s_low;
    adm.y_up = iv.s_up;
    adm.y_nom = iv.s_mid;
    adm.non_centered = false;
    BuiltModel bm = build_conventional(adm, budget);
    bm.variant = Variant::admissible;
    if (!with_z_minus)
        for (int j = 0; j < inst.m(); ++j) bm.mp.base.upper[bm.lay.zm + j] = 0.0;
    return bm;
}

EffectiveResult solve_effective(const NominalInstance& inst, const AdmissibleInterval& iv, const BudgetSpec& budget,
                                const SolverOptions& opt) {
    EffectiveResult res;
    res.interval = iv;
    res.params = effective_params(iv, inst, budget);
    res.solution = solve_built(build_stage2(inst, res.params, iv), opt);
    if (res.solution.status != Status::optimal)
        throw Error(ErrorKind::solver_stalled, std::string("stage II: ") + to_string(res.solution.status));
    res.solution.gamma = budget.gamma;
    res.solution.gamma_effective = res.params.gamma_effective;
    res.solution.cases = iv.cases;
    res.conventional_worst_term = worst_case_inner(inst, budget).value;
    return res;
}

EffectiveResult solve_effective(const NominalInstance& inst, const BudgetSpec& budget, const SolverOptions& opt) {
    budget.validate(inst);
    AdmissibleInterval iv;
    try {
        iv = stage1_admissible(inst, opt);
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("stage I: ") + e.what());
    }
    return solve_effective(inst, iv, budget, opt);
}

double ineffective_penalty(const NominalInstance& inst, const AdmissibleInterval& iv, bool full_budget) {
    double s = 0.0;
    for (int j = 0; j < inst.m(); ++j) {
        if (full_budget) s += inst.c2[j] * (inst.y_up[j] - iv.s_up[j]);
        else if (iv.cases[j] == 'c' || iv.cases[j] == 'd') s += inst.c2[j] * (inst.y_nom[j] - iv.s_up[j]);
    }
    return s;
}

std::string stage1_csv(const NominalInstance& inst, const AdmissibleInterval& iv, const EffectiveParams& ep) {
    std::ostringstream os;
    os.precision(12);
    os << "j,y_low,y_nom,y_up,s_low,s_mid,s_up,case,h,e,v\n";
    for (int j = 0; j < inst.m(); ++j)
        os << j << ',' << inst.y_low[j] << ',' << inst.y_nom[j] << ',' << inst.y_up[j] << ',' << iv.s_low[j] << ','
           << iv.s_mid[j] << ',' << iv.s_up[j] << ',' << iv.cases[j] << ',' << ep.h[j] << ',' << ep.e[j] << ','
           << ep.v[j] << '\n';
    return os.str();
}

}  // namespace effbudget
