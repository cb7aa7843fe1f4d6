#include "effbudget/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "effbudget/error.hpp"

namespace effbudget {

const char* to_string(Variant v) {
    switch (v) {
        case Variant::nominal: return "nominal";
        case Variant::conventional: return "conventional";
        case Variant::full_budget: return "full_budget";
        case Variant::effective: return "effective";
        case Variant::admissible: return "admissible";
    }
    return "?";
}

std::vector<std::vector<int>> NominalInstance::groups() const {
    if (!budget_groups.empty()) return budget_groups;
    std::vector<int> all(m());
    std::iota(all.begin(), all.end(), 0);
    return {all};
}

std::vector<std::string> NominalInstance::violations(const Tolerances& tol) const {
    std::vector<std::string> out;
    auto add = [&](std::string s) { out.push_back(std::move(s)); };
    const int np = p(), nm = m(), nn = n();
    if (A.cols != np && !(nn == 0 && A.cols == 0)) add("dimension: A has " + std::to_string(A.cols) + " columns, c1 has " + std::to_string(np));
    if (B.rows != nn || (B.cols != nm && nn > 0)) add("dimension: B must be " + std::to_string(nn) + "x" + std::to_string(nm));
    if (static_cast<int>(g.size()) != nn) add("dimension: g has " + std::to_string(g.size()) + " entries, A has " + std::to_string(nn) + " rows");
    if (static_cast<int>(y_nom.size()) != nm || static_cast<int>(y_low.size()) != nm || static_cast<int>(y_up.size()) != nm)
        add("dimension: y_nominal/y_low/y_up must have " + std::to_string(nm) + " entries");
    if (n_eq() > 0) {
        if (A_eq.cols != np || B_eq.rows != n_eq() || B_eq.cols != nm || static_cast<int>(g_eq.size()) != n_eq())
            add("dimension: equality block inconsistent");
    }
    if (!x_upper.empty() && static_cast<int>(x_upper.size()) != np) add("dimension: x_upper has " + std::to_string(x_upper.size()) + " entries");
    if (!out.empty()) return out;

    for (double v : A.data) if (!std::isfinite(v)) { add("finite: A has a non-finite entry"); break; }
    for (double v : g) if (!std::isfinite(v)) { add("finite: g has a non-finite entry"); break; }
    for (int i = 0; i < B.rows; ++i)
        for (int j = 0; j < B.cols; ++j)
            if (!(B(i, j) >= 0.0)) {
                add("assumption 2 (B >= 0): B[" + std::to_string(i) + "][" + std::to_string(j) + "] = " + std::to_string(B(i, j)));
                i = B.rows;
                break;
            }
    for (int i = 0; i < B_eq.rows; ++i)
        for (int j = 0; j < B_eq.cols; ++j)
            if (!(B_eq(i, j) >= 0.0)) {
                add("assumption 2 (B >= 0): B_eq[" + std::to_string(i) + "][" + std::to_string(j) + "] negative");
                i = B_eq.rows;
                break;
            }
    for (int k = 0; k < np; ++k)
        if (!(c1[k] >= 0.0)) { add("assumption 3 (c >= 0): c1[" + std::to_string(k) + "] negative"); break; }
    for (int j = 0; j < nm; ++j)
        if (!(c2[j] >= 0.0)) { add("assumption 3 (c >= 0): c2[" + std::to_string(j) + "] negative"); break; }
    if (check_assumption1 && nm > 0) {
        double cmax = np > 0 ? *std::max_element(c1.begin(), c1.end()) : 0.0;
        bool any = false;
        for (double c : c2) any = any || c >= cmax;
        if (!any) add("assumption 1 (|P| >= 1): no penalty c2_j >= max c1");
    }
    for (int j = 0; j < nm; ++j) {
        if (!(y_low[j] >= 0.0)) add("bounds: y_low[" + std::to_string(j) + "] negative");
        if (!(y_low[j] <= y_nom[j] && y_nom[j] <= y_up[j]))
            add("bounds: y_low <= y_nominal <= y_up fails at " + std::to_string(j));
        else if (!non_centered && std::fabs(y_nom[j] - 0.5 * (y_low[j] + y_up[j])) > tol.feas * (1.0 + std::fabs(y_nom[j])))
            add("centering: y_nominal[" + std::to_string(j) + "] is not the midpoint of [y_low, y_up]");
    }
    if (!x_upper.empty())
        for (int k = 0; k < np; ++k)
            if (!(x_upper[k] >= 0.0)) add("bounds: x_upper[" + std::to_string(k) + "] negative");
    for (int k : integer_x)
        if (k < 0 || k >= np) add("integer_x: index " + std::to_string(k) + " out of range");
        else if (x_upper.empty() || !std::isfinite(x_upper[k])) add("integer_x: variable " + std::to_string(k) + " needs a finite upper bound");
    if (!budget_groups.empty()) {
        std::vector<int> seen(nm, 0);
        for (auto& grp : budget_groups)
            for (int j : grp) {
                if (j < 0 || j >= nm) add("budget_groups: index " + std::to_string(j) + " out of range");
                else ++seen[j];
            }
        for (int j = 0; j < nm; ++j)
            if (seen[j] != 1) { add("budget_groups: coordinate " + std::to_string(j) + " not covered exactly once"); break; }
    }
    return out;
}

void NominalInstance::validate(const Tolerances& tol) const {
    auto v = violations(tol);
    if (!v.empty()) throw Error(ErrorKind::instance, v.front());
}

void BudgetSpec::validate(const NominalInstance& inst) const {
    auto groups = inst.groups();
    if (!per_group.empty() && per_group.size() != groups.size())
        throw Error(ErrorKind::budget, "per-group budget count " + std::to_string(per_group.size()) +
                                           " does not match " + std::to_string(groups.size()) + " groups");
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double G = for_group(g);
        if (!(G >= 0.0) || G > static_cast<double>(groups[g].size()) + 1e-12)
            throw Error(ErrorKind::budget, "budget " + std::to_string(G) + " outside [0, " +
                                               std::to_string(groups[g].size()) + "] for group " + std::to_string(g));
    }
}

namespace {

std::vector<int> group_index(const NominalInstance& inst) {
    std::vector<int> of(inst.m(), 0);
    auto groups = inst.groups();
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int j : groups[g]) of[j] = static_cast<int>(g);
    return of;
}

}  // namespace

void add_core(BuiltModel& bm, const NominalInstance& inst, const Vec& y_cap) {
    LinearProgram& lp = bm.mp.base;
    bm.lay.p = inst.p();
    bm.lay.m = inst.m();
    bm.lay.x = 0;
    for (int k = 0; k < inst.p(); ++k) {
        double up = inst.x_upper.empty() ? kInf : inst.x_upper[k];
        std::string nm = k < static_cast<int>(inst.x_names.size()) ? inst.x_names[k] : "x" + std::to_string(k);
        lp.add_var(0.0, up, inst.c1[k], nm);
    }
    bm.lay.y = lp.num_vars;
    for (int j = 0; j < inst.m(); ++j) {
        std::string nm = j < static_cast<int>(inst.y_names.size()) ? inst.y_names[j] : "y" + std::to_string(j);
        lp.add_var(0.0, y_cap.empty() ? kInf : y_cap[j], -inst.c2[j], nm);
    }
    for (int k : inst.integer_x) bm.mp.mark_integer(k);
    auto add_rows = [&](const Matrix& A, const Matrix& B, const Vec& g, Rel rel, const char* tag) {
        for (int i = 0; i < A.rows; ++i) {
            std::vector<std::pair<int, double>> row;
            for (int k = 0; k < A.cols; ++k)
                if (A(i, k) != 0.0) row.push_back({bm.lay.x + k, A(i, k)});
            for (int j = 0; j < B.cols; ++j)
                if (B(i, j) != 0.0) row.push_back({bm.lay.y + j, B(i, j)});
            lp.add_row(std::move(row), rel, g[i], std::string(tag) + std::to_string(i));
        }
    };
    add_rows(inst.A, inst.B, inst.g, Rel::le, "res");
    add_rows(inst.A_eq, inst.B_eq, inst.g_eq, Rel::eq, "bal");
    bm.lay.group_of = group_index(inst);
    lp.offset = inst.constant;
    bm.base_constant = inst.constant;
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

BuiltModel build_with_caps(const NominalInstance& inst, const Vec& caps) {
    inst.validate();
    BuiltModel bm;
    bm.variant = Variant::nominal;
    add_core(bm, inst, caps);
    bm.constant_term = dot(inst.c2, inst.y_nom);
    bm.mp.base.offset += dot(inst.c2, caps);
    return bm;
}

BuiltModel build_nominal(const NominalInstance& inst) {
    BuiltModel bm = build_with_caps(inst, inst.y_nom);
    bm.variant = Variant::nominal;
    return bm;
}

BuiltModel build_full_budget(const NominalInstance& inst) {
    BuiltModel bm = build_with_caps(inst, inst.y_up);
    bm.variant = Variant::full_budget;
    return bm;
}

BuiltModel build_conventional(const NominalInstance& inst, const BudgetSpec& budget) {
    inst.validate();
    budget.validate(inst);
    BuiltModel bm;
    bm.variant = Variant::conventional;
    add_core(bm, inst, {});
    LinearProgram& lp = bm.mp.base;
    const int m = inst.m();
    auto groups = inst.groups();
    bm.lay.zp = lp.num_vars;
    for (int j = 0; j < m; ++j) lp.add_var(0.0, 1.0, 0.0, "zp" + std::to_string(j));
    bm.lay.zm = lp.num_vars;
    for (int j = 0; j < m; ++j) lp.add_var(0.0, 1.0, 0.0, "zm" + std::to_string(j));
    bm.lay.xi = lp.num_vars;
    for (std::size_t g = 0; g < groups.size(); ++g) lp.add_var(0.0, kInf, budget.for_group(g), "xi" + std::to_string(g));
    bm.lay.mu = lp.num_vars;
    for (int j = 0; j < m; ++j) lp.add_var(0.0, kInf, 1.0, "mu" + std::to_string(j));

    for (int j = 0; j < m; ++j) {
        std::vector<std::pair<int, double>> row{{bm.lay.y + j, 1.0}};
        double up = inst.y_up[j] - inst.y_nom[j], lo = inst.y_low[j] - inst.y_nom[j];
        if (up != 0.0) row.push_back({bm.lay.zp + j, -up});
        if (lo != 0.0) row.push_back({bm.lay.zm + j, -lo});
        lp.add_row(std::move(row), Rel::le, inst.y_nom[j], "cap" + std::to_string(j));
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::vector<std::pair<int, double>> row;
        for (int j : groups[g]) {
            row.push_back({bm.lay.zp + j, 1.0});
            row.push_back({bm.lay.zm + j, 1.0});
        }
        lp.add_row(std::move(row), Rel::le, budget.for_group(g), "budget" + std::to_string(g));
    }
    for (int j = 0; j < m; ++j) {
        lp.add_row({{bm.lay.xi + bm.lay.group_of[j], 1.0}, {bm.lay.mu + j, 1.0}}, Rel::ge,
                   inst.c2[j] * (inst.y_up[j] - inst.y_nom[j]), "dual" + std::to_string(j));
    }
    bm.constant_term = dot(inst.c2, inst.y_nom);
    lp.offset += bm.constant_term;
    return bm;
}

RobustSolution solve_built(const BuiltModel& bm, const SolverOptions& opt) {
    LpSolution s = bm.mp.integral_vars.empty() ? solve_lp(bm.mp.base, opt) : solve_milp(bm.mp, opt);
    RobustSolution rs;
    rs.variant = bm.variant;
    rs.status = s.status;
    rs.iterations = s.iterations;
    rs.nodes = s.nodes;
    if (s.status != Status::optimal) return rs;
    const ModelLayout& L = bm.lay;
    rs.x.assign(s.primal.begin() + L.x, s.primal.begin() + L.x + L.p);
    rs.y.assign(s.primal.begin() + L.y, s.primal.begin() + L.y + L.m);
    if (L.zp >= 0) rs.deviations.assign(s.primal.begin() + L.zp, s.primal.begin() + L.zp + L.m);
    if (L.r >= 0) rs.deviations.assign(s.primal.begin() + L.r, s.primal.begin() + L.r + L.m);
    // Downward deviations only tighten the caps and cost nothing, so any
    // optimum stays optimal with z- = 0; report that canonical point.
    if (L.zm >= 0) rs.z_minus.assign(L.m, 0.0);
    rs.objective = s.objective;
    const LinearProgram& lp = bm.mp.base;
    rs.constant_term = bm.constant_term;
    // objective = c1.x - c2.y + offset + aux, offset = constant + constant_term (+ cap shift)
    double aux = 0.0;
    for (int k = L.p + L.m; k < lp.num_vars; ++k) aux += lp.cost[k] * s.primal[k];
    rs.worst_case_term = aux + (lp.offset - bm.constant_term - bm.base_constant);
    return rs;
}

RobustSolution solve_nominal(const NominalInstance& inst, const SolverOptions& opt) {
    return solve_built(build_nominal(inst), opt);
}

RobustSolution solve_conventional(const NominalInstance& inst, const BudgetSpec& budget,
                                  const SolverOptions& opt) {
    RobustSolution rs = solve_built(build_conventional(inst, budget), opt);
    rs.gamma = budget.gamma;
    rs.gamma_effective = budget.gamma;
    return rs;
}

RobustSolution solve_full_budget(const NominalInstance& inst, const SolverOptions& opt) {
    RobustSolution rs = solve_built(build_full_budget(inst), opt);
    rs.gamma = inst.m();
    return rs;
}

WorstCase worst_case_inner(const NominalInstance& inst, const BudgetSpec& budget) {
    inst.validate();
    budget.validate(inst);
    WorstCase wc;
    wc.z_plus.assign(inst.m(), 0.0);
    auto groups = inst.groups();
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::vector<int> order = groups[g];
        auto weight = [&](int j) { return inst.c2[j] * (inst.y_up[j] - inst.y_nom[j]); };
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            double wa = weight(a), wb = weight(b);
            if (wa != wb) return wa > wb;
            return a < b;
        });
        double left = budget.for_group(g);
        for (int j : order) {
            if (left <= 0.0) break;
            double take = std::min(1.0, left);
            wc.z_plus[j] = take;
            wc.value += take * weight(j);
            left -= take;
        }
    }
    return wc;
}

std::vector<int> insensitive_rows(const RobustSolution& sol, const NominalInstance& inst,
                                  const Tolerances& tol) {
    std::vector<int> rows;
    if (sol.status != Status::optimal) return rows;
    double cmax = inst.p() > 0 ? *std::max_element(inst.c1.begin(), inst.c1.end()) : 0.0;
    for (int i = 0; i < inst.n(); ++i) {
        double ax = 0.0, by = 0.0;
        for (int k = 0; k < inst.p(); ++k) ax += inst.A(i, k) * sol.x[k];
        for (int j = 0; j < inst.m(); ++j) by += inst.B(i, j) * sol.y[j];
        bool penalty = false;
        for (int j = 0; j < inst.m(); ++j)
            if (inst.B(i, j) > 0.0 && inst.c2[j] >= cmax) penalty = true;
        double scale = 1.0 + std::fabs(inst.g[i]);
        if (penalty && ax >= -tol.feas * scale && std::fabs(ax + by - inst.g[i]) <= tol.feas * scale)
            rows.push_back(i);
    }
    return rows;
}

bool insensitivity_holds(const RobustSolution& sol, const NominalInstance& inst, const Tolerances& tol) {
    return !insensitive_rows(sol, inst, tol).empty();
}

}  // namespace effbudget
