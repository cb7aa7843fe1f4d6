#include "effbudget/apps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "effbudget/error.hpp"
#include "json.hpp"

#ifndef EFFBUDGET_DATA_DIR
#define EFFBUDGET_DATA_DIR "data"
#endif

namespace effbudget {

using json = nlohmann::json;

namespace {

std::string num_str(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

bool centered(double lo, double nom, double up) {
    return std::fabs(nom - 0.5 * (lo + up)) <= 1e-7 * (1.0 + std::fabs(nom));
}

void throw_violations(ErrorKind kind, const std::string& what, const std::vector<std::string>& v) {
    std::string msg = what + ": " + std::to_string(v.size()) + " violation(s): ";
    for (std::size_t i = 0; i < v.size(); ++i) msg += (i ? "; " : "") + v[i];
    throw Error(kind, msg);
}

}  // namespace

// ---------------------------------------------------------------- SCED

std::vector<std::string> ScedInstance::violations() const {
    std::vector<std::string> out;
    auto add = [&](std::string s) { out.push_back(std::move(s)); };
    if (periods < 1) add("periods: must be at least 1");
    if (buses < 1) add("buses: must be at least 1");
    if (!(dt > 0.0)) add("dt: must be positive");
    if (!out.empty()) return out;
    const auto T = static_cast<std::size_t>(periods);
    double cmax = 0.0;
    for (const auto& g : generators) {
        std::string id = "generator '" + g.name + "'";
        if (g.bus < 0 || g.bus >= buses) add(id + ": bus " + std::to_string(g.bus) + " out of range");
        if (!(g.cost >= 0.0)) add(id + ": negative cost");
        if (!(0.0 <= g.pmin && g.pmin <= g.pmax)) add(id + ": need 0 <= pmin <= pmax");
        if (!(g.ramp_up >= 0.0) || !(g.ramp_down >= 0.0)) add(id + ": negative ramp limit");
        cmax = std::max(cmax, g.cost);
    }
    bool penalty_ok = farms.empty();
    for (const auto& f : farms) {
        std::string id = "farm '" + f.name + "'";
        if (f.bus < 0 || f.bus >= buses) add(id + ": bus " + std::to_string(f.bus) + " out of range");
        if (!(f.sigma >= 0.0)) add(id + ": negative curtailment penalty");
        penalty_ok = penalty_ok || f.sigma >= cmax;
        if (f.nominal.size() != T || f.low.size() != T || f.up.size() != T) {
            add(id + ": profiles need " + std::to_string(T) + " periods");
            continue;
        }
        for (std::size_t t = 0; t < T; ++t) {
            std::string at = id + " period " + std::to_string(t);
            if (!(f.low[t] >= 0.0)) add(at + ": negative low bound");
            if (!(f.low[t] <= f.nominal[t])) add(at + ": low " + num_str(f.low[t]) + " > nominal " + num_str(f.nominal[t]));
            else if (!(f.nominal[t] <= f.up[t])) add(at + ": nominal " + num_str(f.nominal[t]) + " > up " + num_str(f.up[t]));
            else if (!centered(f.low[t], f.nominal[t], f.up[t])) add(at + ": nominal is not the midpoint of [low, up]");
        }
    }
    if (!penalty_ok) add("curtailment penalty: no farm has sigma >= the largest generation cost");
    for (const auto& l : lines) {
        std::string id = "line '" + l.name + "'";
        if (static_cast<int>(l.sensitivity.size()) != buses)
            add(id + ": missing sensitivities (need " + std::to_string(buses) + ")");
        if (!(l.fmin <= l.fmax)) add(id + ": fmin > fmax");
    }
    if (load.size() != static_cast<std::size_t>(buses)) add("load: need one row per bus");
    else
        for (std::size_t i = 0; i < load.size(); ++i)
            if (load[i].size() != T) add("load: bus " + std::to_string(i) + " needs " + std::to_string(T) + " periods");
    if (!reserve_up.empty() && reserve_up.size() != T) add("reserve_up: need one entry per period");
    if (!reserve_down.empty() && reserve_down.size() != T) add("reserve_down: need one entry per period");
    if (!(gamma >= 0.0) || gamma > static_cast<double>(farms.size()) + 1e-12)
        add("gamma: outside [0, number of farms]");
    return out;
}

NominalInstance sced_nominal(const ScedInstance& s) {
    auto bad = s.violations();
    if (!bad.empty()) throw_violations(ErrorKind::instance, "sced instance", bad);
    const int T = s.periods, G = static_cast<int>(s.generators.size()), K = static_cast<int>(s.farms.size());
    const int p = 3 * G * T, m = K * T;
    auto P = [&](int g, int t) { return g * T + t; };
    auto RU = [&](int g, int t) { return G * T + g * T + t; };
    auto RD = [&](int g, int t) { return 2 * G * T + g * T + t; };
    auto W = [&](int k, int t) { return k * T + t; };

    NominalInstance inst;
    inst.c1.assign(p, 0.0);
    inst.x_upper.assign(p, 0.0);
    inst.x_names.resize(p);
    for (int g = 0; g < G; ++g) {
        const auto& gen = s.generators[g];
        double span = gen.pmax - gen.pmin;
        for (int t = 0; t < T; ++t) {
            std::string sfx = "_" + gen.name + "_" + std::to_string(t);
            inst.c1[P(g, t)] = gen.cost;
            inst.x_upper[P(g, t)] = gen.pmax;
            inst.x_upper[RU(g, t)] = std::isfinite(gen.ramp_up) ? std::min(span, gen.ramp_up * s.dt) : span;
            inst.x_upper[RD(g, t)] = std::isfinite(gen.ramp_down) ? std::min(span, gen.ramp_down * s.dt) : span;
            inst.x_names[P(g, t)] = "p" + sfx;
            inst.x_names[RU(g, t)] = "ru" + sfx;
            inst.x_names[RD(g, t)] = "rd" + sfx;
        }
    }
    inst.c2.resize(m);
    inst.y_nom.resize(m);
    inst.y_low.resize(m);
    inst.y_up.resize(m);
    inst.y_names.resize(m);
    for (int k = 0; k < K; ++k)
        for (int t = 0; t < T; ++t) {
            const auto& f = s.farms[k];
            inst.c2[W(k, t)] = f.sigma;
            inst.y_nom[W(k, t)] = f.nominal[t];
            inst.y_low[W(k, t)] = f.low[t];
            inst.y_up[W(k, t)] = f.up[t];
            inst.y_names[W(k, t)] = "w_" + f.name + "_" + std::to_string(t);
        }
    for (int t = 0; t < T; ++t) {
        std::vector<int> grp;
        for (int k = 0; k < K; ++k) grp.push_back(W(k, t));
        inst.budget_groups.push_back(grp);
    }

    struct R {
        std::vector<std::pair<int, double>> x, y;
        double rhs;
    };
    std::vector<R> le, eq;
    for (int t = 0; t < T; ++t) {
        R r{{}, {}, 0.0};
        for (int g = 0; g < G; ++g) r.x.push_back({P(g, t), 1.0});
        for (int k = 0; k < K; ++k) r.y.push_back({W(k, t), 1.0});
        for (const auto& row : s.load) r.rhs += row[t];
        eq.push_back(std::move(r));
    }
    for (const auto& line : s.lines)
        for (int t = 0; t < T; ++t) {
            R up{{}, {}, line.fmax}, lo{{}, {}, -line.fmin};
            for (int i = 0; i < s.buses; ++i) {
                up.rhs += line.sensitivity[i] * s.load[i][t];
                lo.rhs -= line.sensitivity[i] * s.load[i][t];
            }
            for (int g = 0; g < G; ++g) {
                double a = line.sensitivity[s.generators[g].bus];
                if (a != 0.0) {
                    up.x.push_back({P(g, t), a});
                    lo.x.push_back({P(g, t), -a});
                }
            }
            for (int k = 0; k < K; ++k) {
                double b = line.sensitivity[s.farms[k].bus];
                if (b != 0.0) {
                    up.y.push_back({W(k, t), b});
                    lo.y.push_back({W(k, t), -b});
                }
            }
            for (R* r : {&up, &lo}) {
                if (!std::isfinite(r->rhs)) continue;
                for (auto [j, b] : r->y)
                    if (b < 0.0)
                        throw Error(ErrorKind::instance, "line '" + line.name + "' period " + std::to_string(t) +
                                                             ": wind enters a finite flow limit with a negative "
                                                             "coefficient (assumption 2); drop that side with null");
                le.push_back(*r);
            }
        }
    for (int t = 0; t < T; ++t) {
        R ru{{}, {}, -(s.reserve_up.empty() ? 0.0 : s.reserve_up[t])};
        R rd{{}, {}, -(s.reserve_down.empty() ? 0.0 : s.reserve_down[t])};
        for (int g = 0; g < G; ++g) {
            ru.x.push_back({RU(g, t), -1.0});
            rd.x.push_back({RD(g, t), -1.0});
        }
        le.push_back(ru);
        le.push_back(rd);
    }
    for (int g = 0; g < G; ++g)
        for (int t = 0; t < T; ++t) {
            const auto& gen = s.generators[g];
            le.push_back({{{P(g, t), 1.0}, {RU(g, t), 1.0}}, {}, gen.pmax});
            le.push_back({{{RD(g, t), 1.0}, {P(g, t), -1.0}}, {}, -gen.pmin});
        }
    for (int g = 0; g < G; ++g) {
        const auto& gen = s.generators[g];
        for (int t = 1; t < T; ++t) {
            if (std::isfinite(gen.ramp_up))
                le.push_back({{{P(g, t), 1.0}, {RU(g, t), 1.0}, {P(g, t - 1), -1.0}}, {}, gen.ramp_up * s.dt});
            if (std::isfinite(gen.ramp_down))
                le.push_back({{{P(g, t - 1), 1.0}, {P(g, t), -1.0}, {RD(g, t), 1.0}}, {}, gen.ramp_down * s.dt});
        }
    }
    auto fill = [&](const std::vector<R>& rows, Matrix& A, Matrix& B, Vec& g) {
        A = Matrix(static_cast<int>(rows.size()), p);
        B = Matrix(static_cast<int>(rows.size()), m);
        g.clear();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (auto [k, v] : rows[i].x) A(static_cast<int>(i), k) += v;
            for (auto [j, v] : rows[i].y) B(static_cast<int>(i), j) += v;
            g.push_back(rows[i].rhs);
        }
    };
    fill(le, inst.A, inst.B, inst.g);
    fill(eq, inst.A_eq, inst.B_eq, inst.g_eq);
    return inst;
}

// ---------------------------------------------------------------- patients

std::vector<std::string> PatientInstance::violations() const {
    std::vector<std::string> out;
    auto add = [&](std::string s) { out.push_back(std::move(s)); };
    if (P < 1 || T < 1 || K < 1) {
        add("P, T, K: must be at least 1");
        return out;
    }
    const auto uP = static_cast<std::size_t>(P), uT = static_cast<std::size_t>(T);
    if (service_time.size() != uP) add("s: need one service time per priority");
    for (double v : service_time)
        if (!(v > 0.0)) add("s: service times must be positive");
    if (theta.size() != static_cast<std::size_t>(K)) add("theta: need K entries");
    else {
        if (theta[0] != 0.0) add("theta: first segment must be free (theta_1 = 0)");
        for (double v : theta)
            if (!(v >= 0.0)) add("theta: negative capacity cost");
    }
    if (L.size() < static_cast<std::size_t>(K)) add("L: need at least K breakpoints");
    else
        for (std::size_t i = 0; i < L.size(); ++i)
            if (!(L[i] > (i ? L[i - 1] : 0.0))) add("L: breakpoints must be positive and increasing");
    auto check_tp = [&](const std::vector<Vec>& v, const char* name) {
        if (v.size() != uT) {
            add(std::string(name) + ": need T rows");
            return false;
        }
        for (const auto& r : v)
            if (r.size() != uP) {
                add(std::string(name) + ": need P entries per row");
                return false;
            }
        return true;
    };
    bool ok = check_tp(penalty, "g") & check_tp(d_nom, "d_nominal") & check_tp(d_up, "d_up");
    if (!d_low.empty()) ok = check_tp(d_low, "d_low") && ok;
    if (ok)
        for (int t = 0; t < T; ++t)
            for (int p = 0; p < P; ++p) {
                std::string at = "day " + std::to_string(t + 1) + " priority " + std::to_string(p + 1);
                double lo = d_low.empty() ? 2 * d_nom[t][p] - d_up[t][p] : d_low[t][p];
                if (!(penalty[t][p] >= 0.0)) add(at + ": negative penalty");
                if (!(0.0 <= lo && lo <= d_nom[t][p] && d_nom[t][p] <= d_up[t][p]))
                    add(at + ": demand bounds not ordered (0 <= low <= nominal <= up)");
            }
    if (gamma.size() != uP) add("gamma: need one budget per priority");
    else
        for (double g : gamma)
            if (!(g >= 0.0) || g > T + 1e-12) add("gamma: outside [0, T]");
    return out;
}

NominalInstance patient_nominal(const PatientInstance& pi) {
    auto bad = pi.violations();
    if (!bad.empty()) throw_violations(ErrorKind::instance, "patient instance", bad);
    const int P = pi.P, T = pi.T, K = pi.K;
    NominalInstance inst;
    inst.check_assumption1 = false;
    auto Y = [&](int a, int p) { return a * P + p; };
    const int m = T * P;

    // Service counts: x[t,n,p] serves cohort (t-n+1, p) on day t.
    struct X {
        int t, n, p;
    };
    std::vector<X> xs;
    for (int t = 0; t < T; ++t)
        for (int n = 1; n <= t + 1; ++n)
            for (int p = 0; p < P; ++p) xs.push_back({t, n, p});
    const int nx = static_cast<int>(xs.size());
    auto C = [&](int i, int t) { return nx + i * T + t; };
    auto Q = [&](int i, int t) { return nx + K * T + i * T + t; };
    const int np = nx + 2 * K * T;
    inst.c1.assign(np, 0.0);
    inst.x_upper.assign(np, 0.0);
    inst.x_names.resize(np);
    for (int k = 0; k < nx; ++k) {
        const X& x = xs[k];
        int a = x.t - x.n + 1;
        inst.x_upper[k] = std::floor(pi.d_up[a][x.p]);
        inst.integer_x.push_back(k);
        inst.x_names[k] = "x_" + std::to_string(x.t + 1) + "_" + std::to_string(x.n) + "_" + std::to_string(x.p + 1);
    }
    for (int i = 0; i < K; ++i)
        for (int t = 0; t < T; ++t) {
            inst.c1[C(i, t)] = pi.theta[i];
            inst.x_upper[C(i, t)] = pi.L[i];
            inst.x_upper[Q(i, t)] = 1.0;
            inst.integer_x.push_back(Q(i, t));
            inst.x_names[C(i, t)] = "c_" + std::to_string(i + 1) + "_" + std::to_string(t + 1);
            inst.x_names[Q(i, t)] = "q_" + std::to_string(i + 1) + "_" + std::to_string(t + 1);
        }
    inst.c2.resize(m);
    inst.y_nom.resize(m);
    inst.y_low.resize(m);
    inst.y_up.resize(m);
    inst.y_names.resize(m);
    for (int a = 0; a < T; ++a)
        for (int p = 0; p < P; ++p) {
            int j = Y(a, p);
            inst.c2[j] = pi.penalty[a][p];
            inst.y_nom[j] = pi.d_nom[a][p];
            inst.y_up[j] = pi.d_up[a][p];
            inst.y_low[j] = pi.d_low.empty() ? 2 * pi.d_nom[a][p] - pi.d_up[a][p] : pi.d_low[a][p];
            inst.y_names[j] = "served_" + std::to_string(a + 1) + "_" + std::to_string(p + 1);
        }
    for (int p = 0; p < P; ++p) {
        std::vector<int> grp;
        for (int a = 0; a < T; ++a) grp.push_back(Y(a, p));
        inst.budget_groups.push_back(grp);
    }

    const int rows = T + m + (K >= 3 ? 2 * (K - 2) * T : 0);
    inst.A = Matrix(rows, np);
    inst.B = Matrix(rows, m);
    inst.g.assign(rows, 0.0);
    int r = 0;
    for (int t = 0; t < T; ++t, ++r) {
        for (int k = 0; k < nx; ++k)
            if (xs[k].t == t) inst.A(r, k) = pi.service_time[xs[k].p];
        for (int i = 0; i < K; ++i) inst.A(r, C(i, t)) = -1.0;
    }
    // Served count of a cohort cannot exceed what was scheduled for it.
    for (int a = 0; a < T; ++a)
        for (int p = 0; p < P; ++p, ++r) {
            inst.B(r, Y(a, p)) = 1.0;
            for (int k = 0; k < nx; ++k)
                if (xs[k].p == p && xs[k].t - xs[k].n + 1 == a) inst.A(r, k) = -1.0;
        }
    for (int i = 1; i + 1 < K; ++i) {
        double w = pi.L[i] - pi.L[i - 1];
        for (int t = 0; t < T; ++t) {
            inst.A(r, Q(i, t)) = w;
            inst.A(r, C(i, t)) = -1.0;
            ++r;
            inst.A(r, C(i, t)) = 1.0;
            inst.A(r, Q(i - 1, t)) = -w;
            ++r;
        }
    }
    return inst;
}

// ---------------------------------------------------------------- inventory

std::vector<std::string> InventoryInstance::violations() const {
    std::vector<std::string> out;
    auto add = [&](std::string s) { out.push_back(std::move(s)); };
    if (tau < 1) {
        add("tau: must be at least 1");
        return out;
    }
    const auto n = static_cast<std::size_t>(tau);
    auto len = [&](const Vec& v, const char* name) {
        if (v.size() != n) add(std::string(name) + ": need " + std::to_string(n) + " entries");
        for (double x : v)
            if (!std::isfinite(x)) {
                add(std::string(name) + ": non-finite entry");
                break;
            }
    };
    len(c_purchase, "c_purchase");
    len(c_fixed, "c_fixed");
    len(c_shortage, "c_shortage");
    len(c_holding, "c_holding");
    len(u_max, "u_max");
    len(w_nom, "w_nominal");
    len(w_up, "w_up");
    if (!w_low.empty()) len(w_low, "w_low");
    if (I_min.size() != I_max.size() || (I_min.size() != n && I_min.size() != n + 1))
        add("I_min/I_max: need tau or tau+1 entries each");
    if (!out.empty()) return out;
    for (std::size_t k = 0; k < n; ++k) {
        std::string at = "period " + std::to_string(k + 1);
        if (c_purchase[k] < 0 || c_fixed[k] < 0 || c_shortage[k] < 0 || c_holding[k] < 0) add(at + ": negative cost");
        if (u_max[k] < 0) add(at + ": negative u_max");
        double lo = w_low.empty() ? 2 * w_nom[k] - w_up[k] : w_low[k];
        if (!(0.0 <= lo && lo <= w_nom[k] && w_nom[k] <= w_up[k]))
            add(at + ": demand bounds not ordered (0 <= low <= nominal <= up)");
    }
    for (std::size_t k = 0; k < I_min.size(); ++k)
        if (I_min[k] > I_max[k]) add("inventory bounds: I_min > I_max at " + std::to_string(k + 1));
    if (!I_min.empty() && (I_initial < I_min[0] || I_initial > I_max[0])) add("I_initial: outside [I_min, I_max]");
    if (I_min.size() == n + 1 && (I_final < I_min[n] || I_final > I_max[n])) add("I_final: outside [I_min, I_max]");
    if (!(gamma >= 0.0) || gamma > tau + 1e-12) add("gamma: outside [0, tau]");
    return out;
}

NominalInstance inventory_nominal(const InventoryInstance& ii) {
    auto bad = ii.violations();
    if (!bad.empty()) throw_violations(ErrorKind::instance, "inventory instance", bad);
    const int n = ii.tau;
    auto U = [&](int k) { return k; };
    auto V = [&](int k) { return n + k; };
    auto IP = [&](int k) { return 2 * n + k; };          // k = 0..n
    auto IM = [&](int k) { return 2 * n + (n + 1) + k; };  // k = 0..n
    const int np = 2 * n + 2 * (n + 1);
    NominalInstance inst;
    inst.check_assumption1 = false;
    inst.c1.assign(np, 0.0);
    inst.x_upper.assign(np, kInf);
    inst.x_names.resize(np);
    for (int k = 0; k < n; ++k) {
        inst.c1[U(k)] = ii.c_purchase[k];
        inst.c1[V(k)] = ii.c_fixed[k];
        inst.c1[IP(k + 1)] = ii.c_holding[k];
        inst.x_upper[U(k)] = ii.u_max[k];
        inst.x_upper[V(k)] = 1.0;
        inst.integer_x.push_back(V(k));
        inst.x_names[U(k)] = "u_" + std::to_string(k + 1);
        inst.x_names[V(k)] = "v_" + std::to_string(k + 1);
    }
    for (int k = 0; k <= n; ++k) {
        inst.x_names[IP(k)] = "Ipos_" + std::to_string(k + 1);
        inst.x_names[IM(k)] = "Ineg_" + std::to_string(k + 1);
    }
    inst.c2 = ii.c_shortage;
    inst.y_nom = ii.w_nom;
    inst.y_up = ii.w_up;
    inst.y_low.resize(n);
    for (int k = 0; k < n; ++k) {
        inst.y_low[k] = ii.w_low.empty() ? 2 * ii.w_nom[k] - ii.w_up[k] : ii.w_low[k];
        inst.y_names.push_back("w_" + std::to_string(k + 1));
    }

    const int nb = static_cast<int>(ii.I_min.size());
    inst.A = Matrix(n + 2 * nb, np);
    inst.B = Matrix(n + 2 * nb, n);
    inst.g.assign(n + 2 * nb, 0.0);
    for (int k = 0; k < n; ++k) {
        inst.A(k, U(k)) = 1.0;
        inst.A(k, V(k)) = -ii.u_max[k];
    }
    for (int k = 0; k < nb; ++k) {
        int r = n + 2 * k;
        inst.A(r, IP(k)) = 1.0;
        inst.A(r, IM(k)) = -1.0;
        inst.g[r] = ii.I_max[k];
        inst.A(r + 1, IP(k)) = -1.0;
        inst.A(r + 1, IM(k)) = 1.0;
        inst.g[r + 1] = -ii.I_min[k];
    }
    inst.A_eq = Matrix(n + 2, np);
    inst.B_eq = Matrix(n + 2, n);
    inst.g_eq.assign(n + 2, 0.0);
    for (int k = 0; k < n; ++k) {
        inst.A_eq(k, IP(k + 1)) = 1.0;
        inst.A_eq(k, IM(k + 1)) = -1.0;
        inst.A_eq(k, IP(k)) = -1.0;
        inst.A_eq(k, IM(k)) = 1.0;
        inst.A_eq(k, U(k)) = -1.0;
        inst.B_eq(k, k) = 1.0;
    }
    inst.A_eq(n, IP(0)) = 1.0;
    inst.A_eq(n, IM(0)) = -1.0;
    inst.g_eq[n] = ii.I_initial;
    inst.A_eq(n + 1, IP(n)) = 1.0;
    inst.A_eq(n + 1, IM(n)) = -1.0;
    inst.g_eq[n + 1] = ii.I_final;
    return inst;
}

// ---------------------------------------------------------------- variants

const char* to_string(AppKind k) {
    switch (k) {
        case AppKind::generic: return "generic";
        case AppKind::sced: return "sced";
        case AppKind::patient: return "patient";
        case AppKind::inventory: return "inventory";
    }
    return "?";
}

AppKind parse_kind(const std::string& s) {
    if (s == "generic") return AppKind::generic;
    if (s == "sced") return AppKind::sced;
    if (s == "patient") return AppKind::patient;
    if (s == "inventory") return AppKind::inventory;
    throw Error(ErrorKind::validation, "unknown kind '" + s + "' (generic, sced, patient, inventory)");
}

Variant parse_variant(const std::string& s) {
    if (s == "nominal" || s == "deterministic") return Variant::nominal;
    if (s == "conventional") return Variant::conventional;
    if (s == "full" || s == "full_budget") return Variant::full_budget;
    if (s == "effective") return Variant::effective;
    if (s == "admissible") return Variant::admissible;
    throw Error(ErrorKind::validation,
                "unknown variant '" + s + "' (deterministic, conventional, full_budget, effective, admissible)");
}

BuiltModel build_variant(const NominalInstance& inst, Variant v, const BudgetSpec& budget, const SolverOptions& opt) {
    switch (v) {
        case Variant::nominal: return build_nominal(inst);
        case Variant::conventional: return build_conventional(inst, budget);
        case Variant::full_budget: return build_full_budget(inst);
        case Variant::effective: {
            auto iv = stage1_admissible(inst, opt);
            return build_stage2(inst, effective_params(iv, inst, budget), iv);
        }
        case Variant::admissible: return build_admissible(inst, stage1_admissible(inst, opt), budget);
    }
    throw Error(ErrorKind::state, "unknown variant");
}

BuiltModel build_sced(const ScedInstance& s, Variant v, const BudgetSpec& budget, const SolverOptions& opt) {
    return build_variant(sced_nominal(s), v, budget, opt);
}

BuiltModel build_patient(const PatientInstance& pi, Variant v, const BudgetSpec& budget, const SolverOptions& opt) {
    return build_variant(patient_nominal(pi), v, budget, opt);
}

BuiltModel build_inventory(const InventoryInstance& ii, Variant v, const BudgetSpec& budget,
                           const SolverOptions& opt) {
    return build_variant(inventory_nominal(ii), v, budget, opt);
}

RobustSolution solve_variant(const NominalInstance& inst, Variant v, const BudgetSpec& budget,
                             const SolverOptions& opt, const AdmissibleInterval* interval) {
    switch (v) {
        case Variant::nominal: return solve_nominal(inst, opt);
        case Variant::conventional: return solve_conventional(inst, budget, opt);
        case Variant::full_budget: return solve_full_budget(inst, opt);
        case Variant::effective:
            return interval ? solve_effective(inst, *interval, budget, opt).solution
                            : solve_effective(inst, budget, opt).solution;
        case Variant::admissible: {
            AdmissibleInterval iv = interval ? *interval : stage1_admissible(inst, opt);
            RobustSolution rs = solve_built(build_admissible(inst, iv, budget), opt);
            rs.gamma = budget.gamma;
            rs.gamma_effective = budget.gamma;
            rs.cases = iv.cases;
            return rs;
        }
    }
    throw Error(ErrorKind::state, "unknown variant");
}

// ---------------------------------------------------------------- loading

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::parse, "field '" + path + "': " + what);
}

const json& req(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) field_error(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) field_error(path.empty() ? key : path + "." + key, "missing");
    return *it;
}

const json* opt(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

std::string sub(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string sub(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double num(const json& v, const std::string& path) {
    if (v.is_null()) return kInf;  // only used where null means "no limit"
    if (!v.is_number()) field_error(path, "expected a number");
    return v.get<double>();
}

double num_strict(const json& v, const std::string& path) {
    if (!v.is_number()) field_error(path, "expected a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) field_error(path, "expected an integer");
    return v.get<int>();
}

Vec vec(const json& v, const std::string& path) {
    if (!v.is_array()) field_error(path, "expected an array of numbers");
    Vec out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(num_strict(v[i], sub(path, i)));
    return out;
}

std::vector<Vec> rows_of(const json& v, const std::string& path) {
    if (!v.is_array()) field_error(path, "expected an array of rows");
    std::vector<Vec> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(vec(v[i], sub(path, i)));
    return out;
}

Matrix matrix(const json& v, const std::string& path, int cols_if_empty) {
    auto r = rows_of(v, path);
    if (r.empty()) return Matrix(0, cols_if_empty);
    Matrix M(static_cast<int>(r.size()), static_cast<int>(r[0].size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i].size() != r[0].size()) field_error(sub(path, i), "row length differs from row 0");
        for (std::size_t j = 0; j < r[i].size(); ++j) M(static_cast<int>(i), static_cast<int>(j)) = r[i][j];
    }
    return M;
}

std::vector<Vec> read_csv(const std::filesystem::path& file, const std::vector<std::string>& header) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::validation, "cannot open " + file.string());
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string want;
    for (std::size_t i = 0; i < header.size(); ++i) want += (i ? "," : "") + header[i];
    if (line != want) throw Error(ErrorKind::parse, file.string() + ":1: expected header '" + want + "'");
    std::vector<Vec> out;
    int ln = 1;
    while (std::getline(in, line)) {
        ++ln;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Vec row;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw Error(ErrorKind::parse, file.string() + ":" + std::to_string(ln) + ": bad number '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != header.size())
            throw Error(ErrorKind::parse, file.string() + ":" + std::to_string(ln) + ": expected " +
                                              std::to_string(header.size()) + " columns");
        out.push_back(row);
    }
    return out;
}

std::filesystem::path asset(const std::filesystem::path& base, const std::string& name) {
    std::filesystem::path p = base / name;
    if (std::filesystem::exists(p)) return p;
    p = data_dir() / name;
    if (std::filesystem::exists(p)) return p;
    throw Error(ErrorKind::validation, "asset '" + name + "' not found next to the instance or in " + data_dir().string());
}

ScedInstance parse_sced(const json& j, const std::filesystem::path& base) {
    ScedInstance s;
    s.periods = integer(req(j, "periods", ""), "periods");
    s.buses = opt(j, "buses") ? integer(j["buses"], "buses") : 1;
    if (opt(j, "dt")) s.dt = num_strict(j["dt"], "dt");
    const auto T = static_cast<std::size_t>(std::max(s.periods, 0));
    const json& gens = req(j, "generators", "");
    if (!gens.is_array()) field_error("generators", "expected an array");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        std::string p = sub("generators", i);
        const json& g = gens[i];
        Generator gen;
        gen.name = opt(g, "name") ? g["name"].get<std::string>() : "G" + std::to_string(i + 1);
        gen.bus = opt(g, "bus") ? integer(g["bus"], sub(p, "bus")) : 0;
        gen.cost = num_strict(req(g, "cost", p), sub(p, "cost"));
        gen.pmin = opt(g, "pmin") ? num_strict(g["pmin"], sub(p, "pmin")) : 0.0;
        gen.pmax = num_strict(req(g, "pmax", p), sub(p, "pmax"));
        if (opt(g, "ramp_up")) gen.ramp_up = num_strict(g["ramp_up"], sub(p, "ramp_up"));
        if (opt(g, "ramp_down")) gen.ramp_down = num_strict(g["ramp_down"], sub(p, "ramp_down"));
        s.generators.push_back(gen);
    }
    if (const json* farms = opt(j, "farms")) {
        if (!farms->is_array()) field_error("farms", "expected an array");
        for (std::size_t i = 0; i < farms->size(); ++i) {
            std::string p = sub("farms", i);
            const json& f = (*farms)[i];
            WindFarm w;
            w.name = opt(f, "name") ? f["name"].get<std::string>() : "W" + std::to_string(i + 1);
            w.bus = opt(f, "bus") ? integer(f["bus"], sub(p, "bus")) : 0;
            w.sigma = num_strict(req(f, "sigma", p), sub(p, "sigma"));
            if (const json* prof = opt(f, "profile")) {
                double scale = opt(f, "scale") ? num_strict(f["scale"], sub(p, "scale")) : 1.0;
                auto rows = read_csv(asset(base, prof->get<std::string>()), {"period", "nominal", "low", "up"});
                if (rows.size() < T) field_error(sub(p, "profile"), "profile has fewer rows than periods");
                for (std::size_t t = 0; t < T; ++t) {
                    w.nominal.push_back(scale * rows[t][1]);
                    w.low.push_back(scale * rows[t][2]);
                    w.up.push_back(scale * rows[t][3]);
                }
            } else {
                w.nominal = vec(req(f, "nominal", p), sub(p, "nominal"));
                w.low = vec(req(f, "low", p), sub(p, "low"));
                w.up = vec(req(f, "up", p), sub(p, "up"));
            }
            s.farms.push_back(w);
        }
    }
    if (const json* lines = opt(j, "lines")) {
        if (!lines->is_array()) field_error("lines", "expected an array");
        for (std::size_t i = 0; i < lines->size(); ++i) {
            std::string p = sub("lines", i);
            const json& l = (*lines)[i];
            Line ln;
            ln.name = opt(l, "name") ? l["name"].get<std::string>() : "L" + std::to_string(i + 1);
            ln.fmax = opt(l, "fmax") ? num_strict(l["fmax"], sub(p, "fmax")) : kInf;
            ln.fmin = opt(l, "fmin") ? num_strict(l["fmin"], sub(p, "fmin")) : -kInf;
            if (const json* sens = opt(l, "sensitivity")) ln.sensitivity = vec(*sens, sub(p, "sensitivity"));
            s.lines.push_back(ln);
        }
    }
    if (const json* prof = opt(j, "load_profile")) {
        auto rows = read_csv(asset(base, prof->get<std::string>()), {"period", "load"});
        if (rows.size() < T) field_error("load_profile", "profile has fewer rows than periods");
        Vec share = opt(j, "load_share") ? vec(j["load_share"], "load_share") : Vec{1.0};
        if (static_cast<int>(share.size()) != s.buses) field_error("load_share", "need one share per bus");
        for (double sh : share) {
            Vec row;
            for (std::size_t t = 0; t < T; ++t) row.push_back(sh * rows[t][1]);
            s.load.push_back(row);
        }
    } else {
        s.load = rows_of(req(j, "load", ""), "load");
    }
    if (opt(j, "reserve_up")) s.reserve_up = vec(j["reserve_up"], "reserve_up");
    if (opt(j, "reserve_down")) s.reserve_down = vec(j["reserve_down"], "reserve_down");
    if (opt(j, "gamma")) s.gamma = num_strict(j["gamma"], "gamma");
    return s;
}

PatientInstance parse_patient(const json& j) {
    PatientInstance pi;
    pi.P = integer(req(j, "P", ""), "P");
    pi.T = integer(req(j, "T", ""), "T");
    pi.K = integer(req(j, "K", ""), "K");
    pi.service_time = vec(req(j, "s", ""), "s");
    pi.theta = vec(req(j, "theta", ""), "theta");
    pi.L = vec(req(j, "L", ""), "L");
    pi.penalty = rows_of(req(j, "g", ""), "g");
    pi.d_nom = rows_of(req(j, "d_nominal", ""), "d_nominal");
    pi.d_up = rows_of(req(j, "d_up", ""), "d_up");
    if (opt(j, "d_low")) pi.d_low = rows_of(j["d_low"], "d_low");
    pi.gamma = vec(req(j, "gamma", ""), "gamma");
    return pi;
}

InventoryInstance parse_inventory(const json& j) {
    InventoryInstance ii;
    ii.tau = integer(req(j, "tau", ""), "tau");
    ii.I_initial = num_strict(req(j, "I_initial", ""), "I_initial");
    ii.I_final = num_strict(req(j, "I_final", ""), "I_final");
    ii.gamma = num_strict(req(j, "gamma", ""), "gamma");
    ii.c_purchase = vec(req(j, "c_purchase", ""), "c_purchase");
    ii.c_fixed = vec(req(j, "c_fixed", ""), "c_fixed");
    ii.c_shortage = vec(req(j, "c_shortage", ""), "c_shortage");
    ii.c_holding = vec(req(j, "c_holding", ""), "c_holding");
    ii.u_max = vec(req(j, "u_max", ""), "u_max");
    ii.I_min = vec(req(j, "I_min", ""), "I_min");
    ii.I_max = vec(req(j, "I_max", ""), "I_max");
    ii.w_nom = vec(req(j, "w_nominal", ""), "w_nominal");
    ii.w_up = vec(req(j, "w_up", ""), "w_up");
    if (opt(j, "w_low")) ii.w_low = vec(j["w_low"], "w_low");
    return ii;
}

NominalInstance parse_generic(const json& j, BudgetSpec& budget) {
    NominalInstance inst;
    inst.c1 = vec(req(j, "c1", ""), "c1");
    inst.c2 = vec(req(j, "c2", ""), "c2");
    inst.A = matrix(req(j, "A", ""), "A", inst.p());
    inst.B = matrix(req(j, "B", ""), "B", inst.m());
    inst.g = vec(req(j, "g", ""), "g");
    inst.y_nom = vec(req(j, "y_nominal", ""), "y_nominal");
    inst.y_low = vec(req(j, "y_low", ""), "y_low");
    inst.y_up = vec(req(j, "y_up", ""), "y_up");
    if (opt(j, "A_eq")) {
        inst.A_eq = matrix(j["A_eq"], "A_eq", inst.p());
        inst.B_eq = matrix(req(j, "B_eq", ""), "B_eq", inst.m());
        inst.g_eq = vec(req(j, "g_eq", ""), "g_eq");
    }
    if (opt(j, "x_upper")) {
        const json& xu = j["x_upper"];
        if (!xu.is_array()) field_error("x_upper", "expected an array");
        for (std::size_t i = 0; i < xu.size(); ++i) inst.x_upper.push_back(num(xu[i], sub("x_upper", i)));
    }
    if (const json* ix = opt(j, "integer_x")) {
        if (!ix->is_array()) field_error("integer_x", "expected an array");
        for (std::size_t i = 0; i < ix->size(); ++i) inst.integer_x.push_back(integer((*ix)[i], sub("integer_x", i)));
    }
    if (const json* bg = opt(j, "budget_groups")) {
        if (!bg->is_array()) field_error("budget_groups", "expected an array");
        for (std::size_t i = 0; i < bg->size(); ++i) {
            std::vector<int> grp;
            const json& gj = (*bg)[i];
            if (!gj.is_array()) field_error(sub("budget_groups", i), "expected an array");
            for (std::size_t k = 0; k < gj.size(); ++k) grp.push_back(integer(gj[k], sub(sub("budget_groups", i), k)));
            inst.budget_groups.push_back(grp);
        }
    }
    if (opt(j, "non_centered")) inst.non_centered = j["non_centered"].get<bool>();
    if (opt(j, "check_assumption1")) inst.check_assumption1 = j["check_assumption1"].get<bool>();
    if (const json* g = opt(j, "gamma")) {
        if (g->is_array()) budget.per_group = vec(*g, "gamma");
        else budget.gamma = num_strict(*g, "gamma");
    }
    return inst;
}

BudgetedEllipsoid parse_ellipsoid(const json& e, const Vec& center) {
    BudgetedEllipsoid ell;
    ell.center = center;
    ell.axes = rows_of(req(e, "axes", "ellipsoid"), "ellipsoid.axes");
    ell.lengths = vec(req(e, "lengths", "ellipsoid"), "ellipsoid.lengths");
    ell.gamma = opt(e, "gamma") ? num_strict(e["gamma"], "ellipsoid.gamma") : 1.0;
    ell.budget = num_strict(req(e, "budget", "ellipsoid"), "ellipsoid.budget");
    return ell;
}

std::string fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("EFFBUDGET_DATA"); env && *env) return env;
    return EFFBUDGET_DATA_DIR;
}

std::filesystem::path resolve_instance(const std::string& name_or_path) {
    namespace fs = std::filesystem;
    if (fs::is_regular_file(name_or_path)) return name_or_path;
    for (const fs::path& p : {data_dir() / name_or_path, data_dir() / (name_or_path + ".json")})
        if (fs::is_regular_file(p)) return p;
    throw Error(ErrorKind::validation, "instance '" + name_or_path + "' not found (not a file, not bundled in " +
                                           data_dir().string() + ")");
}

LoadedInstance load_instance(const std::string& name_or_path, std::optional<AppKind> kind) {
    auto path = resolve_instance(name_or_path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::validation, "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    LoadedInstance li = load_instance_text(ss.str(), path.parent_path(), kind);
    li.source_path = path.string();
    li.name = path.stem().string();
    return li;
}

LoadedInstance load_instance_text(const std::string& text, const std::filesystem::path& base_dir,
                                  std::optional<AppKind> kind) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string what = e.what();
        auto pos = what.find("syntax error");
        throw Error(ErrorKind::parse, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                          (pos == std::string::npos ? what : what.substr(pos)));
    }
    if (!j.is_object()) throw Error(ErrorKind::parse, "line 1, column 1: top level must be an object");

    LoadedInstance li;
    li.content_hash = fnv1a(text);
    AppKind file_kind = AppKind::generic;
    if (const json* k = opt(j, "kind")) {
        if (!k->is_string()) field_error("kind", "expected a string");
        file_kind = parse_kind(k->get<std::string>());
    }
    if (kind && *kind != file_kind)
        throw Error(ErrorKind::validation, std::string("instance kind is '") + to_string(file_kind) + "', requested '" +
                                               to_string(*kind) + "'");
    li.kind = file_kind;
    if (const json* n = opt(j, "name")) li.name = n->get<std::string>();

    try {
        switch (file_kind) {
            case AppKind::sced: {
                li.sced = parse_sced(j, base_dir);
                auto bad = li.sced->violations();
                if (!bad.empty()) throw_violations(ErrorKind::validation, "sced instance", bad);
                li.nominal = sced_nominal(*li.sced);
                li.default_budget.gamma = li.sced->gamma;
                break;
            }
            case AppKind::patient: {
                li.patient = parse_patient(j);
                auto bad = li.patient->violations();
                if (!bad.empty()) throw_violations(ErrorKind::validation, "patient instance", bad);
                li.nominal = patient_nominal(*li.patient);
                li.default_budget.per_group = li.patient->gamma;
                break;
            }
            case AppKind::inventory: {
                li.inventory = parse_inventory(j);
                auto bad = li.inventory->violations();
                if (!bad.empty()) throw_violations(ErrorKind::validation, "inventory instance", bad);
                li.nominal = inventory_nominal(*li.inventory);
                li.default_budget.gamma = li.inventory->gamma;
                break;
            }
            case AppKind::generic: {
                li.nominal = parse_generic(j, li.default_budget);
                auto bad = li.nominal.violations();
                if (!bad.empty()) throw_violations(ErrorKind::validation, "instance", bad);
                break;
            }
        }
        if (const json* e = opt(j, "ellipsoid")) {
            li.ellipsoid = parse_ellipsoid(*e, li.nominal.y_nom);
            li.ellipsoid->validate();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::parse, std::string("type error: ") + e.what());
    } catch (const Error& e) {
        // Builder-level instance errors surface as validation failures here.
        if (e.kind() == ErrorKind::instance || e.kind() == ErrorKind::budget)
            throw Error(ErrorKind::validation, e.what());
        throw;
    }
    return li;
}

}  // namespace effbudget
