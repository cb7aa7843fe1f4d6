#include "effbudget/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "effbudget/error.hpp"

namespace effbudget {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::model: return "model-error";
        case ErrorKind::solver_stalled: return "solver-stalled";
        case ErrorKind::instance: return "instance-error";
        case ErrorKind::budget: return "budget-error";
        case ErrorKind::classification: return "classification-error";
        case ErrorKind::state: return "state-error";
        case ErrorKind::parse: return "parse-error";
        case ErrorKind::validation: return "validation-error";
        case ErrorKind::sampling: return "sampling-error";
    }
    return "error";
}

bool is_solver_error(ErrorKind k) {
    return k == ErrorKind::solver_stalled || k == ErrorKind::classification ||
           k == ErrorKind::sampling;
}

const char* to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
    }
    return "?";
}

double Tolerances::obj(double value) const { return obj_rel * (1.0 + std::fabs(value)); }

int LinearProgram::add_var(double lo, double up, double c, std::string name) {
    lower.push_back(lo);
    upper.push_back(up);
    cost.push_back(c);
    names.push_back(std::move(name));
    return num_vars++;
}

int LinearProgram::add_row(std::vector<std::pair<int, double>> coeffs, Rel rel, double rhs,
                           std::string name) {
    Row r;
    r.coeffs = std::move(coeffs);
    r.rel = rel;
    r.rhs = rhs;
    r.name = std::move(name);
    rows.push_back(std::move(r));
    return static_cast<int>(rows.size()) - 1;
}

void LinearProgram::validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::model, m); };
    if (num_vars < 0) fail("negative variable count");
    if (static_cast<int>(cost.size()) != num_vars || static_cast<int>(lower.size()) != num_vars ||
        static_cast<int>(upper.size()) != num_vars)
        fail("vector sizes disagree with num_vars");
    if (!std::isfinite(offset)) fail("objective offset is not finite");
    for (int j = 0; j < num_vars; ++j) {
        if (!std::isfinite(cost[j])) fail("objective coefficient " + std::to_string(j) + " not finite");
        if (std::isnan(lower[j]) || std::isnan(upper[j])) fail("NaN bound on variable " + std::to_string(j));
        if (lower[j] > upper[j]) fail("lower > upper on variable " + std::to_string(j));
        if (lower[j] == kInf || upper[j] == -kInf) fail("empty bound on variable " + std::to_string(j));
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!std::isfinite(rows[r].rhs)) fail("rhs of row " + std::to_string(r) + " not finite");
        for (auto [j, a] : rows[r].coeffs) {
            if (j < 0 || j >= num_vars) fail("row " + std::to_string(r) + " references variable " + std::to_string(j));
            if (!std::isfinite(a)) fail("coefficient in row " + std::to_string(r) + " not finite");
        }
    }
}

double LinearProgram::evaluate(const std::vector<double>& x) const {
    double v = offset;
    for (int j = 0; j < num_vars; ++j) v += cost[j] * x[j];
    return v;
}

double LinearProgram::row_activity(int r, const std::vector<double>& x) const {
    double s = 0.0;
    for (auto [j, a] : rows[r].coeffs) s += a * x[j];
    return s;
}

void MixedProgram::mark_integer(int var) {
    if (std::find(integral_vars.begin(), integral_vars.end(), var) == integral_vars.end())
        integral_vars.push_back(var);
}

void MixedProgram::mark_binary(int var) {
    base.lower[var] = std::max(base.lower[var], 0.0);
    base.upper[var] = std::min(base.upper[var], 1.0);
    mark_integer(var);
}

bool MixedProgram::is_binary(int var) const {
    return std::find(integral_vars.begin(), integral_vars.end(), var) != integral_vars.end() &&
           base.lower[var] >= 0.0 && base.upper[var] <= 1.0;
}

void MixedProgram::validate() const {
    base.validate();
    for (int j : integral_vars) {
        if (j < 0 || j >= base.num_vars) throw Error(ErrorKind::model, "integral index out of range");
        if (!std::isfinite(base.lower[j]) || !std::isfinite(base.upper[j]))
            throw Error(ErrorKind::model, "integral variable " + std::to_string(j) + " needs finite bounds");
    }
}

namespace {

// Bounded-variable primal simplex on a dense tableau. Structural columns are
// shifted/split so every column lives in [0, u]; each row carries a unit
// column (slack or artificial) so B^-1 can be read off the tableau.
class Simplex {
public:
    Simplex(const LinearProgram& lp, const SolverOptions& opt) : lp_(lp), opt_(opt) {}

    LpSolution run();

private:
    struct ColMap {
        int col;       // first tableau column
        double sign;   // x = base + sign * t
        double base;
        int minus = -1;  // second column of a free split
    };

    void build();
    bool iterate(bool phase1);
    void pivot(int r, int q);
    void price(const std::vector<double>& c);
    void refresh_values();
    std::vector<double> recover_primal() const;
    std::vector<double> row_multipliers(const std::vector<double>& c) const;

    const LinearProgram& lp_;
    const SolverOptions& opt_;

    int m_ = 0;
    int ncols_ = 0;
    std::vector<ColMap> map_;
    std::vector<double> ub_;       // per tableau column
    std::vector<char> at_upper_;   // nonbasic status
    std::vector<char> is_art_;
    std::vector<double> cost2_;    // phase-2 cost per column
    std::vector<double> a0_;       // original (signed) coefficients, m_ x ncols_
    std::vector<double> b0_;
    std::vector<double> row_sign_;
    std::vector<int> unit_col_;

    std::vector<double> T_;        // tableau B^-1 A, m_ x ncols_
    std::vector<double> beta_;     // basic values
    std::vector<int> basis_;
    std::vector<int> pos_;         // column -> basis row or -1
    std::vector<double> d_;        // reduced costs
    std::int64_t iters_ = 0;
    bool unbounded_ = false;
    int unb_col_ = -1;
    double unb_dir_ = 1.0;

    double& at(int r, int c) { return T_[static_cast<std::size_t>(r) * ncols_ + c]; }
    double at(int r, int c) const { return T_[static_cast<std::size_t>(r) * ncols_ + c]; }
};

void Simplex::build() {
    const int n = lp_.num_vars;
    map_.resize(n);
    std::vector<double> col_ub;
    std::vector<double> col_cost;
    for (int j = 0; j < n; ++j) {
        double lo = lp_.lower[j], up = lp_.upper[j];
        ColMap cm;
        cm.col = static_cast<int>(col_ub.size());
        if (std::isfinite(lo)) {
            cm.sign = 1.0;
            cm.base = lo;
            col_ub.push_back(std::isfinite(up) ? up - lo : kInf);
            col_cost.push_back(lp_.cost[j]);
        } else if (std::isfinite(up)) {
            cm.sign = -1.0;
            cm.base = up;
            col_ub.push_back(kInf);
            col_cost.push_back(-lp_.cost[j]);
        } else {
            cm.sign = 1.0;
            cm.base = 0.0;
            col_ub.push_back(kInf);
            col_cost.push_back(lp_.cost[j]);
            cm.minus = static_cast<int>(col_ub.size());
            col_ub.push_back(kInf);
            col_cost.push_back(-lp_.cost[j]);
        }
        map_[j] = cm;
    }
    const int nstruct = static_cast<int>(col_ub.size());
    m_ = static_cast<int>(lp_.rows.size());

    // Row data in shifted column space.
    std::vector<double> dense(static_cast<std::size_t>(m_) * nstruct, 0.0);
    std::vector<double> rhs(m_);
    for (int r = 0; r < m_; ++r) {
        const Row& row = lp_.rows[r];
        double b = row.rhs;
        for (auto [j, a] : row.coeffs) {
            const ColMap& cm = map_[j];
            b -= a * cm.base;
            dense[static_cast<std::size_t>(r) * nstruct + cm.col] += a * cm.sign;
            if (cm.minus >= 0) dense[static_cast<std::size_t>(r) * nstruct + cm.minus] -= a;
        }
        rhs[r] = b;
    }

    // Slack columns, then artificials.
    std::vector<int> slack_of(m_, -1);
    std::vector<double> slack_coef(m_, 0.0);
    int ncol = nstruct;
    for (int r = 0; r < m_; ++r) {
        Rel rel = lp_.rows[r].rel;
        if (rel == Rel::le) {
            slack_of[r] = ncol++;
            slack_coef[r] = 1.0;
        } else if (rel == Rel::ge) {
            slack_of[r] = ncol++;
            slack_coef[r] = -1.0;
        }
    }
    row_sign_.assign(m_, 1.0);
    unit_col_.assign(m_, -1);
    std::vector<int> art_of(m_, -1);
    for (int r = 0; r < m_; ++r) {
        double s = rhs[r] < 0 ? -1.0 : 1.0;
        if (slack_of[r] >= 0 && slack_coef[r] * s > 0) {
            row_sign_[r] = s;
            unit_col_[r] = slack_of[r];
        } else {
            row_sign_[r] = s;
            art_of[r] = ncol;
            unit_col_[r] = ncol++;
        }
    }
    ncols_ = ncol;
    ub_.assign(ncols_, kInf);
    cost2_.assign(ncols_, 0.0);
    is_art_.assign(ncols_, 0);
    for (int c = 0; c < nstruct; ++c) {
        ub_[c] = col_ub[c];
        cost2_[c] = col_cost[c];
    }
    a0_.assign(static_cast<std::size_t>(m_) * ncols_, 0.0);
    b0_.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
        double s = row_sign_[r];
        for (int c = 0; c < nstruct; ++c) a0_[static_cast<std::size_t>(r) * ncols_ + c] = s * dense[static_cast<std::size_t>(r) * nstruct + c];
        if (slack_of[r] >= 0) a0_[static_cast<std::size_t>(r) * ncols_ + slack_of[r]] = s * slack_coef[r];
        if (art_of[r] >= 0) {
            a0_[static_cast<std::size_t>(r) * ncols_ + art_of[r]] = 1.0;
            is_art_[art_of[r]] = 1;
        }
        b0_[r] = s * rhs[r];
    }
    T_ = a0_;
    beta_ = b0_;
    basis_ = unit_col_;
    pos_.assign(ncols_, -1);
    for (int r = 0; r < m_; ++r) pos_[basis_[r]] = r;
    at_upper_.assign(ncols_, 0);
}

void Simplex::price(const std::vector<double>& c) {
    d_ = c;
    for (int r = 0; r < m_; ++r) {
        double cb = c[basis_[r]];
        if (cb == 0.0) continue;
        const double* row = &T_[static_cast<std::size_t>(r) * ncols_];
        for (int j = 0; j < ncols_; ++j) d_[j] -= cb * row[j];
    }
    for (int r = 0; r < m_; ++r) d_[basis_[r]] = 0.0;
}

void Simplex::pivot(int r, int q) {
    double* prow = &T_[static_cast<std::size_t>(r) * ncols_];
    double p = prow[q];
    for (int j = 0; j < ncols_; ++j) prow[j] /= p;
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
        if (i == r) continue;
        double* row = &T_[static_cast<std::size_t>(i) * ncols_];
        double f = row[q];
        if (f == 0.0) continue;
        for (int j = 0; j < ncols_; ++j) row[j] -= f * prow[j];
        row[q] = 0.0;
    }
    double f = d_[q];
    if (f != 0.0) {
        for (int j = 0; j < ncols_; ++j) d_[j] -= f * prow[j];
        d_[q] = 0.0;
    }
    pos_[basis_[r]] = -1;
    basis_[r] = q;
    pos_[q] = r;
}

// beta = B^-1 (b - sum_{nonbasic at upper} a_j u_j), using the unit columns.
void Simplex::refresh_values() {
    std::vector<double> rhs = b0_;
    for (int j = 0; j < ncols_; ++j) {
        if (pos_[j] >= 0 || !at_upper_[j]) continue;
        for (int r = 0; r < m_; ++r) rhs[r] -= a0_[static_cast<std::size_t>(r) * ncols_ + j] * ub_[j];
    }
    for (int i = 0; i < m_; ++i) {
        double v = 0.0;
        for (int r = 0; r < m_; ++r) v += at(i, unit_col_[r]) * rhs[r];
        beta_[i] = v;
    }
}

bool Simplex::iterate(bool phase1) {
    const double eps_d = 1e-9;
    const double eps_p = 1e-9;
    int degenerate_run = 0;
    bool bland = false;
    int since_refresh = 0;
    for (;;) {
        if (iters_ >= opt_.iteration_cap)
            throw Error(ErrorKind::solver_stalled,
                        "simplex iteration cap " + std::to_string(opt_.iteration_cap) + " exceeded");
        int q = -1;
        double best = 0.0;
        for (int j = 0; j < ncols_; ++j) {
            if (pos_[j] >= 0) continue;
            if (!phase1 && is_art_[j]) continue;
            if (ub_[j] == 0.0) continue;
            double dj = d_[j];
            double score = 0.0;
            if (!at_upper_[j] && dj < -eps_d) score = -dj;
            else if (at_upper_[j] && dj > eps_d) score = dj;
            if (score <= 0.0) continue;
            if (bland) {
                q = j;
                break;
            }
            if (score > best) {
                best = score;
                q = j;
            }
        }
        if (q < 0) return true;
        double dir = at_upper_[q] ? -1.0 : 1.0;

        // Ratio test.
        double theta = ub_[q];
        int leave = -1;
        bool leave_to_upper = false;
        double leave_piv = 0.0;
        for (int i = 0; i < m_; ++i) {
            double alpha = at(i, q) * dir;
            if (std::fabs(alpha) <= eps_p) continue;
            int bv = basis_[i];
            double lim;
            bool to_up;
            if (alpha > 0) {
                lim = std::max(beta_[i], 0.0) / alpha;
                to_up = false;
            } else {
                double u = ub_[bv];
                if (!phase1 && is_art_[bv]) u = 0.0;
                if (!std::isfinite(u)) continue;
                lim = std::max(u - beta_[i], 0.0) / (-alpha);
                to_up = true;
            }
            bool take = false;
            if (lim < theta - 1e-12) {
                take = true;
            } else if (leave >= 0 && lim <= theta + 1e-12) {
                // Tie between rows: Bland picks the lowest basic index,
                // otherwise the larger pivot for stability.
                if (bland) take = basis_[i] < basis_[leave];
                else take = std::fabs(alpha) > std::fabs(leave_piv) * (1 + 1e-9) ||
                            (std::fabs(std::fabs(alpha) - std::fabs(leave_piv)) <= 1e-9 * std::fabs(leave_piv) &&
                             basis_[i] < basis_[leave]);
            }
            if (take) {
                theta = lim;
                leave = i;
                leave_to_upper = to_up;
                leave_piv = alpha;
            }
        }
        if (!std::isfinite(theta)) {
            unbounded_ = true;
            unb_col_ = q;
            unb_dir_ = dir;
            return false;
        }
        ++iters_;
        if (theta <= 1e-12) {
            if (++degenerate_run > 50) bland = true;
        } else {
            degenerate_run = 0;
            bland = false;
        }
        for (int i = 0; i < m_; ++i) beta_[i] -= theta * dir * at(i, q);
        if (leave < 0) {
            at_upper_[q] = at_upper_[q] ? 0 : 1;
        } else {
            int out = basis_[leave];
            double entering_value = at_upper_[q] ? ub_[q] - theta : theta;
            pivot(leave, q);
            beta_[leave] = entering_value;
            at_upper_[q] = 0;
            at_upper_[out] = leave_to_upper ? 1 : 0;
            if (is_art_[out]) at_upper_[out] = 0;
        }
        if (++since_refresh >= 100) {
            refresh_values();
            since_refresh = 0;
        }
    }
}

std::vector<double> Simplex::recover_primal() const {
    std::vector<double> t(ncols_, 0.0);
    for (int j = 0; j < ncols_; ++j)
        if (pos_[j] < 0 && at_upper_[j]) t[j] = ub_[j];
    for (int r = 0; r < m_; ++r) t[basis_[r]] = beta_[r];
    std::vector<double> x(lp_.num_vars);
    for (int j = 0; j < lp_.num_vars; ++j) {
        const ColMap& cm = map_[j];
        double v = cm.base + cm.sign * t[cm.col];
        if (cm.minus >= 0) v -= t[cm.minus];
        double lo = lp_.lower[j], up = lp_.upper[j];
        if (v < lo && v > lo - 1e-9) v = lo;
        if (v > up && v < up + 1e-9) v = up;
        x[j] = v;
    }
    return x;
}

// Unit columns carry coefficient +1 in the sign-normalized rows.
std::vector<double> Simplex::row_multipliers(const std::vector<double>& c) const {
    std::vector<double> pi(m_);
    for (int r = 0; r < m_; ++r) pi[r] = (c[unit_col_[r]] - d_[unit_col_[r]]) * row_sign_[r];
    return pi;
}

LpSolution Simplex::run() {
    build();
    LpSolution sol;

    bool any_art = false;
    for (int c = 0; c < ncols_; ++c) any_art = any_art || is_art_[c];
    if (any_art) {
        std::vector<double> c1(ncols_, 0.0);
        for (int c = 0; c < ncols_; ++c)
            if (is_art_[c]) c1[c] = 1.0;
        price(c1);
        iterate(true);
        refresh_values();
        double infeas = 0.0;
        double scale = 1.0;
        for (int r = 0; r < m_; ++r) {
            if (is_art_[basis_[r]]) infeas += std::fabs(beta_[r]);
            scale = std::max(scale, std::fabs(b0_[r]));
        }
        if (infeas > opt_.tol.feas * scale) {
            sol.status = Status::infeasible;
            sol.certificate = row_multipliers(c1);
            sol.iterations = iters_;
            return sol;
        }
        // Drive zero-level artificials out of the basis where possible.
        for (int r = 0; r < m_; ++r) {
            if (!is_art_[basis_[r]]) continue;
            int q = -1;
            double best = 1e-9;
            for (int j = 0; j < ncols_; ++j) {
                if (is_art_[j] || pos_[j] >= 0) continue;
                if (std::fabs(at(r, j)) > best) {
                    best = std::fabs(at(r, j));
                    q = j;
                }
            }
            if (q >= 0) {
                double val = at_upper_[q] ? ub_[q] : 0.0;
                pivot(r, q);
                at_upper_[q] = 0;
                beta_[r] = val;
                refresh_values();
            }
        }
        for (int c = 0; c < ncols_; ++c)
            if (is_art_[c]) ub_[c] = 0.0;
    }

    price(cost2_);
    bool ok = iterate(false);
    sol.iterations = iters_;
    if (!ok) {
        sol.status = Status::unbounded;
        std::vector<double> ray_t(ncols_, 0.0);
        ray_t[unb_col_] = unb_dir_;
        for (int r = 0; r < m_; ++r) ray_t[basis_[r]] = -unb_dir_ * at(r, unb_col_);
        sol.certificate.assign(lp_.num_vars, 0.0);
        for (int j = 0; j < lp_.num_vars; ++j) {
            const ColMap& cm = map_[j];
            double v = cm.sign * ray_t[cm.col];
            if (cm.minus >= 0) v -= ray_t[cm.minus];
            sol.certificate[j] = v;
        }
        return sol;
    }
    refresh_values();
    sol.status = Status::optimal;
    sol.primal = recover_primal();
    sol.objective = lp_.evaluate(sol.primal);
    sol.duals = row_multipliers(cost2_);
    sol.reduced_costs = lp_.cost;
    for (int r = 0; r < m_; ++r)
        for (auto [j, a] : lp_.rows[r].coeffs) sol.reduced_costs[j] -= sol.duals[r] * a;
    return sol;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SolverOptions& opt) {
    lp.validate();
    Simplex s(lp, opt);
    return s.run();
}

double dual_objective(const LinearProgram& lp, const LpSolution& sol) {
    double v = lp.offset;
    for (std::size_t r = 0; r < lp.rows.size(); ++r) v += sol.duals[r] * lp.rows[r].rhs;
    for (int j = 0; j < lp.num_vars; ++j) {
        double d = sol.reduced_costs[j];
        if (d > 0) v += d * lp.lower[j];
        else if (d < 0) v += d * lp.upper[j];
    }
    return v;
}

LpSolution solve_milp(const MixedProgram& mp, const SolverOptions& opt) {
    mp.validate();
    struct Node {
        std::vector<double> lower, upper;
    };
    LinearProgram work = mp.base;
    std::vector<Node> stack;
    stack.push_back({mp.base.lower, mp.base.upper});
    LpSolution best;
    best.status = Status::infeasible;
    bool have = false;
    std::int64_t nodes = 0, iters = 0;
    while (!stack.empty()) {
        if (nodes >= opt.node_cap)
            throw Error(ErrorKind::solver_stalled,
                        "branch-and-bound node cap " + std::to_string(opt.node_cap) + " exceeded");
        Node node = std::move(stack.back());
        stack.pop_back();
        ++nodes;
        work.lower = node.lower;
        work.upper = node.upper;
        Simplex s(work, opt);
        LpSolution rel = s.run();
        iters += rel.iterations;
        if (rel.status == Status::infeasible) continue;
        if (rel.status == Status::unbounded) {
            rel.nodes = nodes;
            rel.iterations = iters;
            return rel;
        }
        if (have && rel.objective >= best.objective - opt.gap_abs) continue;
        int branch = -1;
        double most = 0.0;
        for (int j : [&] {
                 auto v = mp.integral_vars;
                 std::sort(v.begin(), v.end());
                 return v;
             }()) {
            double x = rel.primal[j];
            double frac = std::fabs(x - std::round(x));
            if (frac > opt.int_tol && frac > most + 1e-12) {
                most = frac;
                branch = j;
            }
        }
        if (branch < 0) {
            for (int j : mp.integral_vars) rel.primal[j] = std::round(rel.primal[j]);
            rel.objective = mp.base.evaluate(rel.primal);
            best = std::move(rel);
            have = true;
            continue;
        }
        double x = rel.primal[branch];
        Node down = node, up = node;
        down.upper[branch] = std::floor(x);
        up.lower[branch] = std::ceil(x);
        bool down_first = (x - std::floor(x)) <= 0.5;
        if (down_first) {
            stack.push_back(std::move(up));
            stack.push_back(std::move(down));
        } else {
            stack.push_back(std::move(down));
            stack.push_back(std::move(up));
        }
    }
    best.nodes = nodes;
    best.iterations = iters;
    if (have) {
        best.duals.clear();
        best.reduced_costs.clear();
    }
    return best;
}

FeasibilityReport check_feasible(const LinearProgram& lp, const std::vector<double>& point,
                                 double tol_feas) {
    if (static_cast<int>(point.size()) != lp.num_vars)
        throw Error(ErrorKind::model, "point has " + std::to_string(point.size()) + " entries, model has " +
                                          std::to_string(lp.num_vars) + " variables");
    FeasibilityReport rep;
    auto note = [&](Violation::Kind k, int idx, double amount) {
        rep.max_violation = std::max(rep.max_violation, amount);
        if (amount > 0.0) rep.violations.push_back({k, idx, amount});
    };
    for (int j = 0; j < lp.num_vars; ++j) {
        if (point[j] < lp.lower[j]) note(Violation::Kind::lower_bound, j, lp.lower[j] - point[j]);
        if (point[j] > lp.upper[j]) note(Violation::Kind::upper_bound, j, point[j] - lp.upper[j]);
    }
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
        double act = lp.row_activity(static_cast<int>(r), point);
        double rhs = lp.rows[r].rhs;
        double v = 0.0;
        switch (lp.rows[r].rel) {
            case Rel::le: v = act - rhs; break;
            case Rel::ge: v = rhs - act; break;
            case Rel::eq: v = std::fabs(act - rhs); break;
        }
        if (v > 0.0) note(Violation::Kind::row, static_cast<int>(r), v);
    }
    rep.feasible = rep.max_violation <= tol_feas;
    return rep;
}

namespace {

std::string mps_num(double v) {
    char buf[32];
    for (int prec = 12; prec >= 1; --prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::string(buf).size() <= 12) return buf;
    }
    return buf;
}

std::string pad(const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

// Field layout: 2-3, 5-12, 15-22, 25-36, 40-47, 50-61.
std::string mps_line(const std::string& f1, const std::string& f2, const std::string& f3 = {},
                     const std::string& f4 = {}, const std::string& f5 = {},
                     const std::string& f6 = {}) {
    std::string s = " " + pad(f1, 2) + " " + pad(f2, 8);
    if (!f3.empty() || !f4.empty()) {
        s += "  " + pad(f3, 8) + "  ";
        std::string num = f4;
        if (num.size() < 12) num = std::string(12 - num.size(), ' ') + num;
        s += num;
    }
    if (!f5.empty()) {
        std::string num = f6;
        if (num.size() < 12) num = std::string(12 - num.size(), ' ') + num;
        s += "   " + pad(f5, 8) + "  " + num;
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

std::string col_name(int j) {
    char b[16];
    std::snprintf(b, sizeof b, "C%07d", j + 1);
    return b;
}

std::string row_name(std::size_t r) {
    char b[16];
    std::snprintf(b, sizeof b, "R%07zu", r + 1);
    return b;
}

}  // namespace

void write_mps(std::ostream& os, const MixedProgram& mp, const std::string& name) {
    const LinearProgram& lp = mp.base;
    lp.validate();
    os << "NAME          " << name.substr(0, 8) << "\n";
    os << "ROWS\n";
    os << mps_line("N", "OBJ") << "\n";
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
        const char* t = lp.rows[r].rel == Rel::le ? "L" : lp.rows[r].rel == Rel::ge ? "G" : "E";
        os << mps_line(t, row_name(r)) << "\n";
    }
    std::vector<std::vector<std::pair<std::string, double>>> cols(lp.num_vars);
    for (int j = 0; j < lp.num_vars; ++j)
        if (lp.cost[j] != 0.0) cols[j].push_back({"OBJ", lp.cost[j]});
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
        std::vector<std::pair<int, double>> merged = lp.rows[r].coeffs;
        std::sort(merged.begin(), merged.end());
        for (std::size_t k = 0; k < merged.size(); ++k) {
            double a = merged[k].second;
            while (k + 1 < merged.size() && merged[k + 1].first == merged[k].first) a += merged[++k].second;
            if (a != 0.0) cols[merged[k].first].push_back({row_name(r), a});
        }
    }
    std::vector<char> integral(lp.num_vars, 0);
    for (int j : mp.integral_vars) integral[j] = 1;
    os << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (int j = 0; j < lp.num_vars; ++j) {
        if (integral[j] != in_int) {
            char mk[16];
            std::snprintf(mk, sizeof mk, "M%07d", marker++);
            os << mps_line("", mk, "'MARKER'", "", "", "") << "                 "
               << (integral[j] ? "'INTORG'" : "'INTEND'") << "\n";
            in_int = integral[j];
        }
        if (cols[j].empty()) {
            os << mps_line("", col_name(j), "OBJ", mps_num(0.0)) << "\n";
            continue;
        }
        for (auto& [rn, a] : cols[j]) os << mps_line("", col_name(j), rn, mps_num(a)) << "\n";
    }
    if (in_int) {
        char mk[16];
        std::snprintf(mk, sizeof mk, "M%07d", marker++);
        os << mps_line("", mk, "'MARKER'", "", "", "") << "                 'INTEND'\n";
    }
    os << "RHS\n";
    if (lp.offset != 0.0) os << mps_line("", "RHS", "OBJ", mps_num(-lp.offset)) << "\n";
    for (std::size_t r = 0; r < lp.rows.size(); ++r)
        if (lp.rows[r].rhs != 0.0) os << mps_line("", "RHS", row_name(r), mps_num(lp.rows[r].rhs)) << "\n";
    os << "BOUNDS\n";
    for (int j = 0; j < lp.num_vars; ++j) {
        double lo = lp.lower[j], up = lp.upper[j];
        std::string c = col_name(j);
        if (lo == up) {
            os << mps_line("FX", "BND", c, mps_num(lo)) << "\n";
            continue;
        }
        if (integral[j] && lo == 0.0 && up == 1.0) {
            os << mps_line("BV", "BND", c, mps_num(1.0)) << "\n";
            continue;
        }
        if (!std::isfinite(lo) && !std::isfinite(up)) {
            os << mps_line("FR", "BND", c) << "\n";
            continue;
        }
        if (!std::isfinite(lo)) os << mps_line("MI", "BND", c) << "\n";
        else if (lo != 0.0) os << mps_line("LO", "BND", c, mps_num(lo)) << "\n";
        if (std::isfinite(up)) os << mps_line("UP", "BND", c, mps_num(up)) << "\n";
    }
    os << "ENDATA\n";
}

}  // namespace effbudget
