#include "effbudget/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "effbudget/apps.hpp"
#include "effbudget/error.hpp"

namespace effbudget {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// [0, 1) with 53 random bits; std::uniform_real_distribution is not
// specified bit-for-bit across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Runs body(i) for i in [0, n) on up to `jobs` threads; rethrows the first error.
template <class F>
void parallel_for(int n, int jobs, F body) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

const char* approach_name(Variant v) { return v == Variant::nominal ? "deterministic" : to_string(v); }

}  // namespace

std::uint64_t scenario_seed(std::uint64_t seed, std::uint64_t index) { return splitmix(splitmix(seed) ^ index); }

std::vector<Scenario> generate_scenarios(const NominalInstance& inst, const BudgetSpec& budget, int n,
                                         std::uint64_t seed, const SamplingOptions& opt) {
    if (n < 1) throw Error(ErrorKind::validation, "scenario count must be at least 1");
    inst.validate();
    budget.validate(inst);
    const int m = inst.m();
    auto groups = inst.groups();
    std::vector<std::int64_t> draws(groups.size(), 0), accepted(groups.size(), 0);
    std::vector<Scenario> out(n);
    for (int s = 0; s < n; ++s) {
        Scenario& sc = out[s];
        sc.seed_index = static_cast<std::uint64_t>(s);
        sc.y_actual = inst.y_nom;
        sc.z.assign(m, 0.0);
        std::mt19937_64 rng(scenario_seed(seed, static_cast<std::uint64_t>(s)));
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const double G = budget.for_group(g);
            if (G <= 0.0) continue;
            while (true) {
                ++draws[g];
                double total = 0.0;
                for (int j : groups[g]) {
                    double y = inst.y_low[j] + unit(rng) * (inst.y_up[j] - inst.y_low[j]);
                    double range = inst.y_up[j] - inst.y_nom[j];
                    double z = range > 0.0 ? std::fabs(y - inst.y_nom[j]) / range : 0.0;
                    sc.y_actual[j] = y;
                    sc.z[j] = z;
                    total += z;
                }
                if (total <= G) {
                    ++accepted[g];
                    break;
                }
                if (draws[g] >= opt.max_draws &&
                    static_cast<double>(accepted[g]) < opt.min_acceptance * static_cast<double>(draws[g]))
                    throw Error(ErrorKind::sampling,
                                "budget group " + std::to_string(g) + ": acceptance rate below " +
                                    format_number(opt.min_acceptance) + " after " + std::to_string(draws[g]) +
                                    " draws; use a tighter proposal or a larger budget");
            }
        }
    }
    return out;
}

PrescientResult prescient_solve(const NominalInstance& inst, const Scenario& sc, const SolverOptions& opt) {
    RobustSolution rs = solve_built(build_with_caps(inst, sc.y_actual), opt);
    return {rs.status, rs.objective};
}

double adjustment_cost(const Vec& y_plan, const Vec& y_actual, double penalty) {
    double s = 0.0;
    for (std::size_t j = 0; j < y_plan.size(); ++j) s += std::fabs(y_plan[j] - y_actual[j]);
    return penalty * s;
}

double delta_c(const RobustSolution& day_ahead, const Scenario& sc, double prescient_cost, double penalty) {
    return std::fabs(day_ahead.objective + adjustment_cost(day_ahead.y, sc.y_actual, penalty) - prescient_cost);
}

std::vector<DeltaCReport> simulate(const NominalInstance& inst, const BudgetSpec& budget,
                                   const std::vector<Variant>& approaches, int n, std::uint64_t seed,
                                   const SimulationOptions& opt) {
    auto scenarios = generate_scenarios(inst, budget, n, seed, opt.sampling);
    std::vector<PrescientResult> prescient(n);
    parallel_for(n, opt.jobs, [&](int i) { prescient[i] = prescient_solve(inst, scenarios[i], opt.lp); });

    AdmissibleInterval iv;
    bool have_iv = false;
    std::vector<DeltaCReport> out;
    for (Variant v : approaches) {
        if (v == Variant::effective && !have_iv) {
            iv = stage1_admissible(inst, opt.lp);
            have_iv = true;
        }
        RobustSolution plan = solve_variant(inst, v, budget, opt.lp, have_iv ? &iv : nullptr);
        if (plan.status != Status::optimal)
            throw Error(ErrorKind::solver_stalled,
                        std::string(approach_name(v)) + " day-ahead model is " + to_string(plan.status));
        DeltaCReport rep;
        rep.approach = v;
        rep.adjustment_penalty = opt.penalty;
        rep.delta_c.resize(n);
        double sum = 0.0;
        int used = 0;
        rep.min = kInf;
        rep.max = -kInf;
        for (int i = 0; i < n; ++i) {
            if (prescient[i].status != Status::optimal) {
                rep.delta_c[i] = std::numeric_limits<double>::quiet_NaN();
                ++rep.excluded;
                continue;
            }
            double d = delta_c(plan, scenarios[i], prescient[i].cost, opt.penalty);
            rep.delta_c[i] = d;
            sum += d;
            ++used;
            rep.min = std::min(rep.min, d);
            rep.max = std::max(rep.max, d);
        }
        rep.mean = used ? sum / used : std::numeric_limits<double>::quiet_NaN();
        if (!used) rep.min = rep.max = rep.mean;
        out.push_back(std::move(rep));
    }
    return out;
}

std::vector<SweepRow> sweep_gamma(const NominalInstance& inst, const std::vector<double>& grid,
                                  const std::vector<Variant>& approaches, const SolverOptions& opt, int jobs) {
    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());
    bool need_iv = std::find(approaches.begin(), approaches.end(), Variant::effective) != approaches.end() ||
                   std::find(approaches.begin(), approaches.end(), Variant::admissible) != approaches.end();
    AdmissibleInterval iv;
    if (need_iv) iv = stage1_admissible(inst, opt);
    const int na = static_cast<int>(approaches.size());
    std::vector<SweepRow> rows(sorted.size() * approaches.size());
    parallel_for(static_cast<int>(rows.size()), jobs, [&](int k) {
        double gamma = sorted[k / na];
        Variant v = approaches[k % na];
        BudgetSpec b;
        b.gamma = gamma;
        try {
            RobustSolution s = solve_variant(inst, v, b, opt, need_iv ? &iv : nullptr);
            SweepRow& r = rows[k];
            r.gamma = gamma;
            r.approach = v;
            r.status = s.status;
            r.objective = s.objective;
            for (double y : s.y) r.utilization += y;
            r.gamma_effective = v == Variant::nominal ? 0.0 : s.gamma_effective;
        } catch (const Error& e) {
            throw Error(e.kind(), "gamma " + format_number(gamma) + ", " + approach_name(v) + ": " + e.what());
        }
    });
    return rows;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "gamma,approach,objective,utilization,gamma_effective\n";
    for (const auto& r : rows) {
        out += format_number(r.gamma) + "," + approach_name(r.approach) + ",";
        out += r.status == Status::optimal ? format_number(r.objective) : std::string(to_string(r.status));
        out += "," + format_number(r.utilization) + "," + format_number(r.gamma_effective) + "\n";
    }
    return out;
}

std::string sim_csv(const std::vector<DeltaCReport>& reports) {
    std::string out = "scenario,approach,delta_c\n";
    if (reports.empty()) return out;
    const std::size_t n = reports[0].delta_c.size();
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& r : reports)
            out += std::to_string(i) + "," + approach_name(r.approach) + "," + format_number(r.delta_c[i]) + "\n";
    return out;
}

}  // namespace effbudget
