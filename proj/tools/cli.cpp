#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "effbudget/apps.hpp"
#include "effbudget/effective.hpp"
#include "effbudget/ellipsoid.hpp"
#include "effbudget/error.hpp"
#include "effbudget/sim.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace effbudget::cli {

namespace {

struct Config {
    std::string command;
    std::string instance;
    std::string kind;
    std::vector<std::string> variants;
    std::string gamma;
    int scenarios = 0;
    std::int64_t seed = -1;
    int jobs = 1;
    std::string out = ".";
    double tol_feas = 1e-7;
    double tol_obj = 1e-6;
    double penalty = 50.0;
};

class Usage : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-optimal solver status on a model that should have an optimum.
class SolverFailure : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty() || !std::isfinite(v)) throw Usage(what + ": '" + s + "' is not a number");
    return v;
}

// start:stop:step, inclusive of stop up to rounding.
std::vector<double> parse_grid(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() == 1) return {parse_double(parts[0], "--gamma")};
    if (parts.size() != 3) throw Usage("--gamma: expected a number or start:stop:step, got '" + s + "'");
    double a = parse_double(parts[0], "--gamma start"), b = parse_double(parts[1], "--gamma stop"),
           h = parse_double(parts[2], "--gamma step");
    if (h <= 0.0) throw Usage("--gamma: step must be positive");
    if (b < a) throw Usage("--gamma: stop is below start");
    std::vector<double> grid;
    for (long k = 0;; ++k) {
        double v = a + static_cast<double>(k) * h;
        if (v > b + 1e-9 * std::max(1.0, std::fabs(b))) break;
        grid.push_back(std::round(v * 1e12) / 1e12);
    }
    return grid;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::validation, "cannot write " + path.string());
    os << text;
    if (!os) throw Error(ErrorKind::validation, "write failed: " + path.string());
}

std::vector<Variant> variants_of(const Config& c, std::vector<std::string> fallback) {
    const auto& names = c.variants.empty() ? fallback : c.variants;
    std::vector<Variant> out;
    for (const auto& n : names) out.push_back(parse_variant(n));
    return out;
}

BudgetSpec budget_of(const Config& c, const LoadedInstance& li) {
    if (c.gamma.empty()) return li.default_budget;
    auto grid = parse_grid(c.gamma);
    if (grid.size() != 1) throw Usage("--gamma: " + c.command + " takes a single value");
    BudgetSpec b;
    b.gamma = grid[0];
    return b;
}

struct Run {
    Config cfg;
    LoadedInstance li;
    SolverOptions opt;
    fs::path out;
    ordered_json summary;
    std::vector<std::string> outputs;

    void emit(const std::string& file, const std::string& text) {
        write_file(out / file, text);
        outputs.push_back(file);
        spdlog::info("wrote {}", (out / file).string());
    }
};

std::string solution_csv(const NominalInstance& inst, const RobustSolution& s) {
    std::string out = "block,index,name,value\n";
    auto add = [&](const char* block, const Vec& v, const std::vector<std::string>* names) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::string name = names && i < names->size() ? (*names)[i] : "";
            out += std::string(block) + "," + std::to_string(i) + "," + name + "," + format_number(v[i]) + "\n";
        }
    };
    add("x", s.x, &inst.x_names);
    add("y", s.y, &inst.y_names);
    add("deviation", s.deviations, &inst.y_names);
    return out;
}

void require_optimal(const RobustSolution& s, const std::string& what) {
    if (s.status != Status::optimal)
        throw SolverFailure(what + " model is " + to_string(s.status));
}

void cmd_solve(Run& r) {
    const auto& names = r.cfg.variants;
    if (names.size() > 1) throw Usage("solve takes a single --variant");
    std::string vname = names.empty() ? "effective" : names[0];
    RobustSolution s;
    if (vname == "ellipsoid") {
        if (!r.li.ellipsoid) throw Error(ErrorKind::validation, "instance has no ellipsoid block");
        BudgetedEllipsoid ell = *r.li.ellipsoid;
        if (!r.cfg.gamma.empty()) ell.gamma = parse_double(r.cfg.gamma, "--gamma");
        EllipsoidOptions eo;
        eo.lp = r.opt;
        auto pipe = solve_ellipsoid(r.li.nominal, ell, eo);
        s = pipe.result.solution;
        r.summary["gamma"] = ell.gamma;
        r.summary["cuts"] = pipe.result.cuts;
    } else {
        Variant v = parse_variant(vname);
        vname = to_string(v);
        BudgetSpec b = budget_of(r.cfg, r.li);
        s = solve_variant(r.li.nominal, v, b, r.opt);
        if (b.per_group.empty())
            r.summary["gamma"] = b.gamma;
        else
            r.summary["gamma"] = b.per_group;
    }
    require_optimal(s, vname);
    std::cout << "instance " << r.li.name << " (" << to_string(r.li.kind) << ")\n";
    std::cout << "variant " << vname << "\n";
    std::cout << "status " << to_string(s.status) << "\n";
    std::cout << "objective " << format_number(s.objective) << "\n";
    std::cout << "worst_case_term " << format_number(s.worst_case_term) << "\n";
    if (vname == "effective") std::cout << "gamma_effective " << format_number(s.gamma_effective) << "\n";
    double util = 0.0;
    for (double y : s.y) util += y;
    std::cout << "utilization " << format_number(util) << "\n";
    r.emit("solution.csv", solution_csv(r.li.nominal, s));
    r.summary["variant"] = vname;
    r.summary["result"] = {{"status", to_string(s.status)},
                           {"objective", s.objective},
                           {"worst_case_term", s.worst_case_term},
                           {"gamma_effective", s.gamma_effective},
                           {"utilization", util},
                           {"iterations", s.iterations},
                           {"nodes", s.nodes}};
}

void cmd_stage1(Run& r) {
    BudgetSpec b = budget_of(r.cfg, r.li);
    AdmissibleInterval iv = stage1_admissible(r.li.nominal, r.opt);
    EffectiveParams params = effective_params(iv, r.li.nominal, b);
    std::string csv = stage1_csv(r.li.nominal, iv, params);
    std::cout << csv;
    r.emit("stage1.csv", csv);
    r.summary["result"] = {{"stage1_objective", iv.stage1_objective},
                           {"gamma_effective", params.gamma_effective},
                           {"cases", std::string(iv.cases.begin(), iv.cases.end())}};
}

void cmd_classify(Run& r) {
    AdmissibleInterval iv;
    std::string csv;
    if (r.li.ellipsoid) {
        // The ellipsoid box replaces the interval bounds before Stage I.
        const BudgetedEllipsoid& ell = *r.li.ellipsoid;
        NominalInstance inst = r.li.nominal;
        auto [lo, up] = bounding_box(ell);
        for (int j = 0; j < inst.m(); ++j) {
            inst.y_low[j] = std::max(0.0, lo[j]);
            inst.y_up[j] = up[j];
            if (lo[j] < 0.0) inst.non_centered = true;
        }
        iv = stage1_admissible(inst, r.opt);
        auto cases = classify_ellipsoid(ell, iv, inst.y_low, r.opt.tol.cls);
        Vec a = axis_intercepts(ell);
        csv = "j,y_low,y_nom,y_up,intercept,s_low,s_up,case\n";
        for (int j = 0; j < inst.m(); ++j)
            csv += std::to_string(j) + "," + format_number(inst.y_low[j]) + "," + format_number(inst.y_nom[j]) + "," +
                   format_number(inst.y_up[j]) + "," + format_number(a[j]) + "," + format_number(iv.s_low[j]) + "," +
                   format_number(iv.s_up[j]) + "," + std::to_string(cases[j]) + "\n";
        r.summary["set"] = "ellipsoid";
    } else {
        const NominalInstance& inst = r.li.nominal;
        iv = stage1_admissible(inst, r.opt);
        csv = "j,y_low,y_nom,y_up,s_low,s_up,case\n";
        for (int j = 0; j < inst.m(); ++j)
            csv += std::to_string(j) + "," + format_number(inst.y_low[j]) + "," + format_number(inst.y_nom[j]) + "," +
                   format_number(inst.y_up[j]) + "," + format_number(iv.s_low[j]) + "," +
                   format_number(iv.s_up[j]) + "," + std::string(1, iv.cases[j]) + "\n";
        r.summary["set"] = "interval";
    }
    std::cout << csv;
    r.emit("classify.csv", csv);
}

void cmd_sweep(Run& r) {
    if (r.cfg.gamma.empty()) throw Usage("sweep requires --gamma start:stop:step");
    auto grid = parse_grid(r.cfg.gamma);
    auto approaches = variants_of(r.cfg, {"conventional", "effective"});
    auto rows = sweep_gamma(r.li.nominal, grid, approaches, r.opt, r.cfg.jobs);
    for (const auto& row : rows)
        if (row.status != Status::optimal)
            throw SolverFailure("gamma " + format_number(row.gamma) + ", " + to_string(row.approach) +
                                ": model is " + to_string(row.status));
    std::string csv = sweep_csv(rows);
    r.emit("sweep.csv", csv);
    std::cout << csv;
    r.summary["gamma_grid"] = grid;
    ordered_json vs = ordered_json::array();
    for (Variant v : approaches) vs.push_back(to_string(v));
    r.summary["variants"] = vs;
    r.summary["result"] = {{"rows", rows.size()}};
}

void cmd_simulate(Run& r) {
    if (r.cfg.scenarios < 1) throw Usage("simulate requires --scenarios n with n >= 1");
    if (r.cfg.seed < 0) throw Usage("simulate requires --seed");
    BudgetSpec b = budget_of(r.cfg, r.li);
    auto approaches = variants_of(r.cfg, {"nominal", "conventional", "effective"});
    SimulationOptions so;
    so.lp = r.opt;
    so.penalty = r.cfg.penalty;
    so.jobs = r.cfg.jobs;
    auto reps = simulate(r.li.nominal, b, approaches, r.cfg.scenarios, static_cast<std::uint64_t>(r.cfg.seed), so);
    r.emit("sim.csv", sim_csv(reps));
    ordered_json res = ordered_json::object();
    for (const auto& rep : reps) {
        std::string name = rep.approach == Variant::nominal ? "deterministic" : to_string(rep.approach);
        std::cout << name << " mean " << format_number(rep.mean) << " min " << format_number(rep.min) << " max "
                  << format_number(rep.max) << " excluded " << rep.excluded << "\n";
        res[name] = {{"mean", rep.mean}, {"min", rep.min}, {"max", rep.max}, {"excluded", rep.excluded}};
    }
    r.summary["gamma"] = b.per_group.empty() ? ordered_json(b.gamma) : ordered_json(b.per_group);
    r.summary["scenarios"] = r.cfg.scenarios;
    r.summary["penalty"] = r.cfg.penalty;
    r.summary["result"] = res;
}

void cmd_export(Run& r) {
    const auto& names = r.cfg.variants;
    if (names.size() > 1) throw Usage("export-lp takes a single --variant");
    Variant v = parse_variant(names.empty() ? "conventional" : names[0]);
    BuiltModel bm = build_variant(r.li.nominal, v, budget_of(r.cfg, r.li), r.opt);
    std::ostringstream os;
    write_mps(os, bm.mp);
    r.emit("model.mps", os.str());
    r.summary["variant"] = to_string(v);
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("effbudget");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* lvl = std::getenv("EFFBUDGET_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

}  // namespace

int run(int argc, char** argv) {
    if (!spdlog::get("effbudget")) setup_logging();

    Config c;
    CLI::App app{"Robust optimization with effective budgets of uncertainty"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    auto common = [&](CLI::App* sub, bool variant_list) {
        sub->add_option("--instance", c.instance, "Instance file or bundled name")->required();
        sub->add_option("--kind", c.kind, "generic|sced|patient|inventory");
        sub->add_option(variant_list ? "--variants,--variant" : "--variant", c.variants,
                        "nominal|conventional|full|effective|admissible")
            ->delimiter(',');
        sub->add_option("--gamma", c.gamma, "Budget, or start:stop:step for sweeps");
        sub->add_option("--out", c.out, "Output directory");
        sub->add_option("--tol-feas", c.tol_feas, "Feasibility tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--tol-obj", c.tol_obj, "Relative objective tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    };
    auto* solve = app.add_subcommand("solve", "Solve one variant");
    common(solve, false);
    auto* stage1 = app.add_subcommand("stage1", "Admissible interval and per-coordinate classification");
    common(stage1, false);
    auto* sweep = app.add_subcommand("sweep", "Objective over a budget grid");
    common(sweep, true);
    auto* sim = app.add_subcommand("simulate", "Cost deviation against prescient solutions");
    common(sim, true);
    sim->add_option("--scenarios", c.scenarios, "Scenario count");
    sim->add_option("--seed", c.seed, "Base seed")->check(CLI::NonNegativeNumber);
    sim->add_option("--penalty", c.penalty, "Adjustment cost per unit of mismatch")->check(CLI::NonNegativeNumber);
    auto* classify = app.add_subcommand("classify", "Classify coordinates of the uncertainty set");
    common(classify, false);
    auto* exp = app.add_subcommand("export-lp", "Write the model in MPS format");
    common(exp, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << one_line(e.what()) << "\n";
        return 1;
    }
    c.command = app.get_subcommands().front()->get_name();

    auto t0 = std::chrono::steady_clock::now();
    try {
        Run r;
        r.cfg = c;
        std::optional<AppKind> kind;
        if (!c.kind.empty()) kind = parse_kind(c.kind);
        r.li = load_instance(c.instance, kind);
        r.opt.tol.feas = c.tol_feas;
        r.opt.tol.obj_rel = c.tol_obj;
        r.out = c.out;
        std::error_code ec;
        fs::create_directories(r.out, ec);
        if (ec) throw Error(ErrorKind::validation, "cannot create " + r.out.string() + ": " + ec.message());
        spdlog::info("loaded {} ({}), m={}, p={}, n={}", r.li.name, to_string(r.li.kind), r.li.nominal.m(),
                     r.li.nominal.p(), r.li.nominal.n());

        r.summary["command"] = c.command;
        r.summary["instance"] = {{"name", r.li.name},
                                 {"path", r.li.source_path},
                                 {"kind", to_string(r.li.kind)},
                                 {"hash", r.li.content_hash}};
        if (c.command == "simulate") r.summary["seed"] = c.seed;
        r.summary["tolerances"] = {{"feas", c.tol_feas}, {"obj", c.tol_obj}};
        r.summary["jobs"] = c.jobs;

        if (c.command == "solve")
            cmd_solve(r);
        else if (c.command == "stage1")
            cmd_stage1(r);
        else if (c.command == "classify")
            cmd_classify(r);
        else if (c.command == "sweep")
            cmd_sweep(r);
        else if (c.command == "simulate")
            cmd_simulate(r);
        else
            cmd_export(r);

        r.summary["outputs"] = r.outputs;
        r.summary["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_file(r.out / "summary.json", r.summary.dump(2) + "\n");
        return 0;
    } catch (const Usage& e) {
        std::cerr << "error: usage: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const SolverFailure& e) {
        std::cerr << "error: solver: " << one_line(e.what()) << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << "\n";
        return is_solver_error(e.kind()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << one_line(e.what()) << "\n";
        return 2;
    }
}

}  // namespace effbudget::cli
