#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "effbudget/effective.hpp"
#include "effbudget/ellipsoid.hpp"
#include "effbudget/robust.hpp"

namespace effbudget {

struct Generator {
    std::string name;
    int bus = 0;
    double cost = 0.0;
    double pmin = 0.0, pmax = 0.0;
    double ramp_up = kInf, ramp_down = kInf;
};

struct WindFarm {
    std::string name;
    int bus = 0;
    double sigma = 0.0;
    Vec nominal, low, up;  // per period
};

struct Line {
    std::string name;
    double fmin = -kInf, fmax = kInf;
    Vec sensitivity;  // per bus
};

struct ScedInstance {
    int periods = 0;
    int buses = 1;
    double dt = 1.0;
    std::vector<Generator> generators;
    std::vector<WindFarm> farms;
    std::vector<Line> lines;
    std::vector<Vec> load;  // [bus][period]
    Vec reserve_up, reserve_down;  // per period
    double gamma = 0.0;            // default per-period budget

    std::vector<std::string> violations() const;
};

// x = (p[g,t], r+[g,t], r-[g,t]) generator-major; y = pW[k,t] farm-major;
// one budget group per period.
// Counts: p = 3GT, m = KT, equalities T (power balance), <= rows
//   T * (finite line sides) + 2T (reserves) + 2GT (limits) + (T-1) * (finite ramps).
NominalInstance sced_nominal(const ScedInstance& s);

struct PatientInstance {
    int P = 1, T = 1, K = 1;
    Vec service_time;            // s_p
    Vec theta;                   // capacity cost per segment, K entries
    Vec L;                       // segment limits, at least K entries
    std::vector<Vec> penalty;    // g[t][p]
    std::vector<Vec> d_nom, d_up, d_low;  // [t][p]
    Vec gamma;                   // per priority

    std::vector<std::string> violations() const;
};

// x = (x[t,n,p], c[i,t], q[i,t]); y = patients of cohort (t,p) served within
// the horizon; one budget group per priority.
// Counts: p = P T(T+1)/2 + 2KT, m = PT, <= rows T + PT + 2(K-2)T (K >= 3).
NominalInstance patient_nominal(const PatientInstance& pi);

struct InventoryInstance {
    int tau = 1;
    double I_initial = 0.0, I_final = 0.0;
    double gamma = 0.0;
    Vec c_purchase, c_fixed, c_shortage, c_holding, u_max, I_min, I_max;
    Vec w_nom, w_up, w_low;

    std::vector<std::string> violations() const;
};

// x = (u[k], v[k], I+[k], I-[k]) with k = 1..tau for u, v and 1..tau+1 for I;
// y = demand served per period; holding cost on I+ at the end of each period.
// Counts: p = 2 tau + 2(tau+1), m = tau, equalities tau + 2,
//   <= rows tau + 2 * |I_min|.
NominalInstance inventory_nominal(const InventoryInstance& ii);

enum class AppKind { generic, sced, patient, inventory };
const char* to_string(AppKind k);
AppKind parse_kind(const std::string& s);

struct LoadedInstance {
    AppKind kind = AppKind::generic;
    std::string name;
    std::string source_path;
    std::string content_hash;  // FNV-1a of the file bytes, hex
    NominalInstance nominal;
    BudgetSpec default_budget;
    std::optional<ScedInstance> sced;
    std::optional<PatientInstance> patient;
    std::optional<InventoryInstance> inventory;
    std::optional<BudgetedEllipsoid> ellipsoid;
};

// Resolves a path or a bundled instance name (e.g. "patient_table2").
std::filesystem::path resolve_instance(const std::string& name_or_path);
std::filesystem::path data_dir();

// Throws Error(parse) with line/column, or Error(validation) listing every
// violated invariant.
LoadedInstance load_instance(const std::string& name_or_path, std::optional<AppKind> kind = std::nullopt);
LoadedInstance load_instance_text(const std::string& text, const std::filesystem::path& base_dir,
                                  std::optional<AppKind> kind = std::nullopt);

// Model for a variant; the effective variant runs Stage I first.
BuiltModel build_variant(const NominalInstance& inst, Variant v, const BudgetSpec& budget,
                         const SolverOptions& opt = {});
BuiltModel build_sced(const ScedInstance& s, Variant v, const BudgetSpec& budget, const SolverOptions& opt = {});
BuiltModel build_patient(const PatientInstance& pi, Variant v, const BudgetSpec& budget,
                         const SolverOptions& opt = {});
BuiltModel build_inventory(const InventoryInstance& ii, Variant v, const BudgetSpec& budget,
                           const SolverOptions& opt = {});

// Solves any variant; for the effective variant the Stage-I interval may be
// passed in to avoid recomputation.
RobustSolution solve_variant(const NominalInstance& inst, Variant v, const BudgetSpec& budget,
                             const SolverOptions& opt = {}, const AdmissibleInterval* interval = nullptr);

Variant parse_variant(const std::string& s);

}  // namespace effbudget
