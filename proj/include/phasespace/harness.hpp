#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phasespace/field.hpp"
#include "phasespace/liouville.hpp"
#include "phasespace/norms.hpp"
#include "phasespace/potential.hpp"
#include "phasespace/schrodinger.hpp"
#include "phasespace/wigner.hpp"

namespace phasespace {

struct InitialStateSpec {
    enum class Type { coherent, mixed_gaussian, ensemble };
    Type type = Type::mixed_gaussian;
    std::vector<double> x0, k0;      // coherent center
    std::string envelope = "gaussian";
    std::vector<double> center;      // mixed gaussian center (2n entries)
    double spread = 1.0;
    struct EnsembleEntry {
        double weight;
        std::vector<double> x0, k0;
        std::string envelope = "gaussian";
    };
    std::vector<EnsembleEntry> members;
};

struct GridConfig {
    int dim = 1;
    double x_half = 8.0;
    double k_half = 8.0;
    int nx = 512;
    int nk = 512;
    bool auto_size = false;  // refine nx/nk with 1/sqrt(eps) for coherent data

    GridSpec build(double epsilon) const;
};

struct RunConfig {
    std::string experiment = "run";
    FourierPotential potential = FourierPotential::zero(1);
    InitialStateSpec state;
    double sigma_x = 1.0;
    double sigma_k = 1.0;
    std::vector<double> epsilon_list;  // strictly decreasing, >= 4 entries
    double T = 0.5;
    double horizon_c = 0.75;           // guard: T <= c log(1/eps_min)
    bool long_time_mode = false;       // T(eps) = 0.75 log(1/eps), report only
    double dt_factor = 0.02;           // evolution dt = dt_factor * eps
    double flow_dt_frac = 1.0 / 2048;  // flow dt = frac * T (0: auto policy)
    int audit_r = 0;
    int sobolev_neg_order = 3;         // s in the H^{-s} sweep
    int sobolev_pos_order = 1;         // r in the H^{+r} sweep
    GridConfig grid;
    std::uint64_t seed = 20240901;
    std::string out_csv, out_json, snapshot_prefix, flow_cache_dir;

    static RunConfig from_json_file(const std::string& path);
    static RunConfig from_json_text(const std::string& text);
    void validate() const;  // throws on violated invariants

    PhaseSpaceField build_initial_field(const GridSpec& g,
                                        const SemiclassicalParams& params) const;
};

struct SlopeFit {
    double slope = 0.0;
    double residual = 0.0;
    int rows_used = 0;
    bool degenerate = true;
};

/// Log-log least-squares slope; rows at or below the floor are skipped.
SlopeFit fit_slope(const std::vector<double>& eps, const std::vector<double>& err,
                   double floor = 0.0);

struct ConvergenceRow {
    double epsilon = 0.0;
    double T = 0.0;
    std::map<std::string, double> error;
    std::map<std::string, double> bound;  // reference decay curve values
    double floor = 0.0;
    bool excluded = false;
    double wall_s = 0.0;
};

struct ConvergenceTable {
    std::string experiment;
    std::vector<std::string> norms;
    std::vector<ConvergenceRow> rows;
    std::map<std::string, SlopeFit> slopes;
    std::map<std::string, double> floors;     // per norm
    std::map<std::string, bool> slope_in_band;
    std::map<std::string, bool> bound_consistent;
    std::map<std::string, bool> pass;
    std::string notes;

    void finalize(double band_lo = 0.45, double band_hi = 1.3);
    std::string to_csv() const;
    std::string to_json() const;
    void write(const RunConfig& cfg) const;
};

/// Theorem-style sweeps. Each evolves the quantum phase-space equation and
/// the classical transports across the epsilon list and tabulates errors.
ConvergenceTable run_l2_convergence(const RunConfig& cfg);
ConvergenceTable run_negative_sobolev(const RunConfig& cfg);
ConvergenceTable run_positive_sobolev(const RunConfig& cfg);

struct CheckLine {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 1.0;
    bool pass = false;
    std::string note;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckLine> checks;
    bool all_pass = true;
    void add(const std::string& name, double lhs, double rhs, double slack = 1.0,
             const std::string& note = "");
    void info(const std::string& name, double value, const std::string& note = "");
    std::string to_json() const;
    std::string summary() const;
};

/// Conservation and growth inequalities along one evolution at fixed eps.
/// d_override replaces the computed growth constant (suite self-test).
SuiteReport run_regularity_suite(const RunConfig& cfg, double d_override = 0.0);

/// Unsmoothing corollaries, critical-smoothing positivity, pure-state
/// scaling bounds, coherent-state concentration.
SuiteReport run_appendix_suite(const RunConfig& cfg);

/// Young-inequality variants and the Gamma-function inequality.
SuiteReport run_auxiliary_suite(const RunConfig& cfg);

/// Seeded random field with spectrum supported on |mode| <= max_mode.
PhaseSpaceField random_band_limited(const GridSpec& grid, int max_mode,
                                    std::uint64_t seed);

/// Weighted norms used by the eps-scaled regularity estimates.
double partial_norm(const PhaseSpaceField& f, int axis, bool k_axis);  // ||d f||
double coordinate_k_norm(const PhaseSpaceField& f, int axis);          // ||k_i f||

/// Merge CSV bodies produced by ConvergenceTable::to_csv (shared header).
std::string merge_csv(const std::vector<std::string>& paths);

}  // namespace phasespace
