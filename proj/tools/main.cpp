#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "phasespace/fft.hpp"
#include "phasespace/harness.hpp"

using namespace phasespace;

namespace {

int cmd_audit(const std::string& config_path, int r, double epsilon) {
    RunConfig cfg = RunConfig::from_json_file(config_path);
    double eps = epsilon > 0.0 ? epsilon : cfg.epsilon_list.front();
    auto params = SemiclassicalParams::make(cfg.grid.dim, eps, cfg.sigma_x,
                                            cfg.sigma_k);
    AssumptionAudit audit = audit_a1prime(cfg.potential, r, params);
    std::cout << "potential audit (r=" << r << ", eps=" << eps << ")\n"
              << "  M0 = " << audit.M0 << (audit.m0_finite ? "" : " (divergent)")
              << "\n"
              << "  decay check: " << (audit.decay_ok ? "ok" : "violated") << "\n"
              << "  A1'(r) holds: " << (audit.a1prime_holds ? "yes" : "no")
              << (audit.inconclusive ? " (inconclusive: no decay metadata)" : "")
              << "\n";
    for (const auto& ts : audit.tail_bound_samples)
        std::cout << "  tail m=" << ts.m << ": measured " << ts.measured
                  << " <= bound " << ts.bound << " (C=" << ts.c_audited << ")\n";
    if (!audit.detail.empty()) std::cout << "  " << audit.detail << "\n";
    return audit.a1prime_holds || audit.inconclusive ? 0 : 1;
}

int cmd_evolve(const std::string& config_path, const std::string& what,
               const std::string& out_prefix, int snapshots) {
    RunConfig cfg = RunConfig::from_json_file(config_path);
    double eps = cfg.epsilon_list.front();
    auto params = SemiclassicalParams::make(cfg.grid.dim, eps, cfg.sigma_x,
                                            cfg.sigma_k);
    GridSpec g = cfg.grid.build(eps);
    PhaseSpaceField w = cfg.build_initial_field(g, params);
    double dt = cfg.dt_factor * eps;
    std::string prefix = out_prefix.empty() ? cfg.snapshot_prefix : out_prefix;
    if (prefix.empty()) prefix = "snapshot";
    std::string csv = prefix + "_summary.csv";
    {
        std::ofstream trunc(csv);  // fresh summary file
    }
    append_summary_csv(w, csv, eps, 0.0, true);
    write_snapshot(w, prefix + "_0000.bin", eps, 0.0);
    FlowOptions fopts;
    fopts.dt = cfg.flow_dt_frac > 0.0 ? cfg.flow_dt_frac * cfg.T : 0.0;
    for (int s = 1; s <= snapshots; ++s) {
        double chunk = cfg.T / snapshots;
        double t = chunk * s;
        if (what == "wigner")
            w = evolve_wigner(w, cfg.potential, params, chunk, dt);
        else if (what == "swt")
            w = s == 1 ? evolve_swt(w, cfg.potential, params, chunk, dt)
                       : evolve_wigner(w, cfg.potential, params, chunk, dt);
        else if (what == "liouville")
            w = solve_liouville(w, cfg.potential, chunk, fopts);
        else
            throw std::invalid_argument("evolve: unknown target " + what);
        char name[512];
        std::snprintf(name, sizeof name, "%s_%04d.bin", prefix.c_str(), s);
        write_snapshot(w, name, eps, t);
        append_summary_csv(w, csv, eps, t, false);
    }
    std::cout << "wrote " << snapshots + 1 << " snapshots under " << prefix
              << "*\n";
    return 0;
}

int cmd_converge(const std::string& config_path, const std::string& theorem) {
    RunConfig cfg = RunConfig::from_json_file(config_path);
    ConvergenceTable table;
    if (theorem == "l2")
        table = run_l2_convergence(cfg);
    else if (theorem == "hneg")
        table = run_negative_sobolev(cfg);
    else if (theorem == "hpos")
        table = run_positive_sobolev(cfg);
    else
        throw std::invalid_argument("converge: unknown theorem " + theorem);
    bool all = true;
    for (const auto& name : table.norms) {
        const auto& fit = table.slopes.at(name);
        bool ok = table.pass.at(name);
        all = all && ok;
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << table.experiment << "/" << name
                  << "  slope=" << fit.slope << " residual=" << fit.residual
                  << " rows=" << fit.rows_used << "\n";
    }
    if (cfg.out_csv.empty()) std::cout << table.to_csv();
    return all ? 0 : 1;
}

int cmd_suite(const std::string& config_path, const std::string& which) {
    RunConfig cfg = RunConfig::from_json_file(config_path);
    bool all = true;
    auto emit = [&](const SuiteReport& r) {
        std::cout << r.summary();
        all = all && r.all_pass;
        if (!cfg.out_json.empty()) {
            std::ofstream os(cfg.out_json, std::ios::app);
            os << r.to_json() << "\n";
        }
    };
    if (which == "regularity" || which == "all") emit(run_regularity_suite(cfg));
    if (which == "appendix" || which == "all") emit(run_appendix_suite(cfg));
    if (which == "auxiliary" || which == "all") emit(run_auxiliary_suite(cfg));
    return all ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
    std::string merged = merge_csv(inputs);
    if (out.empty()) {
        std::cout << merged;
    } else {
        std::ofstream os(out);
        os << merged;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-space semiclassical toolkit: Wigner/Husimi transforms, "
                 "spectral quantum evolution, Liouville transport, and "
                 "convergence-rate experiments"};
    app.require_subcommand(1);
    spectral::init_threads(2);

    std::string config, what = "wigner", theorem = "l2", which = "all";
    std::string out_prefix, out;
    std::vector<std::string> inputs;
    int r = 0, snapshots = 10;
    double epsilon = 0.0;

    auto* audit = app.add_subcommand("audit", "Potential assumption report");
    audit->add_option("--config", config)->required();
    audit->add_option("--r", r, "moment order");
    audit->add_option("--epsilon", epsilon, "override the config epsilon");

    auto* evolve = app.add_subcommand("evolve", "Single run with snapshot dumps");
    evolve->add_option("--config", config)->required();
    evolve->add_option("--what", what, "wigner | swt | liouville");
    evolve->add_option("--out-prefix", out_prefix);
    evolve->add_option("--snapshots", snapshots);

    auto* converge = app.add_subcommand("converge", "Theorem sweeps");
    converge->add_option("--config", config)->required();
    converge->add_option("--theorem", theorem, "l2 | hneg | hpos");

    auto* suite = app.add_subcommand("suite", "Property suites");
    suite->add_option("--config", config)->required();
    suite->add_option("--which", which, "regularity | appendix | auxiliary | all");

    auto* report = app.add_subcommand("report", "Merge sweep CSVs");
    report->add_option("inputs", inputs)->required();
    report->add_option("--out", out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(audit)) return cmd_audit(config, r, epsilon);
        if (app.got_subcommand(evolve))
            return cmd_evolve(config, what, out_prefix, snapshots);
        if (app.got_subcommand(converge)) return cmd_converge(config, theorem);
        if (app.got_subcommand(suite)) return cmd_suite(config, which);
        if (app.got_subcommand(report)) return cmd_report(inputs, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
