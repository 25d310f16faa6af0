#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "phasespace/harness.hpp"

using namespace phasespace;

namespace {

RunConfig tiny_l2_config() {
    return RunConfig::from_json_text(R"({
        "experiment": "tiny-l2",
        "potential": {"kind": "cosine", "frequency": [1.0], "amplitude": 1.0,
                      "decay": {"theta": 1.5, "D": 1.0, "R": 1.5}},
        "state": {"type": "mixed_gaussian", "center": [0, 0], "spread": 0.7},
        "epsilon": [0.1, 0.05, 0.025, 0.0125],
        "T": 0.2,
        "dt_factor": 0.02,
        "flow_dt_frac": 0.00048828125,
        "grid": {"dim": 1, "x_half": 8, "k_half": 4, "nx": 128, "nk": 128},
        "seed": 99
    })");
}

}  // namespace

TEST_CASE("fit_slope on synthetic data") {
    std::vector<double> eps{1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
    std::vector<double> half, lin;
    for (double e : eps) {
        half.push_back(std::sqrt(e));
        lin.push_back(3.0 * e);
    }
    CHECK(fit_slope(eps, half).slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fit_slope(eps, lin).slope == doctest::Approx(1.0).epsilon(1e-12));

    // seeded multiplicative noise keeps the fit inside [0.45, 0.55]
    std::mt19937_64 rng(1234);
    std::vector<double> noisy;
    for (double e : eps) {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        noisy.push_back(std::sqrt(e) * (1.0 + 0.1 * (2.0 * u - 1.0)));
    }
    SlopeFit fit = fit_slope(eps, noisy);
    CHECK(fit.slope > 0.45);
    CHECK(fit.slope < 0.55);
    CHECK(fit.residual < 0.2);

    // floor exclusion and the degenerate outcome
    std::vector<double> floored{1e-3, 1e-3, 1e-3, 1e-3};
    SlopeFit deg = fit_slope(eps, floored, 1e-3);  // everything at the floor
    CHECK(deg.degenerate);
    std::vector<double> mixed{1e-1, 3e-2, 1e-2, 9e-6};
    SlopeFit part = fit_slope(eps, mixed, 1e-6);  // last row excluded
    CHECK(part.rows_used == 3);
}

TEST_CASE("random fields are seed deterministic") {
    GridSpec g = GridSpec::make_1d(-8, 8, 64, -2, 2, 64);
    PhaseSpaceField a = random_band_limited(g, 5, 42);
    PhaseSpaceField b = random_band_limited(g, 5, 42);
    PhaseSpaceField c = random_band_limited(g, 5, 43);
    CHECK(a.values() == b.values());
    CHECK(a.values() != c.values());
    CHECK(a.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid auto-sizing keeps the pairing invariant") {
    GridConfig gc;
    gc.dim = 1;
    gc.x_half = 4.0;
    gc.k_half = 2.0;
    gc.nx = 512;
    gc.nk = 512;
    gc.auto_size = true;
    for (double eps : {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1e-3}) {
        GridSpec g = gc.build(eps);
        CHECK(g.dx(0) <= std::sqrt(eps) / 6.0 + 1e-12);
        CHECK(is_power_of_two(g.nx()));
        CHECK(is_power_of_two(g.nk()));
    }
    CHECK(gc.build(1.0 / 256).nx() == 1024);
}

TEST_CASE("auxiliary suite: young and gamma inequalities hold") {
    RunConfig cfg = tiny_l2_config();
    SuiteReport report = run_auxiliary_suite(cfg);
    CHECK(report.all_pass);
    for (const auto& c : report.checks)
        if (!c.pass) MESSAGE("failed: ", c.name);
}

TEST_CASE("regularity suite on the free evolution") {
    RunConfig cfg = RunConfig::from_json_text(R"({
        "experiment": "reg-free",
        "potential": {"kind": "zero"},
        "state": {"type": "mixed_gaussian", "center": [0, 0], "spread": 0.7},
        "epsilon": [0.05],
        "T": 0.5,
        "grid": {"dim": 1, "x_half": 8, "k_half": 4, "nx": 256, "nk": 256},
        "seed": 7
    })");
    SuiteReport report = run_regularity_suite(cfg);
    CHECK(report.all_pass);
}

TEST_CASE("regularity suite adversarial self-check") {
    RunConfig cfg = RunConfig::from_json_text(R"({
        "experiment": "reg-adv",
        "potential": {"kind": "cosine", "frequency": [1.0], "amplitude": 1.0,
                      "decay": {"theta": 1.5, "D": 1.0, "R": 1.5}},
        "state": {"type": "mixed_gaussian", "center": [0, 0], "spread": 0.7},
        "epsilon": [0.05],
        "T": 0.5,
        "grid": {"dim": 1, "x_half": 8, "k_half": 4, "nx": 256, "nk": 512},
        "seed": 7
    })");
    SuiteReport base = run_regularity_suite(cfg);
    auto find = [](const SuiteReport& r, const std::string& name) {
        for (const auto& c : r.checks)
            if (c.name == name) return c;
        throw std::runtime_error("check not found: " + name);
    };
    CHECK(find(base, "h1_growth").pass);

    // doubling the growth constant must still pass
    double d1 = growth_constant(1, 1, cfg.potential);
    SuiteReport doubled = run_regularity_suite(cfg, 2.0 * d1);
    CHECK(find(doubled, "h1_growth").pass);

    // halving the constant below the measured growth must fail
    SuiteReport starved = run_regularity_suite(cfg, 1e-4);
    CHECK_FALSE(find(starved, "h1_growth").pass);
}

TEST_CASE("l2 sweep: table shape, bounds, determinism") {
    RunConfig cfg = tiny_l2_config();
    ConvergenceTable t1 = run_l2_convergence(cfg);
    REQUIRE(t1.rows.size() == 4);
    CHECK(t1.norms.size() == 4);
    for (const auto& row : t1.rows) {
        CHECK(row.error.count("L2:rho_vs_wigner"));
        CHECK(row.error.at("L2:rho_vs_wigner") >= 0.0);
        CHECK(std::isfinite(row.error.at("L2:rho_vs_wigner")));
    }
    // reference curve is anchored at the largest epsilon
    CHECK(t1.rows.front().bound.at("L2:rho_vs_wigner") ==
          doctest::Approx(t1.rows.front().error.at("L2:rho_vs_wigner")));

    std::string csv1 = t1.to_csv();
    CHECK(csv1.find("experiment,epsilon,T,norm,error,bound,floor,excluded") == 0);

    ConvergenceTable t2 = run_l2_convergence(cfg);
    CHECK(csv1 == t2.to_csv());  // bit-identical reruns (CSV carries no timings)
    for (const auto& [name, fit] : t1.slopes) {
        CHECK(fit.slope == t2.slopes.at(name).slope);
        CHECK(fit.residual == t2.slopes.at(name).residual);
    }
}

TEST_CASE("config rejection paths") {
    // audit rejection: claimed decay that the modes violate
    RunConfig cfg = tiny_l2_config();
    cfg.potential =
        FourierPotential::cosine(1, {4.0}, 1.0, DecayMeta{1.5, 1e-9, 1.0});
    CHECK_THROWS_AS(run_l2_convergence(cfg), std::invalid_argument);

    // too few epsilons for a slope fit
    RunConfig small = tiny_l2_config();
    small.epsilon_list = {0.1, 0.05, 0.025};
    CHECK_THROWS_AS(run_l2_convergence(small), std::invalid_argument);
}

TEST_CASE("csv merging") {
    std::string p1 = "/tmp/pstest_a.csv", p2 = "/tmp/pstest_b.csv";
    {
        std::ofstream a(p1);
        a << "experiment,epsilon,T,norm,error,bound,floor,excluded\n"
          << "x,0.1,0.5,L2,1,0,0,0\n";
        std::ofstream b(p2);
        b << "experiment,epsilon,T,norm,error,bound,floor,excluded\n"
          << "y,0.2,0.5,L2,2,0,0,0\n";
    }
    std::string merged = merge_csv({p1, p2});
    CHECK(merged ==
          "experiment,epsilon,T,norm,error,bound,floor,excluded\n"
          "x,0.1,0.5,L2,1,0,0,0\n"
          "y,0.2,0.5,L2,2,0,0,0\n");
}

TEST_CASE("ensemble initial state through the config") {
    RunConfig cfg = RunConfig::from_json_text(R"({
        "experiment": "ens",
        "potential": {"kind": "zero"},
        "state": {"type": "ensemble", "members": [
            {"weight": 0.5, "x0": [-1.0], "k0": [0.0]},
            {"weight": 0.5, "x0": [1.0], "k0": [0.0]}]},
        "epsilon": [0.1],
        "T": 0.1,
        "grid": {"dim": 1, "x_half": 8, "k_half": 4, "nx": 256, "nk": 256}
    })");
    auto params = SemiclassicalParams::make(1, 0.1, 1.0, 1.0);
    GridSpec g = cfg.grid.build(0.1);
    PhaseSpaceField w = cfg.build_initial_field(g, params);
    CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-8));
}
