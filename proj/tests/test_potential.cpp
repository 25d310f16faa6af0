#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "phasespace/harness.hpp"
#include "phasespace/potential.hpp"

using namespace phasespace;

namespace {

// Composite Simpson quadrature; oracle for the sampled-potential moments.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    double h = (b - a) / n, s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

FourierPotential cos_potential(double theta = 1.5) {
    return FourierPotential::cosine(1, {1.0}, 1.0, DecayMeta{theta, 1.0, 1.5});
}

}  // namespace

TEST_CASE("m0 moment: atomic, zero, gaussian") {
    // cos(2 pi x): atoms +-1 with weight 1/2, r=0 -> M0 = 2
    CHECK(m0_moment(cos_potential(), 0).value == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m0_moment(FourierPotential::zero(1), 0).value == 0.0);

    // V(x) = e^{-x^2}: Vhat = sqrt(pi) e^{-pi^2 S^2}; M0 = 1 + 1/(2 pi^2)
    FourierPotential gauss =
        FourierPotential::from_catalog("gaussian", 1.0, 3.5, 8.0, 4096);
    double expect = 1.0 + 1.0 / (2.0 * M_PI * M_PI);
    CHECK(m0_moment(gauss, 0).value == doctest::Approx(expect).epsilon(1e-6));
    // quadrature oracle for the same integral
    double oracle = simpson(
        [](double s) {
            return std::sqrt(M_PI) * std::exp(-M_PI * M_PI * s * s) * (1.0 + s * s);
        },
        -8.0, 8.0, 4096);
    CHECK(m0_moment(gauss, 0).value == doctest::Approx(oracle).epsilon(1e-9));

    // monotone nondecreasing in r
    FourierPotential pl = FourierPotential::from_catalog("powerlaw", 1.0, 4.5, 64.0, 8192);
    double prev = 0.0;
    for (int r = 0; r <= 3; ++r) {
        double v = m0_moment(pl, r).value;
        CHECK(v >= prev);
        prev = v;
    }
    QuadraticPolynomial q;
    q.a1 = {0.0};
    q.a2 = {1.0};
    CHECK_THROWS_AS(m0_moment(FourierPotential::polynomial(1, q), 0),
                    std::invalid_argument);
}

TEST_CASE("divergent moment is a result, not an exception") {
    // theta = 1.5 supports r = 0 only; r = 1 moment diverges.
    FourierPotential pl = FourierPotential::from_catalog("powerlaw", 1.0, 1.5, 64.0, 8192);
    CHECK_FALSE(m0_moment(pl, 0).divergent);
    CHECK(m0_moment(pl, 1).divergent);
}

TEST_CASE("mollifiers") {
    // cos(2 pi x), eta = 0.05 -> weights e^{-0.05}/2
    FourierPotential v1 = mollify_v1(cos_potential(), 0.05);
    CHECK(std::abs(v1.modes()[0].weight) ==
          doctest::Approx(0.5 * std::exp(-0.05)).epsilon(1e-14));
    CHECK(std::abs(v1.modes()[0].weight) == doctest::Approx(0.4756147).epsilon(1e-6));

    // eta = 0 leaves the potential unchanged
    FourierPotential same = mollify_v1(cos_potential(), 0.0);
    CHECK(std::abs(same.modes()[0].weight) == doctest::Approx(0.5));
    CHECK_THROWS_AS(mollify_v1(cos_potential(), -0.1), std::domain_error);

    // V~1 with eps=0.01, sx=sk=1: eta' = 0.0728318... -> weight 0.4648
    auto params = SemiclassicalParams::make(1, 0.01, 1.0, 1.0);
    FourierPotential vt = mollify_vtilde1(cos_potential(), params);
    CHECK(std::abs(vt.modes()[0].weight) ==
          doctest::Approx(0.5 * std::exp(-params.eta_prime)).epsilon(1e-14));
    CHECK(std::abs(vt.modes()[0].weight) == doctest::Approx(0.46488).epsilon(1e-4));

    // multipliers compose: eta1 then eta2 equals eta1+eta2
    FourierPotential a = mollify_v1(mollify_v1(cos_potential(), 0.03), 0.04);
    FourierPotential b = mollify_v1(cos_potential(), 0.07);
    CHECK(std::abs(a.modes()[0].weight - b.modes()[0].weight) < 1e-14);

    // Gaussian density: pointwise closed-form product
    FourierPotential gauss =
        FourierPotential::from_catalog("gaussian", 1.0, 3.5, 8.0, 4096);
    FourierPotential gm = mollify_v1(gauss, 1.0);
    const auto& d = gm.density();
    double worst = 0.0;
    for (int m = 0; m < d.bins; m += 17) {
        double s = d.s_at(m);
        double expect = std::sqrt(M_PI) * std::exp(-(M_PI * M_PI + 1.0) * s * s);
        worst = std::max(worst, std::abs(std::abs(d.vhat[m]) - expect));
    }
    CHECK(worst < 1e-14);

    // realness preserved: Vhat(-S) = conj Vhat(S) for atoms
    CHECK(std::abs(vt.modes()[0].weight - std::conj(vt.modes()[1].weight)) < 1e-15);
}

TEST_CASE("force evaluation") {
    FourierPotential vc = cos_potential();
    CHECK(vc.force({0.0})[0] == doctest::Approx(0.0));
    CHECK(vc.force({0.25})[0] == doctest::Approx(-2.0 * M_PI).epsilon(1e-12));

    QuadraticPolynomial q;
    q.a1 = {0.0};
    q.a2 = {2.0 * M_PI * M_PI};
    FourierPotential vp = FourierPotential::polynomial(1, q);
    CHECK(vp.force({0.5})[0] == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-12));

    // fast evaluator agrees with the direct path (sampled kind included)
    FourierPotential pl = FourierPotential::from_catalog("powerlaw", 1.0, 1.5, 64.0, 8192);
    auto fast = pl.force_evaluator(16.0);
    for (double x : {-3.0, -0.7, 0.0, 0.41, 2.9}) {
        double g = 0.0;
        fast(&x, &g);
        CHECK(g == doctest::Approx(pl.force({x})[0]).epsilon(1e-7));
    }
    CHECK_THROWS_AS(vc.force({std::nan("")}), std::domain_error);
}

TEST_CASE("derivative sup bounds") {
    auto params = SemiclassicalParams::make(1, 0.01, 1.0, 1.0);
    FourierPotential vt = mollify_vtilde1(cos_potential(), params);
    CHECK(derivative_sup_bound(FourierPotential::zero(1), 3, params.eta_prime).value ==
          0.0);
    // (2 pi)^2 e^{-eta'} for the cosine
    double expect = 4.0 * M_PI * M_PI * std::exp(-params.eta_prime);
    CHECK(derivative_sup_bound(vt, 2, params.eta_prime).value ==
          doctest::Approx(expect).epsilon(1e-12));
    CHECK(derivative_sup_bound(vt, 2, params.eta_prime).value ==
          doctest::Approx(36.706).epsilon(1e-3));

    // Gaussian potential, m=3: quadrature oracle
    FourierPotential gauss =
        FourierPotential::from_catalog("gaussian", 1.0, 3.5, 8.0, 8192);
    FourierPotential gm = mollify_vtilde1(gauss, params);
    double oracle =
        std::pow(2.0 * M_PI, 3) *
        simpson(
            [&](double s) {
                return std::sqrt(M_PI) * std::exp(-M_PI * M_PI * s * s) *
                       std::pow(std::abs(s), 3) * std::exp(-params.eta_prime * s * s);
            },
            -8.0, 8.0, 8192);
    CHECK(derivative_sup_bound(gm, 3, params.eta_prime).value ==
          doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("A1'(r) audit") {
    // powerlaw with theta = 3/2 satisfies the decay hypothesis
    FourierPotential pl = FourierPotential::from_catalog("powerlaw", 1.0, 1.5, 64.0, 8192);
    auto params = SemiclassicalParams::make(1, 0.01, 1.0, 1.0);
    AssumptionAudit audit = audit_a1prime(pl, 0, params);
    CHECK(audit.a1prime_holds);
    CHECK(audit.decay_ok);
    CHECK(audit.m0_finite);
    REQUIRE(audit.tail_bound_samples.size() == 1);
    CHECK(audit.tail_bound_samples[0].measured <=
          audit.tail_bound_samples[0].bound * (1.0 + 1e-9));

    // zero potential: trivially holds, tail samples 0
    FourierPotential zero = FourierPotential::zero(1);
    zero.set_decay_meta(DecayMeta{1.5, 1.0, 1.0});
    AssumptionAudit za = audit_a1prime(zero, 0, params);
    CHECK(za.a1prime_holds);
    CHECK(za.tail_bound_samples[0].measured == 0.0);

    // cosine, m=0, eta'=0.057: closed form (1 - e^{-0.057})
    FourierPotential vc = cos_potential();
    double measured = vc.damped_moment(0.057, 1.0);
    CHECK(measured == doctest::Approx(1.0 - std::exp(-0.057)).epsilon(1e-14));
    CHECK(measured == doctest::Approx(0.05540).epsilon(1e-3));

    // missing decay metadata -> inconclusive, not failed
    FourierPotential bare = FourierPotential::cosine(1, {1.0});
    AssumptionAudit ba = audit_a1prime(bare, 0, params);
    CHECK(ba.inconclusive);
    CHECK_FALSE(ba.a1prime_holds);

    // a potential violating its claimed decay gets flagged
    FourierPotential lying =
        FourierPotential::cosine(1, {4.0}, 1.0, DecayMeta{1.5, 1e-6, 1.0});
    AssumptionAudit la = audit_a1prime(lying, 0, params);
    CHECK_FALSE(la.decay_ok);
    CHECK_FALSE(la.a1prime_holds);
}

TEST_CASE("tail bound decays with the predicted rate") {
    // || (1-e^{-eta' S^2}) |S|^{m+1} Vhat ||_L1 -> 0 with slope at least
    // min((theta-m)/2, 1) - 0.1 in epsilon.
    // The crossover scale eta'^{-1/2} must stay inside the S grid, and the
    // eps^{1/4}-type corrections decay slowly, so the rate is read off deep
    // in the asymptotic window on a wide grid.
    FourierPotential pl =
        FourierPotential::from_catalog("powerlaw", 1.0, 1.5, 256.0, 32768);
    const double theta = 1.5;
    const int m = 0;
    std::vector<double> eps_list{1e-4, 3e-5, 1e-5, 3e-6}, vals;
    for (double eps : eps_list) {
        auto p = SemiclassicalParams::make(1, eps, 1.0, 1.0);
        vals.push_back(pl.damped_moment(p.eta_prime, m + 1.0));
    }
    SlopeFit fit = fit_slope(eps_list, vals);
    REQUIRE_FALSE(fit.degenerate);
    CHECK(fit.slope >= std::min((theta - m) / 2.0, 1.0) - 0.1);
}

TEST_CASE("pseudo difference matches direct evaluation") {
    FourierPotential vc = cos_potential();
    for (double x : {-1.2, 0.0, 0.3}) {
        for (double d : {0.0, 0.1, 0.7}) {
            double direct = vc.value({x + d}) - vc.value({x - d});
            CHECK(vc.pseudo_difference({x}, {d}) ==
                  doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("potential config loading") {
    RunConfig cfg = RunConfig::from_json_text(R"({
        "experiment": "cfg-test",
        "potential": {"kind": "cosine", "frequency": [1.0], "amplitude": 1.0,
                      "decay": {"theta": 1.5, "D": 1.0, "R": 1.5}},
        "state": {"type": "mixed_gaussian", "center": [0, 0], "spread": 1.0},
        "epsilon": [0.03125, 0.015625, 0.0078125, 0.00390625],
        "T": 0.5,
        "grid": {"dim": 1, "x_half": 8, "k_half": 8, "nx": 512, "nk": 512}
    })");
    CHECK(cfg.potential.kind() == PotentialKind::atomic);
    CHECK(cfg.potential.modes().size() == 2);
    CHECK(cfg.potential.decay_meta()->theta == 1.5);
    CHECK(cfg.epsilon_list.size() == 4);

    // horizon guard: T too large for the smallest epsilon must be rejected
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({
        "epsilon": [0.5, 0.4, 0.3, 0.25], "T": 30.0
    })"),
                    std::invalid_argument);
}
