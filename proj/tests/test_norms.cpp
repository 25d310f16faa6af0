#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "phasespace/harness.hpp"
#include "phasespace/norms.hpp"
#include "phasespace/schrodinger.hpp"

using namespace phasespace;

namespace {

GridSpec unit_grid(int n = 256) {
    return GridSpec::make_1d(-8, 8, n, -8, 8, n);
}

PhaseSpaceField unit_gaussian(const GridSpec& g) {
    return gaussian_mixed_state(g, {0.0, 0.0}, 1.0, 1e-3);
}

}  // namespace

TEST_CASE("l2 of the unit-mass phase-space gaussian") {
    // closed form: || (2 pi)^{-1} e^{-(x^2+k^2)/2} ||_L2 = (4 pi)^{-1/2}
    PhaseSpaceField w = unit_gaussian(unit_grid(512));
    CHECK(norm(w, NormKind::l2()) ==
          doctest::Approx(1.0 / std::sqrt(4.0 * M_PI)).epsilon(1e-10));
    CHECK(norm(w, NormKind::l2()) == doctest::Approx(0.28209).epsilon(1e-4));
    CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.value(0) < 1e-13);  // corner decay
}

TEST_CASE("sobolev(0) equals l2 and homogeneity") {
    GridSpec g = unit_grid();
    for (std::uint64_t seed : {5u, 6u}) {
        PhaseSpaceField f = random_band_limited(g, 9, seed);
        CHECK(norm(f, NormKind::sobolev(0)) ==
              doctest::Approx(norm(f, NormKind::l2())).epsilon(1e-12));
        CHECK(norm(f, NormKind::xmp(0.0, 2.0)) ==
              doctest::Approx(norm(f, NormKind::l2())).epsilon(1e-12));
        std::vector<double> scaled = f.values();
        for (auto& v : scaled) v *= -3.7;
        PhaseSpaceField fs(g, std::move(scaled));
        for (auto kind : {NormKind::sobolev(2), NormKind::sobolev(-2),
                          NormKind::xmp(1.0, 4.0)})
            CHECK(norm(fs, kind) == doctest::Approx(3.7 * norm(f, kind)).epsilon(1e-12));
    }
}

TEST_CASE("gaussian sobolev norms against closed forms") {
    // W = (2 pi)^{-1} e^{-(x^2+k^2)/2}: What = e^{-2 pi^2 (X^2+K^2)}.
    // ||dx W|| = 2 pi ||X What|| with ||X What|| = (32 pi^3)^{-1/2}.
    GridSpec g = unit_grid(512);
    PhaseSpaceField w = unit_gaussian(g);
    double x_moment = std::sqrt(1.0 / (32.0 * M_PI * M_PI * M_PI));
    CHECK(partial_norm(w, 0, false) ==
          doctest::Approx(2.0 * M_PI * x_moment).epsilon(1e-10));
    CHECK(partial_norm(w, 0, true) ==
          doctest::Approx(2.0 * M_PI * x_moment).epsilon(1e-10));
    double h1 = norm(w, NormKind::sobolev(1));
    double expect = norm(w, NormKind::l2()) + 2.0 * 2.0 * M_PI * x_moment;
    CHECK(h1 == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("growth constant") {
    FourierPotential zero = FourierPotential::zero(1);
    CHECK(growth_constant(1, 1, zero) == doctest::Approx(M_PI));
    FourierPotential vc = FourierPotential::cosine(1, {1.0});
    CHECK(growth_constant(1, 1, vc) == doctest::Approx(M_PI));  // moment = 1
    // m=2, n=1: (1 + 1^3 2!) pi max{1, ||Vhat(|S|+|S|^3)||} = 3 pi * 2
    CHECK(growth_constant(2, 1, vc) == doctest::Approx(6.0 * M_PI).epsilon(1e-12));
    FourierPotential pl = FourierPotential::from_catalog("powerlaw", 1.0, 1.5, 64.0, 8192);
    CHECK(std::isinf(growth_constant(2, 1, pl)));  // |S|^3 moment diverges
}

TEST_CASE("relative error") {
    GridSpec g = unit_grid();
    PhaseSpaceField a = random_band_limited(g, 7, 9);
    PhaseSpaceField zero(g);
    CHECK(relative_error(a, a, NormKind::l2(), a) == 0.0);
    CHECK(relative_error(a, zero, NormKind::l2(), a) == doctest::Approx(1.0));
    CHECK_THROWS_AS(relative_error(a, a, NormKind::l2(), zero), std::domain_error);
}

TEST_CASE("negative sobolev of a grid delta under refinement") {
    // 2m > n: H^{-m} of the spike stays tame under refinement; the L2 norm
    // doubles with each refinement (clear divergence).
    double prev_l2 = 0.0, prev_h1 = 0.0, prev_h2 = 0.0;
    std::vector<double> l2r, h1r, h2r;
    for (int n : {128, 256, 512}) {
        GridSpec g = GridSpec::make_1d(-8, 8, n, -4, 4, n);
        std::vector<double> vals(g.size(), 0.0);
        std::size_t center = (static_cast<std::size_t>(n / 2) * n) + n / 2;
        vals[center] = 1.0 / g.cell_volume();  // unit-mass spike
        PhaseSpaceField spike(g, std::move(vals));
        double l2 = norm(spike, NormKind::l2());
        double h1 = norm(spike, NormKind::sobolev(-1));
        double h2 = norm(spike, NormKind::sobolev(-2));
        if (prev_l2 > 0.0) {
            l2r.push_back(l2 / prev_l2);
            h1r.push_back(h1 / prev_h1);
            h2r.push_back(h2 / prev_h2);
        }
        prev_l2 = l2;
        prev_h1 = h1;
        prev_h2 = h2;
    }
    CHECK(l2r.back() > 1.8);   // diverges like the refinement factor
    CHECK(h1r.back() < 1.2);   // at most the logarithmic edge growth
    CHECK(h1r.back() < h1r.front());
    CHECK(h2r.back() < 1.01);  // converged
}

TEST_CASE("positive sobolev definitions stay within a stable equivalence band") {
    // derivative-sum vs single-weight norms agree up to fixed constants;
    // the per-field ratio is grid-independent for band-limited data.
    GridSpec coarse = GridSpec::make_1d(-8, 8, 128, -4, 4, 128);
    GridSpec fine = GridSpec::make_1d(-8, 8, 256, -4, 4, 256);
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        PhaseSpaceField fc = random_band_limited(coarse, 9, seed);
        PhaseSpaceField ff = random_band_limited(fine, 9, seed);
        auto weight_norm = [](const PhaseSpaceField& f) {
            // || (1+|Z|^2)^{1/2} fhat ||
            double a = norm(f, NormKind::l2());
            double b = norm(f, NormKind::xmp(1.0, 2.0));
            return std::sqrt(a * a + b * b);
        };
        double rc = norm(fc, NormKind::sobolev(1)) / weight_norm(fc);
        double rf = norm(ff, NormKind::sobolev(1)) / weight_norm(ff);
        CHECK(rc >= 1.0);
        CHECK(rc <= 2.0 * M_PI * std::sqrt(3.0));
        CHECK(rc == doctest::Approx(rf).epsilon(1e-2));  // stable to 1%
    }
}

TEST_CASE("young convolution checks") {
    GridSpec g(1, {-8.0}, {8.0}, 128, {-4.0}, {4.0}, 128);
    PhaseSpaceField f = random_band_limited(g, 8, 31);

    // discrete delta at 0: convolution is the identity
    {
        std::vector<spectral::cplx> d(1, spectral::cplx(1.0, 0.0));
        double ds = 1.0;
        double dorigin = -0.5;  // midpoint rule puts the sample at 0
        YoungCheck yc = young_convolution_check(d, ds, dorigin, f, NormKind::l2());
        CHECK(yc.lhs == doctest::Approx(yc.rhs).epsilon(1e-12));
        CHECK(yc.holds());
    }
    // box of mass 2: lhs <= 2 ||g||
    {
        std::vector<spectral::cplx> box(32, spectral::cplx(1.0, 0.0));
        double ds = 2.0 / 32;  // support [-1, 1], mass 2
        YoungCheck yc = young_convolution_check(box, ds, -1.0, f, NormKind::l2());
        CHECK(yc.rhs == doctest::Approx(2.0 * norm(f, NormKind::l2())).epsilon(1e-12));
        CHECK(yc.holds());
    }
    // randomized H^{-1} variant: 100 draws, zero violations
    {
        std::mt19937_64 rng(404);
        int violations = 0;
        for (int i = 0; i < 100; ++i) {
            PhaseSpaceField gf = random_band_limited(g, 8, rng());
            std::vector<spectral::cplx> fv(48);
            for (auto& v : fv)
                v = spectral::cplx((rng() >> 11) * 0x1.0p-53 - 0.5,
                                   (rng() >> 11) * 0x1.0p-53 - 0.5);
            YoungCheck yc =
                young_convolution_check(fv, 0.05, -1.2, gf, NormKind::sobolev(-1));
            if (!yc.holds()) ++violations;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("gamma inequality in log space") {
    auto c1 = gamma_inequality_check(10, 1.5);
    CHECK(c1.holds);
    auto c2 = gamma_inequality_check(50, 2.5);
    CHECK(c2.holds);
    // margin nondecreasing over m for fixed theta
    double prev = -1e300;
    for (int m = 10; m <= 50; m += 5) {
        auto c = gamma_inequality_check(m, 1.5);
        CHECK(c.holds);
        double margin = c.rhs_log - c.lhs_log;
        CHECK(margin >= prev - 1e-9);
        prev = margin;
    }
    CHECK_THROWS_AS(gamma_inequality_check(2, 1.5), std::domain_error);
}
