#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "phasespace/field.hpp"
#include "phasespace/fft.hpp"
#include "phasespace/grid.hpp"
#include "phasespace/harness.hpp"
#include "phasespace/params.hpp"

using namespace phasespace;

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(GridSpec::make_1d(-8, 8, 500, -8, 8, 512),
                    std::invalid_argument);  // not a power of two
    CHECK_THROWS_AS(GridSpec::make_1d(-8, 8, 512, -8, 8, 64),
                    std::invalid_argument);  // dk too coarse for 1/Lx pairing
    GridSpec g = GridSpec::make_1d(-8, 8, 512, -8, 8, 512);
    CHECK(g.dx(0) == doctest::Approx(16.0 / 512));
    CHECK(g.size() == 512u * 512u);
    GridSpec g2 = GridSpec::square(2, 2.0, 32);
    CHECK(g2.size() == 32u * 32u * 32u * 32u);
}

TEST_CASE("boundary decay flagging") {
    GridSpec g = GridSpec::make_1d(-8, 8, 64, -2, 2, 64);
    std::vector<double> ok(g.size(), 0.0);
    ok[g.size() / 2 + 17] = 1.0;
    CHECK(g.boundary_decay_ok(ok));
    std::vector<double> bad(g.size(), 0.0);
    bad[0] = 1.0;  // corner node
    CHECK_FALSE(g.boundary_decay_ok(bad));
}

TEST_CASE("eta derivation frozen values") {
    // eps (pi/2 max((4n-1) sx^2, 4n/sk^2 - sx^2) + 1)
    CHECK(derive_eta(1, 0.01, 1.0, 1.0) == doctest::Approx(0.0571238898).epsilon(1e-9));
    CHECK(derive_eta(1, 0.01, 1.0, 0.5) == doctest::Approx(0.245619449).epsilon(1e-9));
    CHECK(derive_eta(1, 1e-8, 1.0, 1.0) / 1e-8 ==
          doctest::Approx(5.71238898).epsilon(1e-9));
    CHECK_THROWS_AS(derive_eta(1, -0.1, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(derive_eta(1, 0.1, 0.0, 1.0), std::domain_error);

    auto p = SemiclassicalParams::make(1, 0.01, 1.0, 1.0);
    CHECK(p.eta_prime == doctest::Approx(p.eta + 0.01 * M_PI / 2.0));

    // monotone in eps and in 1/sigma_k^2
    double prev = 0.0;
    for (double eps : {0.001, 0.002, 0.004, 0.008}) {
        double eta = derive_eta(1, eps, 1.0, 1.0);
        CHECK(eta >= prev);
        prev = eta;
    }
    prev = 0.0;
    for (double sk : {2.0, 1.0, 0.5, 0.25}) {
        double eta = derive_eta(1, 0.01, 1.0, sk);
        CHECK(eta >= prev);
        prev = eta;
    }
    // strict sufficiency of the chosen eta
    for (int n : {1, 2}) {
        double sx = 1.3, sk = 0.7, eps = 0.02;
        double eta = derive_eta(n, eps, sx, sk);
        double bound = eps * M_PI / 2.0 *
                       std::max((4.0 * n - 1.0) * sx * sx,
                                4.0 * n / (sk * sk) - sx * sx);
        CHECK(eta > bound);
    }
}

TEST_CASE("spectral forward: constant field and Gaussian pair") {
    GridSpec g = GridSpec::make_1d(-8, 8, 128, -4, 4, 128);
    std::vector<double> ones(g.size(), 1.0);
    auto spec = spectral::forward(spectral::phase_axes(g), ones);
    // single coefficient at zero frequency equal to the box volume
    CHECK(std::abs(spec[0] - spectral::cplx(16.0 * 8.0, 0.0)) < 1e-9);
    double off = 0.0;
    for (std::size_t i = 1; i < spec.size(); ++i) off = std::max(off, std::abs(spec[i]));
    CHECK(off < 1e-9);

    // 1D x-only Gaussian pair: e^{-2 pi x^2/eps} -> sqrt(eps/2) e^{-pi eps X^2/2}
    const double eps = 0.1;
    GridSpec gx = GridSpec::make_1d(-8, 8, 1024, -8, 8, 1024);
    auto axes = spectral::x_axes(gx);
    std::vector<spectral::cplx> u(1024);
    for (int i = 0; i < 1024; ++i) {
        double x = gx.x_coord(0, i);
        u[i] = std::exp(-2.0 * M_PI * x * x / eps);
    }
    auto uhat = spectral::forward(axes, u);
    double worst = 0.0;
    for (int j = 0; j < 1024; ++j) {
        double X = axes[0].freq(j);
        double expect = std::sqrt(eps / 2.0) * std::exp(-M_PI * eps * X * X / 2.0);
        worst = std::max(worst, std::abs(uhat[j] - spectral::cplx(expect, 0.0)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("round trip and Parseval on random band-limited fields") {
    GridSpec g = GridSpec::make_1d(-8, 8, 128, -4, 4, 128);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        PhaseSpaceField f = random_band_limited(g, 9, seed);
        auto axes = spectral::phase_axes(g);
        auto spec = spectral::forward(axes, f.values());
        double imag = 0.0;
        auto back = spectral::inverse_real(axes, spec, &imag);
        CHECK(imag < 1e-12);
        double worst = 0.0;
        for (std::size_t i = 0; i < back.size(); ++i)
            worst = std::max(worst, std::abs(back[i] - f.values()[i]));
        CHECK(worst < 1e-12 * f.max_abs() + 1e-14);
        // Parseval
        CHECK(spectral::spectrum_l2(axes, spec) ==
              doctest::Approx(f.l2_norm()).epsilon(1e-12));
    }
}

TEST_CASE("one-cell shift multiplies the spectrum by the exact phase") {
    GridSpec g = GridSpec::make_1d(-8, 8, 128, -4, 4, 128);
    PhaseSpaceField f = random_band_limited(g, 9, 77);
    // shift by one x cell (index roll)
    std::vector<double> shifted(f.values().size());
    const int nx = g.nx(), nk = g.nk();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nk; ++j)
            shifted[static_cast<std::size_t>(i) * nk + j] =
                f.values()[static_cast<std::size_t>((i + nx - 1) % nx) * nk + j];
    PhaseSpaceField fs(g, std::move(shifted));
    auto axes = spectral::phase_axes(g);
    auto sa = spectral::forward(axes, f.values());
    auto sb = spectral::forward(axes, fs.values());
    double worst = 0.0;
    for (int i = 0; i < nx; ++i) {
        double X = axes[0].freq(i);
        spectral::cplx phase = std::polar(1.0, -2.0 * M_PI * X * g.dx(0));
        for (int j = 0; j < nk; ++j) {
            std::size_t flat = static_cast<std::size_t>(i) * nk + j;
            worst = std::max(worst, std::abs(sb[flat] - sa[flat] * phase));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("field cache round trip and snapshot io") {
    GridSpec g = GridSpec::make_1d(-8, 8, 64, -2, 2, 64);
    PhaseSpaceField f = random_band_limited(g, 5, 11);
    auto spec = f.spectrum();
    double resid = 0.0;
    auto back = spectral::inverse_real(spectral::phase_axes(g), spec, &resid);
    double rel = 0.0;
    for (std::size_t i = 0; i < back.size(); ++i)
        rel = std::max(rel, std::abs(back[i] - f.values()[i]));
    CHECK(rel / f.max_abs() < 1e-12);

    write_snapshot(f, "/tmp/pstest_snap.bin", 0.125, 0.5);
    double eps = 0, t = 0;
    PhaseSpaceField f2 = read_snapshot("/tmp/pstest_snap.bin", &eps, &t);
    CHECK(eps == 0.125);
    CHECK(t == 0.5);
    CHECK(f2.grid() == f.grid());
    CHECK(f2.values() == f.values());
}

TEST_CASE("2d smoke: round trip and constant spectrum") {
    GridSpec g = GridSpec::square(2, 2.0, 16);
    std::vector<double> vals(g.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = std::sin(0.1 * i);
    auto axes = spectral::phase_axes(g);
    auto spec = spectral::forward(axes, vals);
    auto back = spectral::inverse_real(axes, spec);
    double worst = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        worst = std::max(worst, std::abs(back[i] - vals[i]));
    CHECK(worst < 1e-12);
}
