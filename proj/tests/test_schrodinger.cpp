#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "phasespace/norms.hpp"
#include "phasespace/schrodinger.hpp"

using namespace phasespace;
using spectral::cplx;

namespace {

GridSpec grid_1024() { return GridSpec::make_1d(-8, 8, 1024, -8, 8, 1024); }

FourierPotential harmonic() {
    QuadraticPolynomial q;
    q.a1 = {0.0};
    q.a2 = {2.0 * M_PI * M_PI};  // V = 2 pi^2 x^2: classical period 1
    return FourierPotential::polynomial(1, q);
}

}  // namespace

TEST_CASE("propagation plan reproduces the horizon exactly") {
    auto plan = PropagationPlan::make(0.5, 1.0 / 3000.0, 0.1);
    CHECK(std::abs(plan.dt * plan.steps - 0.5) < 1e-12);
    CHECK_THROWS_AS(PropagationPlan::make(-1.0, 0.1, 0.1), std::domain_error);
}

TEST_CASE("free dispersion matches the closed form") {
    const double eps = 0.1, T = 0.5;
    GridSpec g = grid_1024();
    auto params = SemiclassicalParams::make(1, eps, 1.0, 1.0);
    std::vector<cplx> v(g.x_size());
    for (int i = 0; i < g.nx(); ++i) {
        double x = g.x_coord(0, i);
        v[i] = std::pow(2.0 / eps, 0.25) * std::exp(-M_PI * x * x / eps);
    }
    Wavefunction u0(g, std::move(v));
    Wavefunction uT =
        evolve_schrodinger(u0, FourierPotential::zero(1), params, T, eps / 50.0);
    // u(T,x) = (2/eps)^{1/4} (1+2 pi i T)^{-1/2} e^{-pi x^2/(eps (1+2 pi i T))}
    const cplx b(1.0, 2.0 * M_PI * T);
    double worst = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
        double x = g.x_coord(0, i);
        cplx expect = std::pow(2.0 / eps, 0.25) / std::sqrt(b) *
                      std::exp(-M_PI * x * x / (eps * b));
        worst = std::max(worst, std::abs(uT.values()[i] - expect));
    }
    CHECK(worst < 1e-8);
    // T = 0 returns the data untouched
    Wavefunction same =
        evolve_schrodinger(u0, FourierPotential::zero(1), params, 0.0, 1e-3);
    CHECK(same.values() == u0.values());
}

TEST_CASE("harmonic revival of a coherent state at the classical period") {
    const double eps = 0.05;
    GridSpec g = grid_1024();
    auto params = SemiclassicalParams::make(1, eps, 1.0, 1.0);
    Wavefunction u0 = coherent_state(g, {0.8}, {0.0}, params);
    Wavefunction u1 = evolve_schrodinger(u0, harmonic(), params, 1.0, eps / 50.0);
    cplx overlap(0.0, 0.0);
    for (std::size_t i = 0; i < u0.values().size(); ++i)
        overlap += std::conj(u1.values()[i]) * u0.values()[i];
    overlap *= g.x_cell_volume();
    CHECK(std::abs(overlap) > 1.0 - 1e-6);  // fidelity up to a global phase
}

TEST_CASE("l2 conservation and energy conservation") {
    const double eps = 0.05;
    GridSpec g = grid_1024();
    auto params = SemiclassicalParams::make(1, eps, 1.0, 1.0);
    FourierPotential pot =
        FourierPotential::cosine(1, {1.0}, 1.0, DecayMeta{1.5, 1.0, 1.5});
    Wavefunction u0 = coherent_state(g, {0.3}, {0.4}, params);
    double e0 = energy(u0, pot, params);
    Wavefunction u = u0;
    // 1000 steps at the default dt
    u = evolve_schrodinger(u, pot, params, 1000.0 * (eps / 50.0), eps / 50.0);
    CHECK(std::abs(u.l2_norm() - 1.0) < 1e-12);
    // energy drift is O((dt/eps)^2) for the splitting; the 1e-8 relative
    // target needs the finer step
    Wavefunction ue = evolve_schrodinger(u0, pot, params, 0.5, eps / 2000.0);
    CHECK(std::abs(energy(ue, pot, params) - e0) < 1e-8 * std::abs(e0));
}

TEST_CASE("strang self-convergence is second order") {
    const double eps = 0.1, T = 0.25;
    GridSpec g = GridSpec::make_1d(-8, 8, 512, -8, 8, 512);
    auto params = SemiclassicalParams::make(1, eps, 1.0, 1.0);
    FourierPotential pot = FourierPotential::cosine(1, {1.0});
    Wavefunction u0 = coherent_state(g, {0.0}, {0.3}, params);
    auto err_vs_reference = [&](double dt) {
        Wavefunction ref = evolve_schrodinger(u0, pot, params, T, dt / 8.0);
        Wavefunction ut = evolve_schrodinger(u0, pot, params, T, dt);
        double s = 0.0;
        for (std::size_t i = 0; i < ut.values().size(); ++i)
            s += std::norm(ut.values()[i] - ref.values()[i]);
        return std::sqrt(s * g.x_cell_volume());
    };
    double e1 = err_vs_reference(T / 100.0);
    double e2 = err_vs_reference(T / 200.0);
    CHECK(e1 / e2 > 3.0);  // ~4x for order 2
    CHECK(e1 / e2 < 5.0);
}

TEST_CASE("coherent state construction") {
    const double eps = 0.01;
    GridSpec g = grid_1024();
    auto params = SemiclassicalParams::make(1, eps, 1.0, 1.0);
    Wavefunction u = coherent_state(g, {0.0}, {0.0}, params);
    CHECK(std::abs(u.l2_norm() - 1.0) < 1e-12);
    // peak amplitude eps^{-1/4} 2^{1/4} = 3.7606 at x0
    double peak = 0.0;
    for (const auto& v : u.values()) peak = std::max(peak, std::abs(v));
    CHECK(peak == doctest::Approx(3.7606).epsilon(2e-4));

    // k0 = 2: spectral mass centered at xi = 2 within one cell
    Wavefunction um = coherent_state(g, {0.0}, {2.0}, params);
    auto axes = spectral::x_axes(g);
    auto uhat = spectral::forward(axes, um.values());
    double best = 0.0, best_xi = 0.0;
    for (int j = 0; j < g.nx(); ++j)
        if (std::abs(uhat[j]) > best) {
            best = std::abs(uhat[j]);
            best_xi = axes[0].freq(j);
        }
    CHECK(std::abs(best_xi - 2.0) <= 1.0 / 16.0 + 1e-12);

    CHECK_THROWS_AS(coherent_state(g, {7.9}, {0.0}, params), std::invalid_argument);
    CHECK_THROWS_AS(coherent_state(g, {0.0}, {-7.9}, params), std::invalid_argument);
    CHECK_THROWS_AS(coherent_state(g, {0.0}, {0.0}, params, "triangle"),
                    std::invalid_argument);
    // odd Schwartz envelope is normalized too
    Wavefunction uo = coherent_state(g, {0.0}, {0.0}, params, "gaussian_x");
    CHECK(std::abs(uo.l2_norm() - 1.0) < 1e-12);
}

TEST_CASE("gaussian mixed state") {
    GridSpec g = GridSpec::make_1d(-8, 8, 512, -8, 8, 512);
    PhaseSpaceField w = gaussian_mixed_state(g, {0.0, 0.0}, 1.0, 1.0 / 256);
    CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-12));
    // W(0,0) = 1/(2 pi)
    double center = 0.0;
    for (int i = 0; i < g.nx(); ++i)
        if (g.x_coord(0, i) == 0.0)
            for (int j = 0; j < g.nk(); ++j)
                if (g.k_coord(0, j) == 0.0)
                    center = w.values()[static_cast<std::size_t>(i) * g.nk() + j];
    CHECK(center == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-12));

    // H1/L2 ratio is epsilon independent (the field itself is)
    double r_prev = 0.0;
    for (double eps : {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256}) {
        PhaseSpaceField we = gaussian_mixed_state(g, {0.0, 0.0}, 1.0, eps);
        double r = norm(we, NormKind::sobolev(1)) / norm(we, NormKind::l2());
        if (r_prev != 0.0) CHECK(std::abs(r - r_prev) < 1e-10 * r);
        r_prev = r;
    }
    // admissibility: s below sqrt(eps/4pi) is rejected
    CHECK_THROWS_AS(gaussian_mixed_state(g, {0.0, 0.0}, 0.05, 1.0),
                    std::domain_error);
}

TEST_CASE("ensemble validation") {
    GridSpec g = GridSpec::make_1d(-8, 8, 512, -8, 8, 512);
    auto params = SemiclassicalParams::make(1, 0.1, 1.0, 1.0);
    MixedStateEnsemble ens;
    ens.members.push_back({0.5, coherent_state(g, {-1.0}, {0.0}, params)});
    ens.members.push_back({0.5, coherent_state(g, {1.0}, {0.0}, params)});
    ens.validate();
    ens.members[0].weight = 0.4;
    CHECK_THROWS_AS(ens.validate(), std::invalid_argument);
}

TEST_CASE("boundary escalation") {
    // a fast packet reaches the box edge; the solver must flag it
    const double eps = 0.1;
    GridSpec g = GridSpec::make_1d(-2, 2, 256, -8, 8, 256);
    auto params = SemiclassicalParams::make(1, eps, 1.0, 1.0);
    Wavefunction u0 = coherent_state(g, {0.0}, {1.0}, params);
    CHECK_THROWS_AS(
        evolve_schrodinger(u0, FourierPotential::zero(1), params, 2.0, 1e-3),
        std::runtime_error);
}
