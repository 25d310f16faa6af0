#include "phasespace/wigner.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

namespace phasespace {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
using spectral::cplx;

std::vector<int> x_extents(const GridSpec& g) {
    std::vector<int> e;
    for (int a = 0; a < g.dim(); ++a) e.push_back(g.nx());
    return e;
}

void check_output(const GridSpec& g, const std::vector<double>& vals,
                  double imag_residue, const WignerOptions& opts) {
    if (opts.imag_residue_out) *opts.imag_residue_out = imag_residue;
    if (imag_residue > opts.imag_tol)
        throw std::runtime_error("wigner: imaginary residue " +
                                 std::to_string(imag_residue) + " above tolerance");
    // The full shell is reported; only genuine k-truncation escalates (an
    // x-torus wrap is exact dynamics for periodic potentials).
    double rel = g.boundary_max_rel(vals);
    if (opts.boundary_rel_out) *opts.boundary_rel_out = rel;
    double krel = g.boundary_max_rel_axes(vals, g.dim(), 2 * g.dim());
    if (krel > opts.decay_error)
        throw std::runtime_error("wigner: field reached the k-box boundary (rel " +
                                 std::to_string(krel) + ")");
}

}  // namespace

PhaseSpaceField wigner_pure(const Wavefunction& u, const SemiclassicalParams& params,
                            const GridSpec& grid, const WignerOptions& opts) {
    if (u.grid().dim() != grid.dim() || u.grid().nx() != grid.nx())
        throw std::invalid_argument("wigner_pure: wavefunction grid mismatch");
    for (int a = 0; a < grid.dim(); ++a)
        if (u.grid().x_min(a) != grid.x_min(a) || u.grid().x_max(a) != grid.x_max(a))
            throw std::invalid_argument("wigner_pure: x box mismatch");

    const int dim = grid.dim();
    const std::size_t xsz = grid.x_size();
    const int nk = grid.nk();
    std::size_t ksz = 1;
    for (int a = 0; a < dim; ++a) ksz *= nk;

    // Raw spectrum of u (FFTW forward, unscaled). The unpaired Nyquist bins
    // are ambiguous under fractional shifts and would break the realness
    // symmetry of the product, so they are projected out.
    std::vector<cplx> uhat = u.values();
    const auto xext = x_extents(grid);
    spectral::transform_all(uhat.data(), xext, FFTW_FORWARD);
    {
        std::vector<int> xi(dim, 0);
        for (std::size_t f = 0; f < xsz; ++f) {
            for (int a = 0; a < dim; ++a)
                if (2 * xi[a] == grid.nx()) uhat[f] = cplx(0.0, 0.0);
            for (int a = dim - 1; a >= 0; --a) {
                if (++xi[a] < grid.nx()) break;
                xi[a] = 0;
            }
        }
    }

    // Per x-axis integer frequencies.
    auto xaxes = spectral::x_axes(grid);

    std::vector<cplx> buf(grid.size());
    std::vector<cplx> plus(xsz), minus(xsz);
    std::vector<int> kidx(dim, 0);
    std::vector<int> xi(dim, 0);
    std::vector<double> y(dim), shift(dim);
    const double inv_xsz = 1.0 / static_cast<double>(xsz);

    for (std::size_t m = 0; m < ksz; ++m) {
        // y vector dual to the k axes and the combined shift a = eps y / 2.
        for (int a = 0; a < dim; ++a) {
            double dy = 1.0 / (grid.nk() * grid.dk(a));
            y[a] = spectral::wrap_index(kidx[a], nk) * dy;
            shift[a] = params.epsilon * y[a] / 2.0;
        }
        // Spectral shifts u(x + a), u(x - a).
        std::fill(xi.begin(), xi.end(), 0);
        for (std::size_t f = 0; f < xsz; ++f) {
            double arg = 0.0;
            for (int a = 0; a < dim; ++a) arg += shift[a] * xaxes[a].freq(xi[a]);
            cplx ph = std::polar(inv_xsz, kTwoPi * arg);
            plus[f] = uhat[f] * ph;
            minus[f] = uhat[f] * std::conj(ph);
            for (int a = dim - 1; a >= 0; --a) {
                if (++xi[a] < grid.nx()) break;
                xi[a] = 0;
            }
        }
        spectral::transform_all(plus.data(), xext, FFTW_BACKWARD);
        spectral::transform_all(minus.data(), xext, FFTW_BACKWARD);

        double karg = 0.0;
        for (int a = 0; a < dim; ++a) karg += grid.k_min(a) * y[a];
        cplx kphase = std::polar(1.0, -kTwoPi * karg);
        for (std::size_t f = 0; f < xsz; ++f)
            buf[f * ksz + m] = plus[f] * std::conj(minus[f]) * kphase;

        for (int a = dim - 1; a >= 0; --a) {
            if (++kidx[a] < nk) break;
            kidx[a] = 0;
        }
    }

    // Transform y -> k on the trailing axes (forward kernel e^{-2 pi i k y}).
    auto ext = grid.extents();
    double dy_all = 1.0;
    for (int a = 0; a < dim; ++a) {
        spectral::transform_axis(buf.data(), ext, dim + a, FFTW_FORWARD);
        dy_all *= 1.0 / (grid.nk() * grid.dk(a));
    }

    std::vector<double> vals(grid.size());
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        cplx v = buf[i] * dy_all;
        vals[i] = v.real();
        worst = std::max(worst, std::abs(v.imag()));
        scale = std::max(scale, std::abs(v.real()));
    }
    double residue = scale > 0.0 ? worst / scale : worst;
    check_output(grid, vals, residue, opts);
    return PhaseSpaceField(grid, std::move(vals));
}

PhaseSpaceField wigner_mixed(const MixedStateEnsemble& ens,
                             const SemiclassicalParams& params, const GridSpec& grid,
                             const WignerOptions& opts) {
    ens.validate();
    PhaseSpaceField acc(grid);
    std::vector<double> sum(grid.size(), 0.0);
    for (const auto& member : ens.members) {
        PhaseSpaceField w = wigner_pure(member.psi, params, grid, opts);
        for (std::size_t i = 0; i < sum.size(); ++i)
            sum[i] += member.weight * w.values()[i];
    }
    return PhaseSpaceField(grid, std::move(sum));
}

PhaseSpaceField smooth(const PhaseSpaceField& w, const SemiclassicalParams& params) {
    const GridSpec& g = w.grid();
    SmoothingMultiplier mult{params.sigma_x, params.sigma_k, params.epsilon};
    auto axes = spectral::phase_axes(g);
    const int rank = static_cast<int>(axes.size());
    const int dim = g.dim();
    std::vector<cplx> spec = w.spectrum();
    std::vector<int> idx(rank, 0);
    for (std::size_t flat = 0; flat < spec.size(); ++flat) {
        double x2 = 0.0, k2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            double f = axes[a].freq(idx[a]);
            x2 += f * f;
        }
        for (int a = dim; a < rank; ++a) {
            double f = axes[a].freq(idx[a]);
            k2 += f * f;
        }
        spec[flat] *= mult.value(x2, k2);
        for (int a = rank - 1; a >= 0; --a) {
            if (++idx[a] < axes[a].count) break;
            idx[a] = 0;
        }
    }
    return PhaseSpaceField::from_spectrum(g, std::move(spec));
}

namespace {

// Potential phase table e^{-i dt DeltaV / eps} with DeltaV(x,y) =
// V(x + eps y/2) - V(x - eps y/2); layout matches the field buffer.
std::vector<cplx> potential_phase(const GridSpec& g, const FourierPotential& pot,
                                  double epsilon, double dt, double extra_scale) {
    const int dim = g.dim();
    const int nk = g.nk();
    std::size_t ksz = 1;
    for (int a = 0; a < dim; ++a) ksz *= nk;
    const std::size_t xsz = g.x_size();
    std::vector<cplx> phase(g.size());

    // Fine synthesis table for sampled potentials (1D): V on a periodic
    // 4x-oversampled grid, then cubic interpolation of the two shifts.
    std::vector<double> fine;
    double fine_period = 0.0;
    int fine_n = 0;
    if (pot.kind() == PotentialKind::sampled) {
        const auto& d = pot.density();
        double ds = d.ds();
        fine_period = 1.0 / ds;
        fine_n = 4 * d.bins;
        std::vector<cplx> spec(fine_n, cplx(0.0, 0.0));
        for (int m = 0; m < d.bins; ++m) spec[m] = d.vhat[m] * ds;
        spectral::transform_all(spec.data(), {fine_n}, FFTW_BACKWARD);
        fine.resize(fine_n);
        for (int p = 0; p < fine_n; ++p) {
            double x = p * fine_period / fine_n;
            double arg = kTwoPi * ds * (0.5 - d.bins / 2.0) * x;
            fine[p] = (spec[p] * std::polar(1.0, arg)).real();
        }
    }
    auto fine_eval = [&](double x) {
        double t = x / fine_period * fine_n;
        t -= std::floor(t / fine_n) * fine_n;
        int i = static_cast<int>(std::floor(t));
        double f = t - i;
        auto wrap = [&](int q) { return fine[(q % fine_n + fine_n) % fine_n]; };
        double w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
        double w1 = (f * f - 1.0) * (f - 2.0) / 2.0;
        double w2 = -f * (f + 1.0) * (f - 2.0) / 2.0;
        double w3 = f * (f * f - 1.0) / 6.0;
        return w0 * wrap(i - 1) + w1 * wrap(i) + w2 * wrap(i + 1) + w3 * wrap(i + 2);
    };

    std::vector<int> xi(dim, 0);
    std::vector<double> x(dim), d(dim);
    for (std::size_t fx = 0; fx < xsz; ++fx) {
        for (int a = 0; a < dim; ++a) x[a] = g.x_coord(a, xi[a]);
        std::vector<int> ki(dim, 0);
        for (std::size_t m = 0; m < ksz; ++m) {
            double dv;
            bool nyquist = false;
            for (int a = 0; a < dim; ++a) {
                double dy = 1.0 / (g.nk() * g.dk(a));
                d[a] = epsilon * spectral::wrap_index(ki[a], nk) * dy / 2.0;
                if (2 * ki[a] == nk) nyquist = true;
            }
            if (pot.kind() == PotentialKind::sampled)
                dv = fine_eval(x[0] + d[0]) - fine_eval(x[0] - d[0]);
            else
                dv = pot.pseudo_difference(x, d);
            // The unpaired Nyquist bin has no conjugate partner; a real
            // multiplier there keeps the field exactly real.
            phase[fx * ksz + m] =
                nyquist ? spectral::cplx(extra_scale * std::cos(dt * dv / epsilon), 0.0)
                        : std::polar(extra_scale, -dt * dv / epsilon);
            for (int a = dim - 1; a >= 0; --a) {
                if (++ki[a] < nk) break;
                ki[a] = 0;
            }
        }
        for (int a = dim - 1; a >= 0; --a) {
            if (++xi[a] < g.nx()) break;
            xi[a] = 0;
        }
    }
    return phase;
}

// Shear multiplier e^{-4 pi^2 i k.X dt} (X dual of x, k primal), with the
// round-trip FFT normalization folded in.
std::vector<cplx> shear_phase(const GridSpec& g, double dt, double extra_scale) {
    const int dim = g.dim();
    const int nk = g.nk();
    std::size_t ksz = 1;
    for (int a = 0; a < dim; ++a) ksz *= nk;
    const std::size_t xsz = g.x_size();
    auto xaxes = spectral::x_axes(g);
    std::vector<cplx> phase(g.size());
    std::vector<int> xi(dim, 0);
    for (std::size_t fx = 0; fx < xsz; ++fx) {
        bool nyquist = false;
        for (int a = 0; a < dim; ++a)
            if (2 * xi[a] == g.nx()) nyquist = true;
        std::vector<int> ki(dim, 0);
        for (std::size_t m = 0; m < ksz; ++m) {
            double arg = 0.0;
            for (int a = 0; a < dim; ++a) {
                double X = xaxes[a].freq(xi[a]);
                double k = g.k_coord(a, ki[a]);
                arg += k * X;
            }
            double full = -4.0 * M_PI * M_PI * arg * dt;
            phase[fx * ksz + m] =
                nyquist ? spectral::cplx(extra_scale * std::cos(full), 0.0)
                        : std::polar(extra_scale, full);
            for (int a = dim - 1; a >= 0; --a) {
                if (++ki[a] < nk) break;
                ki[a] = 0;
            }
        }
        for (int a = dim - 1; a >= 0; --a) {
            if (++xi[a] < g.nx()) break;
            xi[a] = 0;
        }
    }
    return phase;
}

}  // namespace

PhaseSpaceField evolve_wigner(const PhaseSpaceField& w0, const FourierPotential& pot,
                              const SemiclassicalParams& params, double T,
                              double dt_target, const WignerOptions& opts) {
    if (T == 0.0) return w0;
    const GridSpec& g = w0.grid();
    PropagationPlan plan = PropagationPlan::make(T, dt_target, params.epsilon);
    const int dim = g.dim();

    const double inv_k = 1.0 / std::pow(static_cast<double>(g.nk()), dim);
    const double inv_x = 1.0 / std::pow(static_cast<double>(g.nx()), dim);
    const bool has_potential = !pot.is_zero();

    std::vector<cplx> pot_half, pot_full, shear;
    if (has_potential) {
        pot_half = potential_phase(g, pot, params.epsilon, plan.dt / 2.0, inv_k);
        pot_full = potential_phase(g, pot, params.epsilon, plan.dt, inv_k);
        shear = shear_phase(g, plan.dt, inv_x);
    }

    std::vector<cplx> buf(g.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = w0.values()[i];
    auto ext = g.extents();

    // k -> y uses the backward kernel so the spec's phase sign applies.
    auto apply_potential = [&](const std::vector<cplx>& table) {
        for (int a = 0; a < dim; ++a)
            spectral::transform_axis(buf.data(), ext, dim + a, FFTW_BACKWARD);
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= table[i];
        for (int a = 0; a < dim; ++a)
            spectral::transform_axis(buf.data(), ext, dim + a, FFTW_FORWARD);
    };
    auto apply_shear = [&]() {
        for (int a = 0; a < dim; ++a)
            spectral::transform_axis(buf.data(), ext, a, FFTW_FORWARD);
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= shear[i];
        for (int a = 0; a < dim; ++a)
            spectral::transform_axis(buf.data(), ext, a, FFTW_BACKWARD);
    };

    if (!has_potential) {
        // Pure shear; all steps commute into one multiplier application.
        std::vector<cplx> total = shear_phase(g, T, inv_x);
        for (int a = 0; a < dim; ++a)
            spectral::transform_axis(buf.data(), ext, a, FFTW_FORWARD);
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= total[i];
        for (int a = 0; a < dim; ++a)
            spectral::transform_axis(buf.data(), ext, a, FFTW_BACKWARD);
    } else {
        apply_potential(pot_half);
        for (long s = 0; s < plan.steps; ++s) {
            apply_shear();
            apply_potential(s + 1 < plan.steps ? pot_full : pot_half);
        }
    }

    std::vector<double> vals(g.size());
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        vals[i] = buf[i].real();
        worst = std::max(worst, std::abs(buf[i].imag()));
        scale = std::max(scale, std::abs(buf[i].real()));
    }
    double residue = scale > 0.0 ? worst / scale : worst;
    check_output(g, vals, residue, opts);
    return PhaseSpaceField(g, std::move(vals));
}

PhaseSpaceField evolve_swt(const PhaseSpaceField& w0, const FourierPotential& pot,
                           const SemiclassicalParams& params, double T,
                           double dt_target, const WignerOptions& opts) {
    if (T == 0.0) return smooth(w0, params);
    return smooth(evolve_wigner(w0, pot, params, T, dt_target, opts), params);
}

double m1_diagnostic(const std::vector<PhaseSpaceField>& path) {
    if (path.empty()) throw std::invalid_argument("m1_diagnostic: empty path");
    const GridSpec& g = path.front().grid();
    const int dim = g.dim();
    std::vector<double> best(dim, 0.0);
    for (const auto& w : path) {
        if (w.grid() != g)
            throw std::invalid_argument("m1_diagnostic: inconsistent grids");
        auto axes = spectral::phase_axes(g);
        const auto& spec = w.spectrum();
        double dvol = 1.0;
        for (const auto& ax : axes) dvol *= ax.dual_spacing();
        const int rank = static_cast<int>(axes.size());
        std::vector<double> acc(dim, 0.0);
        std::vector<int> idx(rank, 0);
        for (std::size_t flat = 0; flat < spec.size(); ++flat) {
            double p2 = std::norm(spec[flat]);
            for (int a = 0; a < dim; ++a) {
                double K = axes[dim + a].freq(idx[dim + a]);
                acc[a] += kTwoPi * kTwoPi * K * K * p2;
            }
            for (int a = rank - 1; a >= 0; --a) {
                if (++idx[a] < axes[a].count) break;
                idx[a] = 0;
            }
        }
        for (int a = 0; a < dim; ++a)
            best[a] = std::max(best[a], std::sqrt(acc[a] * dvol));
    }
    double m1 = 0.0;
    for (double b : best) m1 += b;
    return m1;
}

}  // namespace phasespace
