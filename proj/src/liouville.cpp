#include "phasespace/liouville.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace phasespace {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
using spectral::cplx;

// Flattened force evaluators; the flow loop is the hottest path in the
// library so the common kinds get tight specializations.
struct ForceField {
    virtual ~ForceField() = default;
    virtual void eval(const double* x, double* g) const = 0;
};

struct AtomicForce final : ForceField {
    int dim;
    std::vector<double> s;    // modes * dim
    std::vector<double> wre, wim;
    void eval(const double* x, double* g) const override {
        for (int a = 0; a < dim; ++a) g[a] = 0.0;
        const std::size_t m = wre.size();
        for (std::size_t j = 0; j < m; ++j) {
            double phase = 0.0;
            for (int a = 0; a < dim; ++a) phase += s[j * dim + a] * x[a];
            double sn = std::sin(kTwoPi * phase), cs = std::cos(kTwoPi * phase);
            double f = -wre[j] * sn - wim[j] * cs;
            for (int a = 0; a < dim; ++a) g[a] += kTwoPi * s[j * dim + a] * f;
        }
    }
};

struct PolyForce final : ForceField {
    int dim;
    std::vector<double> a1, a2;
    void eval(const double* x, double* g) const override {
        for (int a = 0; a < dim; ++a) {
            g[a] = a1[a];
            for (int b = 0; b < dim; ++b)
                g[a] += (a2[a * dim + b] + a2[b * dim + a]) * x[b];
        }
    }
};

struct TableForce final : ForceField {
    // 1D cubic table over [-radius, radius].
    double lo, h;
    int n;
    std::vector<double> table;
    void eval(const double* x, double* g) const override {
        double t = (x[0] - lo) / h;
        int i = static_cast<int>(std::floor(t));
        i = std::min(std::max(i, 1), n - 3);
        double f = t - i;
        double w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
        double w1 = (f * f - 1.0) * (f - 2.0) / 2.0;
        double w2 = -f * (f + 1.0) * (f - 2.0) / 2.0;
        double w3 = f * (f * f - 1.0) / 6.0;
        g[0] = w0 * table[i - 1] + w1 * table[i] + w2 * table[i + 1] + w3 * table[i + 2];
    }
};

std::unique_ptr<ForceField> make_force(const FourierPotential& pot, double radius) {
    switch (pot.kind()) {
        case PotentialKind::atomic: {
            auto f = std::make_unique<AtomicForce>();
            f->dim = pot.dim();
            for (const auto& m : pot.modes()) {
                for (double c : m.S) f->s.push_back(c);
                f->wre.push_back(m.weight.real());
                f->wim.push_back(m.weight.imag());
            }
            return f;
        }
        case PotentialKind::polynomial: {
            auto f = std::make_unique<PolyForce>();
            f->dim = pot.dim();
            f->a1 = pot.poly().a1;
            f->a2 = pot.poly().a2;
            return f;
        }
        case PotentialKind::sampled: {
            auto f = std::make_unique<TableForce>();
            f->n = 1 << 15;
            f->lo = -radius;
            f->h = 2.0 * radius / (f->n - 1);
            f->table.resize(f->n);
            const auto& d = pot.density();
            const double ds = d.ds();
            for (int i = 0; i < f->n; ++i) {
                double x = f->lo + i * f->h, v = 0.0;
                for (int m = 0; m < d.bins; ++m) {
                    double s = d.s_at(m);
                    v += kTwoPi * s *
                         (-d.vhat[m].real() * std::sin(kTwoPi * s * x) -
                          d.vhat[m].imag() * std::cos(kTwoPi * s * x)) *
                         ds;
                }
                f->table[i] = v;
            }
            return f;
        }
    }
    throw std::logic_error("make_force: unreachable");
}

struct BoxGuard {
    // k must stay inside the safety box; x additionally earns the ballistic
    // allowance 2 pi k_safe t, since plain streaming is not an escape.
    std::array<double, 2> xlo{}, xhi{}, klo{}, khi{};
    std::array<double, 2> kspan{};
    int dim;
    bool inside(const double* z, double t_elapsed) const {
        for (int a = 0; a < dim; ++a) {
            double allow = kTwoPi * kspan[a] * t_elapsed;
            if (z[a] < xlo[a] - allow || z[a] > xhi[a] + allow) return false;
            if (z[dim + a] < klo[a] || z[dim + a] > khi[a]) return false;
        }
        return true;
    }
};

BoxGuard make_guard(const GridSpec& g, double factor) {
    BoxGuard guard;
    guard.dim = g.dim();
    for (int a = 0; a < g.dim(); ++a) {
        double cx = 0.5 * (g.x_min(a) + g.x_max(a));
        double hx = 0.5 * g.x_length(a) * factor;
        guard.xlo[a] = cx - hx;
        guard.xhi[a] = cx + hx;
        double ck = 0.5 * (g.k_min(a) + g.k_max(a));
        double hk = 0.5 * g.k_length(a) * factor;
        guard.klo[a] = ck - hk;
        guard.khi[a] = ck + hk;
        guard.kspan[a] = std::max(std::abs(guard.klo[a]), std::abs(guard.khi[a]));
    }
    return guard;
}

// One backward trajectory: kick-drift-kick leapfrog with step h (signed).
// Returns false on escape.
inline bool integrate_node(const ForceField& force, const BoxGuard& guard, int dim,
                           double* z, double h, long steps) {
    double g[2];
    const double habs = std::abs(h);
    for (long s = 0; s < steps; ++s) {
        force.eval(z, g);
        for (int a = 0; a < dim; ++a) z[dim + a] -= 0.5 * h / kTwoPi * g[a];
        for (int a = 0; a < dim; ++a) z[a] += h * kTwoPi * z[dim + a];
        force.eval(z, g);
        for (int a = 0; a < dim; ++a) z[dim + a] -= 0.5 * h / kTwoPi * g[a];
        if (!guard.inside(z, habs * static_cast<double>(s + 1))) return false;
    }
    return true;
}

void fill_endpoints(const ForceField& force, const BoxGuard& guard,
                    const GridSpec& g, double h, long steps,
                    std::vector<double>& endpoints, bool& complete) {
    const int dim = g.dim();
    const int rank = 2 * dim;
    const std::size_t total = g.size();
    endpoints.resize(total * rank);
    const auto ext = g.extents();
    bool ok = true;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(&& : ok)
#endif
    for (long long flat = 0; flat < static_cast<long long>(total); ++flat) {
        // decode node coordinates
        std::size_t rem = static_cast<std::size_t>(flat);
        int idx[4];
        for (int a = rank - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % ext[a]);
            rem /= ext[a];
        }
        double z[4];
        for (int a = 0; a < dim; ++a) z[a] = g.x_coord(a, idx[a]);
        for (int a = 0; a < dim; ++a) z[dim + a] = g.k_coord(a, idx[dim + a]);
        bool good = integrate_node(force, guard, dim, z, h, steps);
        for (int a = 0; a < rank; ++a) endpoints[flat * rank + a] = z[a];
        ok = ok && good;
    }
    complete = ok;
}

// Exact tangent of the discrete leapfrog map, sampled nodes only. The kick
// uses a centered finite-difference Hessian; the determinant is structurally
// one, so deviations expose only arithmetic drift.
double jacobian_deviation(const ForceField& force, const BoxGuard& guard,
                          const GridSpec& g, double h, long steps, int stride) {
    const int dim = g.dim();
    const int rank = 2 * dim;
    const auto ext = g.extents();
    const std::size_t total = g.size();
    double worst = 0.0;
    const double fd = 1e-5;
    for (std::size_t flat = 0; flat < total; flat += stride) {
        std::size_t rem = flat;
        int idx[4];
        for (int a = rank - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % ext[a]);
            rem /= ext[a];
        }
        double z[4];
        for (int a = 0; a < dim; ++a) z[a] = g.x_coord(a, idx[a]);
        for (int a = 0; a < dim; ++a) z[dim + a] = g.k_coord(a, idx[dim + a]);

        // tangent matrix M (rank x rank), row-major, starts as identity
        double M[16] = {0};
        for (int a = 0; a < rank; ++a) M[a * rank + a] = 1.0;
        auto kick_tangent = [&](const double* zz, double factor) {
            // dk_a += factor * sum_b H_ab dx_b ; H = Hessian V
            double H[4];
            double gp[2], gm[2], zp[4];
            for (int b = 0; b < dim; ++b) {
                for (int a = 0; a < rank; ++a) zp[a] = zz[a];
                zp[b] += fd;
                force.eval(zp, gp);
                zp[b] -= 2 * fd;
                force.eval(zp, gm);
                for (int a = 0; a < dim; ++a) H[a * dim + b] = (gp[a] - gm[a]) / (2 * fd);
            }
            for (int col = 0; col < rank; ++col)
                for (int a = 0; a < dim; ++a) {
                    double acc = 0.0;
                    for (int b = 0; b < dim; ++b) acc += H[a * dim + b] * M[b * rank + col];
                    M[(dim + a) * rank + col] += factor * acc;
                }
        };
        auto drift_tangent = [&](double factor) {
            for (int col = 0; col < rank; ++col)
                for (int a = 0; a < dim; ++a)
                    M[a * rank + col] += factor * M[(dim + a) * rank + col];
        };

        double gbuf[2];
        bool ok = true;
        for (long s = 0; s < steps && ok; ++s) {
            kick_tangent(z, -0.5 * h / kTwoPi);
            force.eval(z, gbuf);
            for (int a = 0; a < dim; ++a) z[dim + a] -= 0.5 * h / kTwoPi * gbuf[a];
            drift_tangent(h * kTwoPi);
            for (int a = 0; a < dim; ++a) z[a] += h * kTwoPi * z[dim + a];
            kick_tangent(z, -0.5 * h / kTwoPi);
            force.eval(z, gbuf);
            for (int a = 0; a < dim; ++a) z[dim + a] -= 0.5 * h / kTwoPi * gbuf[a];
            ok = guard.inside(z, std::abs(h) * static_cast<double>(s + 1));
        }
        if (!ok) continue;
        double det;
        if (rank == 2) {
            det = M[0] * M[3] - M[1] * M[2];
        } else {
            // 4x4 determinant by cofactor expansion
            auto d3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
                return M[r0 * 4 + c0] * (M[r1 * 4 + c1] * M[r2 * 4 + c2] -
                                         M[r1 * 4 + c2] * M[r2 * 4 + c1]) -
                       M[r0 * 4 + c1] * (M[r1 * 4 + c0] * M[r2 * 4 + c2] -
                                         M[r1 * 4 + c2] * M[r2 * 4 + c0]) +
                       M[r0 * 4 + c2] * (M[r1 * 4 + c0] * M[r2 * 4 + c1] -
                                         M[r1 * 4 + c1] * M[r2 * 4 + c0]);
            };
            det = M[0] * d3(1, 2, 3, 1, 2, 3) - M[1] * d3(1, 2, 3, 0, 2, 3) +
                  M[2] * d3(1, 2, 3, 0, 1, 3) - M[3] * d3(1, 2, 3, 0, 1, 2);
        }
        worst = std::max(worst, std::abs(det - 1.0));
    }
    return worst;
}

double endpoint_gap(const std::vector<double>& a, const std::vector<double>& b,
                    int stride) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); i += stride)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

double force_radius(const GridSpec& g, double factor) {
    double r = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        r = std::max(r, std::abs(g.x_min(a)) * factor);
        r = std::max(r, std::abs(g.x_max(a)) * factor);
    }
    return r + 1.0;
}

}  // namespace

FlowMap flow_backward(const FourierPotential& pot, double t, const GridSpec& grid,
                      const FlowOptions& opts) {
    FlowMap flow(grid);
    flow.t = t;
    if (t == 0.0) {
        const int rank = 2 * grid.dim();
        flow.endpoints.resize(grid.size() * rank);
        const auto ext = grid.extents();
        std::vector<int> idx(rank, 0);
        for (std::size_t flat = 0; flat < grid.size(); ++flat) {
            for (int a = 0; a < grid.dim(); ++a) {
                flow.endpoints[flat * rank + a] = grid.x_coord(a, idx[a]);
                flow.endpoints[flat * rank + grid.dim() + a] =
                    grid.k_coord(a, idx[grid.dim() + a]);
            }
            for (int a = rank - 1; a >= 0; --a) {
                if (++idx[a] < ext[a]) break;
                idx[a] = 0;
            }
        }
        flow.dt = 0.0;
        return flow;
    }
    if (t < 0.0) throw std::domain_error("flow_backward: t must be >= 0");

    auto force = make_force(pot, force_radius(grid, opts.safety_factor));
    auto guard = make_guard(grid, opts.safety_factor);

    auto run = [&](double dt_run, std::vector<double>& endpoints, bool& complete) {
        long steps = std::max<long>(1, std::lround(t / dt_run));
        double h = -t / static_cast<double>(steps);
        fill_endpoints(*force, guard, grid, h, steps, endpoints, complete);
        return steps;
    };

    if (opts.dt > 0.0) {
        bool complete = true;
        long steps = run(opts.dt, flow.endpoints, complete);
        flow.dt = t / static_cast<double>(steps);
        flow.complete = complete;
    } else {
        // t/2048 with halving until the endpoint Cauchy difference is small;
        // the halving comparison runs on a node subsample to stay cheap.
        double dt_try = t / 2048.0;
        const int sample_stride = 211;
        auto subsample_endpoints = [&](double dt_run, std::vector<double>& out) {
            long steps = std::max<long>(1, std::lround(t / dt_run));
            double h = -t / static_cast<double>(steps);
            const int dim = grid.dim();
            const int rank = 2 * dim;
            const auto ext = grid.extents();
            out.clear();
            for (std::size_t flat = 0; flat < grid.size();
                 flat += static_cast<std::size_t>(sample_stride)) {
                std::size_t rem = flat;
                int idx[4];
                for (int a = rank - 1; a >= 0; --a) {
                    idx[a] = static_cast<int>(rem % ext[a]);
                    rem /= ext[a];
                }
                double z[4];
                for (int a = 0; a < dim; ++a) z[a] = grid.x_coord(a, idx[a]);
                for (int a = 0; a < dim; ++a) z[dim + a] = grid.k_coord(a, idx[dim + a]);
                integrate_node(*force, guard, dim, z, h, steps);
                for (int a = 0; a < rank; ++a) out.push_back(z[a]);
            }
        };
        std::vector<double> coarse, fine;
        subsample_endpoints(dt_try, coarse);
        double gap = std::numeric_limits<double>::infinity();
        for (int halving = 0; halving < opts.max_halvings; ++halving) {
            subsample_endpoints(dt_try / 2.0, fine);
            gap = endpoint_gap(coarse, fine, 1);
            if (gap < opts.cauchy_tol) break;
            dt_try /= 2.0;
            coarse.swap(fine);
        }
        flow.cauchy_diff = gap;
        flow.cauchy_met = gap < opts.cauchy_tol;
        bool complete = true;
        long steps = run(dt_try, flow.endpoints, complete);
        flow.dt = t / static_cast<double>(steps);
        flow.complete = complete;
    }

    if (!flow.complete)
        throw EscapeError("flow_backward: a trajectory left the safety box (" +
                          std::to_string(opts.safety_factor) + "x domain)");
    long steps = std::max<long>(1, std::lround(t / flow.dt));
    flow.jacobian_dev = jacobian_deviation(*force, guard, grid, -t / steps, steps,
                                           opts.jacobian_stride);
    return flow;
}

double reversibility_defect(const FourierPotential& pot, const FlowMap& flow,
                            int stride) {
    const GridSpec& g = flow.grid;
    const int dim = g.dim();
    const int rank = 2 * dim;
    auto force = make_force(pot, force_radius(g, 4.0));
    auto guard = make_guard(g, 4.0);
    long steps = std::max<long>(1, std::lround(flow.t / flow.dt));
    double h = flow.t / static_cast<double>(steps);  // forward now
    const auto ext = g.extents();
    double worst = 0.0;
    double box = 0.0;
    for (int a = 0; a < dim; ++a)
        box = std::max({box, g.x_length(a), g.k_length(a)});
    for (std::size_t flat = 0; flat < g.size(); flat += stride) {
        double z[4];
        for (int a = 0; a < rank; ++a) z[a] = flow.endpoints[flat * rank + a];
        integrate_node(*force, guard, dim, z, h, steps);
        std::size_t rem = flat;
        int idx[4];
        for (int a = rank - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % ext[a]);
            rem /= ext[a];
        }
        for (int a = 0; a < dim; ++a) {
            worst = std::max(worst, std::abs(z[a] - g.x_coord(a, idx[a])));
            worst = std::max(worst,
                             std::abs(z[dim + a] - g.k_coord(a, idx[dim + a])));
        }
    }
    return worst / box;
}

namespace {

// Separable periodic Lagrange interpolation on (optionally upsampled)
// sample arrays: 4-point cubic by default, 6-point for the band-limited
// upsample path.
struct Interpolator {
    std::vector<double> data;
    std::vector<int> ext;        // per-axis count
    std::vector<double> origin;  // axis coordinate of index 0
    std::vector<double> spacing;
    int points = 4;              // 4 or 6 taps per axis

    double eval(const double* z) const {
        const int rank = static_cast<int>(ext.size());
        const int np = points;
        const int lo = np / 2 - 1;  // leftmost tap offset from base
        int base[4];
        double w[4][6];
        for (int a = 0; a < rank; ++a) {
            double tpos = (z[a] - origin[a]) / spacing[a];
            double fl = std::floor(tpos);
            double f = tpos - fl;
            base[a] = static_cast<int>(fl);
            // Lagrange weights on nodes {-lo, ..., np-1-lo} at f
            for (int j = 0; j < np; ++j) {
                double num = 1.0, den = 1.0;
                double xj = j - lo;
                for (int m = 0; m < np; ++m) {
                    if (m == j) continue;
                    double xm = m - lo;
                    num *= f - xm;
                    den *= xj - xm;
                }
                w[a][j] = num / den;
            }
        }
        double acc = 0.0;
        int taps = 1;
        for (int a = 0; a < rank; ++a) taps *= np;
        for (int tap = 0; tap < taps; ++tap) {
            int rem = tap;
            double weight = 1.0;
            std::size_t flat = 0;
            for (int a = 0; a < rank; ++a) {
                int o = rem % np;
                rem /= np;
                int j = base[a] - lo + o;
                j %= ext[a];
                if (j < 0) j += ext[a];
                weight *= w[a][o];
                flat = flat * ext[a] + j;
            }
            acc += weight * data[flat];
        }
        return acc;
    }
};

Interpolator build_interpolator(const PhaseSpaceField& rho0, InterpMode mode) {
    const GridSpec& g = rho0.grid();
    const int dim = g.dim();
    const int rank = 2 * dim;
    Interpolator interp;
    interp.ext.resize(rank);
    interp.origin.resize(rank);
    interp.spacing.resize(rank);
    for (int a = 0; a < dim; ++a) {
        interp.origin[a] = g.x_min(a);
        interp.spacing[a] = g.dx(a);
        interp.ext[a] = g.nx();
        interp.origin[dim + a] = g.k_min(a);
        interp.spacing[dim + a] = g.dk(a);
        interp.ext[dim + a] = g.nk();
    }
    if (mode == InterpMode::cubic) {
        interp.data = rho0.values();
        return interp;
    }
    // spectral: band-limited 4x upsample, then 6-point local interpolation
    interp.points = 6;
    const int up = 4;
    std::vector<int> ext = g.extents();
    std::vector<cplx> spec(rho0.values().size());
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] = rho0.values()[i];
    spectral::transform_all(spec.data(), ext, FFTW_FORWARD);
    std::vector<int> fext(rank);
    std::size_t ftotal = 1;
    for (int a = 0; a < rank; ++a) {
        fext[a] = ext[a] * up;
        ftotal *= fext[a];
    }
    std::vector<cplx> fine(ftotal, cplx(0.0, 0.0));
    std::vector<int> idx(rank, 0);
    for (std::size_t flat = 0; flat < spec.size(); ++flat) {
        std::size_t fflat = 0;
        for (int a = 0; a < rank; ++a) {
            int wfreq = spectral::wrap_index(idx[a], ext[a]);
            int j = wfreq >= 0 ? wfreq : fext[a] + wfreq;
            fflat = fflat * fext[a] + j;
        }
        fine[fflat] = spec[flat];
        for (int a = rank - 1; a >= 0; --a) {
            if (++idx[a] < ext[a]) break;
            idx[a] = 0;
        }
    }
    spectral::transform_all(fine.data(), fext, FFTW_BACKWARD);
    double scale = 1.0;
    for (int a = 0; a < rank; ++a) scale /= ext[a];
    interp.data.resize(ftotal);
    for (std::size_t i = 0; i < ftotal; ++i) interp.data[i] = fine[i].real() * scale;
    interp.ext = fext;
    for (int a = 0; a < rank; ++a) interp.spacing[a] /= up;
    return interp;
}

}  // namespace

PhaseSpaceField transport_along(const PhaseSpaceField& rho0, const FlowMap& flow,
                                InterpMode mode, TransportReport* report) {
    if (rho0.grid() != flow.grid)
        throw std::invalid_argument("transport_along: grid mismatch");
    if (!flow.complete) throw EscapeError("transport_along: incomplete flow");
    const GridSpec& g = rho0.grid();
    const int rank = 2 * g.dim();
    Interpolator interp = build_interpolator(rho0, mode);
    std::vector<double> out(g.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long flat = 0; flat < static_cast<long long>(g.size()); ++flat)
        out[flat] = interp.eval(&flow.endpoints[flat * rank]);
    PhaseSpaceField result(g, std::move(out));
    if (report) {
        double m0 = rho0.integral(), m1 = result.integral();
        double n0 = rho0.l2_norm(), n1 = result.l2_norm();
        report->mass_drift = m0 != 0.0 ? std::abs(m1 - m0) / std::abs(m0) : 0.0;
        report->l2_drift = n0 != 0.0 ? std::abs(n1 - n0) / n0 : 0.0;
    }
    return result;
}

PhaseSpaceField solve_liouville(const PhaseSpaceField& rho0,
                                const FourierPotential& pot, double t,
                                const FlowOptions& opts, InterpMode mode,
                                FlowCache* cache, TransportReport* report) {
    if (t == 0.0) return rho0;
    std::optional<FlowMap> flow;
    if (cache) flow = cache->load(pot, t, rho0.grid(), opts.dt);
    if (!flow) {
        flow = flow_backward(pot, t, rho0.grid(), opts);
        if (cache) cache->store(pot, *flow, opts.dt);
    }
    return transport_along(rho0, *flow, mode, report);
}

PhaseSpaceField solve_rho1(const PhaseSpaceField& w0_smoothed,
                           const FourierPotential& pot,
                           const SemiclassicalParams& params, double t,
                           const FlowOptions& opts, InterpMode mode,
                           FlowCache* cache, TransportReport* report) {
    FourierPotential vt1 = mollify_vtilde1(pot, params);
    return solve_liouville(w0_smoothed, vt1, t, opts, mode, cache, report);
}

PhaseSpaceField solve_rho2(const PhaseSpaceField& w0_smoothed,
                           const FourierPotential& pot, double t,
                           const FlowOptions& opts, InterpMode mode,
                           FlowCache* cache, TransportReport* report) {
    return solve_liouville(w0_smoothed, pot, t, opts, mode, cache, report);
}

std::string FlowCache::key(const FourierPotential& pot, double t,
                           const GridSpec& grid, double dt) const {
    char meta[128];
    std::snprintf(meta, sizeof meta, "t=%.17g;dt=%.17g;", t, dt);
    std::string full = pot.cache_key() + grid.describe() + meta;
    std::size_t h = std::hash<std::string>{}(full);
    char name[32];
    std::snprintf(name, sizeof name, "%016zx.flow", h);
    return name;
}

std::optional<FlowMap> FlowCache::load(const FourierPotential& pot, double t,
                                       const GridSpec& grid, double dt) const {
    namespace fs = std::filesystem;
    fs::path p = fs::path(dir_) / key(pot, t, grid, dt);
    std::ifstream is(p, std::ios::binary);
    if (!is) return std::nullopt;
    std::uint64_t count = 0;
    double stored_t = 0, stored_dt = 0, jac = 0;
    is.read(reinterpret_cast<char*>(&stored_t), sizeof stored_t);
    is.read(reinterpret_cast<char*>(&stored_dt), sizeof stored_dt);
    is.read(reinterpret_cast<char*>(&jac), sizeof jac);
    is.read(reinterpret_cast<char*>(&count), sizeof count);
    if (!is || count != grid.size() * 2 * grid.dim()) return std::nullopt;
    FlowMap flow(grid);
    flow.t = stored_t;
    flow.dt = stored_dt;
    flow.jacobian_dev = jac;
    flow.endpoints.resize(count);
    is.read(reinterpret_cast<char*>(flow.endpoints.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) return std::nullopt;
    return flow;
}

void FlowCache::store(const FourierPotential& pot, const FlowMap& flow,
                      double requested_dt) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    fs::path p = fs::path(dir_) / key(pot, flow.t, flow.grid, requested_dt);
    std::ofstream os(p, std::ios::binary);
    if (!os) return;  // cache is best effort
    std::uint64_t count = flow.endpoints.size();
    os.write(reinterpret_cast<const char*>(&flow.t), sizeof flow.t);
    os.write(reinterpret_cast<const char*>(&flow.dt), sizeof flow.dt);
    os.write(reinterpret_cast<const char*>(&flow.jacobian_dev),
             sizeof flow.jacobian_dev);
    os.write(reinterpret_cast<const char*>(&count), sizeof count);
    os.write(reinterpret_cast<const char*>(flow.endpoints.data()),
             static_cast<std::streamsize>(count * sizeof(double)));
}

}  // namespace phasespace
