#include "phasespace/norms.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace phasespace {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// All multi-indices over `rank` axes with total degree <= m.
void enumerate_indices(int rank, int m, std::vector<std::vector<int>>& out,
                       std::vector<int>& cur, int axis, int used) {
    if (axis == rank) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e + used <= m; ++e) {
        cur[axis] = e;
        enumerate_indices(rank, m, out, cur, axis + 1, used + e);
    }
}

std::vector<std::vector<int>> indices_up_to(int rank, int m) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(rank, 0);
    enumerate_indices(rank, m, out, cur, 0, 0);
    return out;
}

}  // namespace

std::string NormKind::label() const {
    std::ostringstream os;
    switch (tag) {
        case Tag::L2: os << "L2"; break;
        case Tag::Sobolev: os << "H" << sobolev_m; break;
        case Tag::Xmp: os << "X(" << xmp_m << "," << xmp_p << ")"; break;
    }
    return os.str();
}

double norm_of_spectrum(const GridSpec& grid,
                        const std::vector<spectral::cplx>& spectrum,
                        const NormKind& kind) {
    const auto axes = spectral::phase_axes(grid);
    const int rank = static_cast<int>(axes.size());
    double dvol = 1.0;
    for (const auto& ax : axes) dvol *= ax.dual_spacing();

    // Per-axis frequency tables.
    std::vector<std::vector<double>> freq(rank);
    for (int a = 0; a < rank; ++a) {
        freq[a].resize(axes[a].count);
        for (int j = 0; j < axes[a].count; ++j) freq[a][j] = axes[a].freq(j);
    }
    auto for_each_mode = [&](auto&& body) {
        std::vector<int> idx(rank, 0);
        for (std::size_t flat = 0; flat < spectrum.size(); ++flat) {
            body(idx, spectrum[flat]);
            for (int a = rank - 1; a >= 0; --a) {
                if (++idx[a] < axes[a].count) break;
                idx[a] = 0;
            }
        }
    };

    switch (kind.tag) {
        case NormKind::Tag::L2: {
            double s = 0.0;
            for (const auto& v : spectrum) s += std::norm(v);
            return std::sqrt(s * dvol);
        }
        case NormKind::Tag::Sobolev: {
            if (kind.sobolev_m >= 0) {
                auto multis = indices_up_to(rank, kind.sobolev_m);
                std::vector<double> acc(multis.size(), 0.0);
                for_each_mode([&](const std::vector<int>& idx, spectral::cplx v) {
                    double p2 = std::norm(v);
                    if (p2 == 0.0) return;
                    for (std::size_t t = 0; t < multis.size(); ++t) {
                        double w = 1.0;
                        for (int a = 0; a < rank; ++a)
                            for (int e = 0; e < multis[t][a]; ++e)
                                w *= kTwoPi * std::abs(freq[a][idx[a]]);
                        acc[t] += w * w * p2;
                    }
                });
                double total = 0.0;
                for (double s : acc) total += std::sqrt(s * dvol);
                return total;
            }
            // Negative order: single spectral weight (1 + |Z|^2)^{m/2}.
            double s = 0.0;
            const double mm = kind.sobolev_m;
            for_each_mode([&](const std::vector<int>& idx, spectral::cplx v) {
                double z2 = 0.0;
                for (int a = 0; a < rank; ++a) z2 += freq[a][idx[a]] * freq[a][idx[a]];
                s += std::pow(1.0 + z2, mm) * std::norm(v);
            });
            return std::sqrt(s * dvol);
        }
        case NormKind::Tag::Xmp: {
            const double m = kind.xmp_m, p = kind.xmp_p;
            if (std::isinf(p)) {
                double best = 0.0;
                for_each_mode([&](const std::vector<int>& idx, spectral::cplx v) {
                    double z2 = 0.0;
                    for (int a = 0; a < rank; ++a)
                        z2 += freq[a][idx[a]] * freq[a][idx[a]];
                    double w = (z2 == 0.0 && m < 0.0) ? 0.0 : std::pow(z2, m / 2.0);
                    if (z2 == 0.0 && m == 0.0) w = 1.0;
                    best = std::max(best, w * std::abs(v));
                });
                return best;
            }
            double s = 0.0;
            for_each_mode([&](const std::vector<int>& idx, spectral::cplx v) {
                double z2 = 0.0;
                for (int a = 0; a < rank; ++a) z2 += freq[a][idx[a]] * freq[a][idx[a]];
                double w;
                if (z2 == 0.0)
                    w = (m == 0.0) ? 1.0 : 0.0;  // zero-frequency cell for m<0
                else
                    w = std::pow(z2, m / 2.0);
                s += std::pow(w * std::abs(v), p);
            });
            return std::pow(s * dvol, 1.0 / p);
        }
    }
    return 0.0;
}

double norm(const PhaseSpaceField& field, const NormKind& kind) {
    if (kind.tag == NormKind::Tag::L2) return field.l2_norm();
    for (double v : field.values())
        if (!std::isfinite(v)) throw std::domain_error("norm: non-finite field");
    return norm_of_spectrum(field.grid(), field.spectrum(), kind);
}

double growth_constant(int m, int n, const FourierPotential& pot) {
    if (m < 1) throw std::domain_error("growth_constant: m must be >= 1");
    if (m == 1) {
        MomentResult mom = pot.absolute_moment(2.0);
        if (mom.divergent) return std::numeric_limits<double>::infinity();
        return n * M_PI * std::max(1.0, mom.value);
    }
    MomentResult lo = pot.absolute_moment(1.0);
    MomentResult hi = pot.absolute_moment(static_cast<double>(m) + 1.0);
    if (lo.divergent || hi.divergent)
        return std::numeric_limits<double>::infinity();
    double fact = 1.0;
    for (int i = 2; i <= m; ++i) fact *= i;
    return (1.0 + std::pow(n, m + 1) * fact) * M_PI *
           std::max(1.0, lo.value + hi.value);
}

PhaseSpaceField difference(const PhaseSpaceField& a, const PhaseSpaceField& b) {
    if (a.grid() != b.grid())
        throw std::invalid_argument("difference: grid mismatch");
    std::vector<double> d(a.values().size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.values()[i] - b.values()[i];
    return PhaseSpaceField(a.grid(), std::move(d));
}

double relative_error(const PhaseSpaceField& a, const PhaseSpaceField& b,
                      const NormKind& kind, const PhaseSpaceField& normalizer) {
    double den = norm(normalizer, kind);
    if (den < 1e-300)
        throw std::domain_error("relative_error: degenerate normalizer");
    return norm(difference(a, b), kind) / den;
}

YoungCheck young_convolution_check(const std::vector<spectral::cplx>& f_values,
                                   double f_spacing, double f_origin,
                                   const PhaseSpaceField& g, const NormKind& kind) {
    const GridSpec& grid = g.grid();
    const auto axes = spectral::phase_axes(grid);
    const auto& ghat = g.spectrum();

    // f tilde evaluated at the field's first-axis frequencies.
    const auto& ax0 = axes[0];
    std::vector<spectral::cplx> fhat(ax0.count);
    double f_l1 = 0.0;
    for (const auto& v : f_values) f_l1 += std::abs(v) * f_spacing;
    for (int j = 0; j < ax0.count; ++j) {
        double X = ax0.freq(j);
        spectral::cplx acc(0.0, 0.0);
        for (std::size_t m = 0; m < f_values.size(); ++m) {
            double s = f_origin + (m + 0.5) * f_spacing;
            acc += f_values[m] * std::polar(1.0, -kTwoPi * s * X);
        }
        fhat[j] = acc * f_spacing;
    }

    std::vector<spectral::cplx> hhat(ghat.size());
    std::size_t inner = ghat.size() / ax0.count;
    for (int j = 0; j < ax0.count; ++j)
        for (std::size_t i = 0; i < inner; ++i)
            hhat[j * inner + i] = fhat[j] * ghat[j * inner + i];

    YoungCheck out;
    out.lhs = norm_of_spectrum(grid, hhat, kind);
    out.rhs = f_l1 * norm_of_spectrum(grid, ghat, kind);
    return out;
}

GammaCheck gamma_inequality_check(int m, double theta) {
    if (m - 1.0 - theta <= 0.0)
        throw std::domain_error("gamma_inequality_check: need m > theta + 1");
    GammaCheck out;
    out.lhs_log = std::lgamma((m - 1.0 - theta) / 2.0);
    out.rhs_log = 0.25 * std::log(2.0 * M_PI) +
                  (3.0 + 2.0 * theta) / 4.0 * std::log(2.0) +
                  0.5 * (std::lgamma(m + 1.0) - m * std::log(2.0) -
                         std::log(static_cast<double>(m) * (m - 1.0)));
    out.holds = out.lhs_log < out.rhs_log;
    return out;
}

}  // namespace phasespace
