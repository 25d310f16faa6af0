#pragma once

#include <complex>
#include <vector>

#include "phasespace/field.hpp"
#include "phasespace/potential.hpp"

namespace phasespace {

/// Norm selector: L2, integer-order Sobolev (positive orders use the
/// derivative-sum definition, negative orders the spectral weight
/// (1+|Z|^2)^{m/2}), or the X^{m,p} family with weight (|X|^2+|K|^2)^{m/2}.
struct NormKind {
    enum class Tag { L2, Sobolev, Xmp } tag = Tag::L2;
    int sobolev_m = 0;
    double xmp_m = 0.0;
    double xmp_p = 2.0;  // p = infinity encoded as std::numeric_limits::infinity

    static NormKind l2() { return {}; }
    static NormKind sobolev(int m) { return {Tag::Sobolev, m, 0.0, 2.0}; }
    static NormKind xmp(double m, double p) { return {Tag::Xmp, 0, m, p}; }

    std::string label() const;
};

double norm(const PhaseSpaceField& field, const NormKind& kind);

/// Same norms evaluated directly on a spectrum (complex-valued fields in
/// disguise; used by checks whose intermediates need not be real).
double norm_of_spectrum(const GridSpec& grid,
                        const std::vector<spectral::cplx>& spectrum,
                        const NormKind& kind);

/// Exponential growth constant D(m,n) of the H^m estimates:
///   D(m,n) = (1 + n^{m+1} m!) pi max{1, ||Vhat (|S|+|S|^{m+1})||_L1},
/// with the sharper D(1,n) = n pi max{1, ||Vhat |S|^2||_L1}.
/// Returns +infinity when the moment diverges.
double growth_constant(int m, int n, const FourierPotential& pot);

/// norm(a-b)/norm(normalizer) with a degenerate-denominator guard.
double relative_error(const PhaseSpaceField& a, const PhaseSpaceField& b,
                      const NormKind& kind, const PhaseSpaceField& normalizer);

/// Young-inequality check: h(x,k) = integral f(s) g(x-s,k) ds along the first
/// position axis. Returns the measured norm of h and the lemma's bound
/// ||f||_L1 * norm(g).
struct YoungCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds(double slack = 1e-10) const { return lhs <= rhs * (1.0 + slack); }
};
YoungCheck young_convolution_check(const std::vector<spectral::cplx>& f_values,
                                   double f_spacing, double f_origin,
                                   const PhaseSpaceField& g, const NormKind& kind);

/// Log-space comparison Gamma((m-1-theta)/2) < (2 pi)^{1/4} 2^{(3+2theta)/4}
/// sqrt(m! / (2^m m (m-1))).
struct GammaCheck {
    double lhs_log = 0.0;
    double rhs_log = 0.0;
    bool holds = false;
};
GammaCheck gamma_inequality_check(int m, double theta);

/// a - b on a shared grid.
PhaseSpaceField difference(const PhaseSpaceField& a, const PhaseSpaceField& b);

}  // namespace phasespace
