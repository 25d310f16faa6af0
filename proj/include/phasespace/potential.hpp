#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phasespace/params.hpp"

namespace phasespace {

enum class PotentialKind { atomic, sampled, polynomial };

/// Power-law decay metadata of the Fourier data: |Vhat(S)| <= D |S|^-(n+1+theta)
/// for |S| > R, with theta in (r+1, r+2) for the audited order r.
struct DecayMeta {
    double theta = 0.0;
    double D = 0.0;
    double R = 0.0;
};

/// One Fourier atom: weight * e^{2 pi i S.x}.
struct FourierMode {
    std::vector<double> S;
    std::complex<double> weight;
};

/// Uniform midpoint S-grid carrying a sampled Fourier density (1D only).
struct SampledDensity {
    double s_radius = 64.0;
    int bins = 8192;
    std::vector<std::complex<double>> vhat;  // value at S_m = -R + (m+1/2) ds
    double ds() const { return 2.0 * s_radius / bins; }
    double s_at(int m) const { return -s_radius + (m + 0.5) * ds(); }
};

/// Quadratic polynomial potential; exactness oracle only (its Fourier
/// transform is not an L1 function, so it is excluded from the audits).
struct QuadraticPolynomial {
    double a0 = 0.0;
    std::vector<double> a1;  // length dim
    std::vector<double> a2;  // dim x dim, row-major, symmetric
};

/// Result of a moment integral that may fail to converge.
struct MomentResult {
    double value = 0.0;
    bool divergent = false;
    double tail_estimate = 0.0;  // extrapolated tail beyond the sample grid
};

/// Potential represented through its Fourier data.
class FourierPotential {
  public:
    static FourierPotential zero(int dim);
    static FourierPotential atomic(int dim, std::vector<FourierMode> modes,
                                   std::optional<DecayMeta> meta = std::nullopt);
    /// V(x) = amplitude * cos(2 pi freq . x): atoms at +-freq with weight amp/2.
    static FourierPotential cosine(int dim, std::vector<double> freq,
                                   double amplitude = 1.0,
                                   std::optional<DecayMeta> meta = std::nullopt);
    static FourierPotential sampled(SampledDensity density,
                                    std::optional<DecayMeta> meta = std::nullopt);
    static FourierPotential polynomial(int dim, QuadraticPolynomial poly);

    /// Named catalog entries for sampled densities:
    ///   "powerlaw"  Vhat(S) = amp (1+|S|)^-(dim+1+theta)
    ///   "gaussian"  Vhat(S) = amp sqrt(pi) e^{-pi^2 S^2}
    static FourierPotential from_catalog(const std::string& name, double amplitude,
                                         double theta, double s_radius, int bins);

    PotentialKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const std::vector<FourierMode>& modes() const { return modes_; }
    const SampledDensity& density() const { return density_; }
    const QuadraticPolynomial& poly() const { return poly_; }
    const std::optional<DecayMeta>& decay_meta() const { return meta_; }
    void set_decay_meta(DecayMeta meta) { meta_ = meta; }

    /// Total Gaussian multiplier e^{-eta_total S^2} already folded in.
    double mollification_eta() const { return mollification_eta_; }

    bool is_zero() const;

    double value(const std::vector<double>& x) const;
    std::vector<double> force(const std::vector<double>& x) const;  // grad V

    /// V(x + d) - V(x - d) evaluated exactly through the Fourier data.
    double pseudo_difference(const std::vector<double>& x,
                             const std::vector<double>& d) const;

    /// A fast gradient evaluator valid on |x| within `radius` per axis.
    /// Sampled potentials are synthesized to a fine table once.
    std::function<void(const double*, double*)> force_evaluator(double radius) const;

    /// integral |Vhat| |S|^p dS (atomic sum / grid quadrature).
    MomentResult absolute_moment(double p) const;

    /// integral |Vhat| (1 - e^{-c S^2}) |S|^p dS.
    double damped_moment(double c, double p) const;

    FourierPotential mollified(double extra_eta) const;

    /// Canonical serialization used for flow-cache keys.
    std::string cache_key() const;

  private:
    FourierPotential() = default;

    PotentialKind kind_ = PotentialKind::atomic;
    int dim_ = 1;
    std::vector<FourierMode> modes_;
    SampledDensity density_;
    QuadraticPolynomial poly_;
    std::optional<DecayMeta> meta_;
    double mollification_eta_ = 0.0;
};

/// V1: Gaussian mollification with multiplier e^{-eta S^2}.
FourierPotential mollify_v1(const FourierPotential& pot, double eta);

/// V~1: multiplier e^{-eta' S^2} with eta' = eta + eps pi sigma_x^2 / 2.
FourierPotential mollify_vtilde1(const FourierPotential& pot,
                                 const SemiclassicalParams& params);

/// M0 moment: integral |Vhat(S)| (1 + |S|^{r+2}) dS.
MomentResult m0_moment(const FourierPotential& pot, int r);

/// Sup-norm bound (2 pi)^m integral |Vhat_mollified(S)| |S|^m dS for the
/// derivatives of the mollified potential, plus the Gamma-function reference
/// bound when decay metadata is available.
struct DerivativeBound {
    double value = 0.0;
    bool divergent = false;
    std::optional<double> reference_bound;  // M0/Gamma form, needs meta
};
DerivativeBound derivative_sup_bound(const FourierPotential& pot_mollified, int m,
                                     double eta_prime);

struct TailSample {
    int m = 0;
    double measured = 0.0;    // ||(1 - e^{-eta' S^2}) |S|^{m+1} Vhat||_L1
    double bound = 0.0;       // C (eps^{(theta-m)/2} + eps) with audited C
    double c_audited = 0.0;
};

struct AssumptionAudit {
    int r = 0;
    double M0 = 0.0;
    bool m0_finite = false;
    bool decay_ok = false;       // |Vhat| <= D |S|^-(n+1+theta) beyond R
    bool a1prime_holds = false;
    bool inconclusive = false;   // no decay metadata to test against
    std::vector<TailSample> tail_bound_samples;
    std::string detail;
};

/// Audit of assumption A1'(r) at the given parameters. The constant C in the
/// tail bound is estimated as the max ratio over an internal epsilon sweep.
AssumptionAudit audit_a1prime(const FourierPotential& pot, int r,
                              const SemiclassicalParams& params);

}  // namespace phasespace
