#pragma once

#include <vector>

#include "phasespace/field.hpp"
#include "phasespace/params.hpp"
#include "phasespace/potential.hpp"
#include "phasespace/schrodinger.hpp"

namespace phasespace {

/// Spectral symbol of the smoothing operator:
/// e^{-(eps pi/2)(sigma_x^2 |X|^2 + sigma_k^2 |K|^2)}; strictly positive,
/// <= 1, equal to 1 at the origin, separable across axes.
struct SmoothingMultiplier {
    double sigma_x = 1.0;
    double sigma_k = 1.0;
    double epsilon = 0.0;
    double value(double x2, double k2) const {
        return std::exp(-(epsilon * M_PI / 2.0) *
                        (sigma_x * sigma_x * x2 + sigma_k * sigma_k * k2));
    }
};

struct WignerOptions {
    double imag_tol = 1e-10;     // max |Im|/max|Re| accepted in outputs
    double decay_floor = 1e-12;  // boundary mass above this is flagged
    double decay_error = 1e-3;   // escalation threshold: abort the run
    double* boundary_rel_out = nullptr;
    double* imag_residue_out = nullptr;
};

/// W(x,k) = integral e^{-2 pi i y k} u(x + eps y/2) conj(u)(x - eps y/2) dy,
/// realized through spectrally interpolated half-shifts.
PhaseSpaceField wigner_pure(const Wavefunction& u, const SemiclassicalParams& params,
                            const GridSpec& grid, const WignerOptions& opts = {});

/// Weighted sum of member transforms; trace normalization carries over.
PhaseSpaceField wigner_mixed(const MixedStateEnsemble& ens,
                             const SemiclassicalParams& params, const GridSpec& grid,
                             const WignerOptions& opts = {});

/// Phi W via the spectral multiplier; exact mass conservation.
PhaseSpaceField smooth(const PhaseSpaceField& w, const SemiclassicalParams& params);

/// Strang split-step solution of the phase-space evolution with two exact
/// sub-flows: the x-shear multiplier e^{-4 pi^2 i k X dt} and the potential
/// pseudo-difference phase e^{-i dt (V(x+eps y/2)-V(x-eps y/2))/eps}.
PhaseSpaceField evolve_wigner(const PhaseSpaceField& w0, const FourierPotential& pot,
                              const SemiclassicalParams& params, double T,
                              double dt_target, const WignerOptions& opts = {});

/// Smoothed evolution Phi(evolve_wigner(...)). Pass a pre-mollified
/// potential to evolve the mollified system instead.
PhaseSpaceField evolve_swt(const PhaseSpaceField& w0, const FourierPotential& pot,
                           const SemiclassicalParams& params, double T,
                           double dt_target, const WignerOptions& opts = {});

/// sum_i max over the stored snapshots of || 2 pi K_i What ||_L2.
double m1_diagnostic(const std::vector<PhaseSpaceField>& path);

}  // namespace phasespace
