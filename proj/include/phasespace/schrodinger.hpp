#pragma once

#include <string>
#include <vector>

#include "phasespace/field.hpp"
#include "phasespace/params.hpp"
#include "phasespace/potential.hpp"

namespace phasespace {

/// Strang time-stepping layout; dt*steps reproduces the requested horizon.
struct PropagationPlan {
    double dt = 0.0;
    long steps = 0;
    double epsilon = 0.0;
    static PropagationPlan make(double T, double dt_target, double epsilon);
};

struct EvolveOptions {
    double decay_floor = 1e-12;   // boundary mass above this is flagged
    double decay_error = 1e-6;    // above this the run aborts
    double* boundary_rel_out = nullptr;
};

/// Split-step solution of i eps u_t = (-eps^2/2 Lap + V) u. Kinetic steps are
/// exact Fourier multipliers, potential steps exact phases.
Wavefunction evolve_schrodinger(const Wavefunction& u0, const FourierPotential& pot,
                                const SemiclassicalParams& params, double T,
                                double dt_target, const EvolveOptions& opts = {});

/// eps^{-n/4} a((x-x0)/sqrt(eps)) e^{2 pi i k0.x}, normalized on the grid.
/// Envelope catalog: "gaussian" (default) and "gaussian_x" (odd Schwartz).
Wavefunction coherent_state(const GridSpec& grid, const std::vector<double>& x0,
                            const std::vector<double>& k0,
                            const SemiclassicalParams& params,
                            const std::string& envelope = "gaussian");

/// Epsilon-independent phase-space Gaussian with unit mass; requires
/// s >= sqrt(eps/(4 pi)) so it is an admissible positive-operator symbol.
PhaseSpaceField gaussian_mixed_state(const GridSpec& grid,
                                     const std::vector<double>& center, double s,
                                     double epsilon);

struct MixedStateEnsemble {
    struct Member {
        double weight;
        Wavefunction psi;
    };
    std::vector<Member> members;
    void validate() const;  // weights sum to 1, members normalized
};

/// <u, (-eps^2/2 Lap + V) u> via the spectral kinetic term.
double energy(const Wavefunction& u, const FourierPotential& pot,
              const SemiclassicalParams& params);

double kinetic_energy(const Wavefunction& u, const SemiclassicalParams& params);

}  // namespace phasespace
