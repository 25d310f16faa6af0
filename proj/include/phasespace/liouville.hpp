#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phasespace/field.hpp"
#include "phasespace/params.hpp"
#include "phasespace/potential.hpp"

namespace phasespace {

/// Backward characteristic origins Phi_{-t}(x,k) for every grid node.
struct FlowMap {
    GridSpec grid;
    std::vector<double> endpoints;  // 2n coordinates per node
    double t = 0.0;
    double dt = 0.0;
    int scheme_order = 2;
    bool complete = true;
    double jacobian_dev = 0.0;   // max |det - 1| over sampled tangent maps
    double cauchy_diff = 0.0;    // endpoint difference of the last dt halving
    bool cauchy_met = true;

    FlowMap(GridSpec g) : grid(std::move(g)) {}
};

class EscapeError : public std::runtime_error {
  public:
    explicit EscapeError(const std::string& what) : std::runtime_error(what) {}
};

struct FlowOptions {
    double dt = 0.0;          // 0: t/2048 with halving until the Cauchy tol
    double cauchy_tol = 1e-9;
    int max_halvings = 4;
    double safety_factor = 2.0;  // escape guard: this multiple of the box
    int jacobian_stride = 97;    // tangent map sampled every this many nodes
};

/// Second-order symplectic leapfrog integration of xdot = 2 pi k,
/// kdot = -(1/2pi) grad V, run backward from every grid node.
FlowMap flow_backward(const FourierPotential& pot, double t, const GridSpec& grid,
                      const FlowOptions& opts = {});

/// Forward re-integration from the endpoints; returns the max box-relative
/// displacement from the original nodes (time-reversibility measure).
double reversibility_defect(const FourierPotential& pot, const FlowMap& flow,
                            int stride = 157);

enum class InterpMode { cubic, spectral };

struct TransportReport {
    double mass_drift = 0.0;  // relative
    double l2_drift = 0.0;    // relative
};

/// Simple disk cache of flow maps keyed by (potential, t, grid, dt).
class FlowCache {
  public:
    explicit FlowCache(std::string dir) : dir_(std::move(dir)) {}
    std::optional<FlowMap> load(const FourierPotential& pot, double t,
                                const GridSpec& grid, double dt) const;
    /// `requested_dt` is the FlowOptions::dt used to build the flow (0 for
    /// the auto policy); it forms part of the key.
    void store(const FourierPotential& pot, const FlowMap& flow,
               double requested_dt) const;

  private:
    std::string key(const FourierPotential& pot, double t, const GridSpec& grid,
                    double dt) const;
    std::string dir_;
};

/// rho(t) = rho0 at the backward characteristic feet, evaluated with
/// separable periodic interpolation (4-point cubic, or cubic on a 4x
/// band-limited upsample for InterpMode::spectral).
PhaseSpaceField solve_liouville(const PhaseSpaceField& rho0,
                                const FourierPotential& pot, double t,
                                const FlowOptions& opts = {},
                                InterpMode mode = InterpMode::cubic,
                                FlowCache* cache = nullptr,
                                TransportReport* report = nullptr);

PhaseSpaceField transport_along(const PhaseSpaceField& rho0, const FlowMap& flow,
                                InterpMode mode = InterpMode::cubic,
                                TransportReport* report = nullptr);

/// Liouville solution with the doubly mollified potential V~1 and smoothed
/// initial data (the caller passes W0 already smoothed).
PhaseSpaceField solve_rho1(const PhaseSpaceField& w0_smoothed,
                           const FourierPotential& pot,
                           const SemiclassicalParams& params, double t,
                           const FlowOptions& opts = {},
                           InterpMode mode = InterpMode::cubic,
                           FlowCache* cache = nullptr,
                           TransportReport* report = nullptr);

/// Liouville solution with the true potential and smoothed initial data.
PhaseSpaceField solve_rho2(const PhaseSpaceField& w0_smoothed,
                           const FourierPotential& pot, double t,
                           const FlowOptions& opts = {},
                           InterpMode mode = InterpMode::cubic,
                           FlowCache* cache = nullptr,
                           TransportReport* report = nullptr);

}  // namespace phasespace
