#pragma once

#include <stdexcept>

namespace phasespace {

/// Mollification scale eta(n, eps, sigma_x, sigma_k):
///   eps * (pi/2 * max((4n-1) sx^2, 4n/sk^2 - sx^2) + 1).
double derive_eta(int dim, double epsilon, double sigma_x, double sigma_k);

/// Semiclassical parameter set. eta and eta_prime are derived on
/// construction; eta_prime = eta + eps*pi*sx^2/2.
struct SemiclassicalParams {
    int dim = 1;
    double epsilon = 0.0;
    double sigma_x = 1.0;
    double sigma_k = 1.0;
    double eta = 0.0;
    double eta_prime = 0.0;

    static SemiclassicalParams make(int dim, double epsilon, double sigma_x,
                                    double sigma_k);
};

}  // namespace phasespace
