#include "phasespace/params.hpp"

#include <algorithm>
#include <cmath>

namespace phasespace {

double derive_eta(int dim, double epsilon, double sigma_x, double sigma_k) {
    if (dim != 1 && dim != 2)
        throw std::domain_error("derive_eta: dimension must be 1 or 2");
    if (!(epsilon > 0.0) || !(sigma_x > 0.0) || !(sigma_k > 0.0))
        throw std::domain_error("derive_eta: epsilon, sigma_x, sigma_k must be positive");
    const double pi = M_PI;
    double a = (4.0 * dim - 1.0) * sigma_x * sigma_x;
    double b = 4.0 * dim / (sigma_k * sigma_k) - sigma_x * sigma_x;
    return epsilon * (0.5 * pi * std::max(a, b) + 1.0);
}

SemiclassicalParams SemiclassicalParams::make(int dim, double epsilon,
                                              double sigma_x, double sigma_k) {
    SemiclassicalParams p;
    p.dim = dim;
    p.epsilon = epsilon;
    p.sigma_x = sigma_x;
    p.sigma_k = sigma_k;
    p.eta = derive_eta(dim, epsilon, sigma_x, sigma_k);
    p.eta_prime = p.eta + epsilon * M_PI * sigma_x * sigma_x / 2.0;
    return p;
}

}  // namespace phasespace
