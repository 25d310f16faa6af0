#pragma once

#include <complex>
#include <vector>

#include "phasespace/grid.hpp"

namespace phasespace::spectral {

using cplx = std::complex<double>;

/// Storage index -> signed integer frequency (FFTW layout, Nyquist negative).
inline int wrap_index(int j, int n) { return 2 * j < n ? j : j - n; }

/// Set FFTW thread count (call once, before first transform).
void init_threads(int nthreads);

/// Raw batched DFT along one axis of a row-major array with the given
/// extents. sign is FFTW_FORWARD (-1) or FFTW_BACKWARD (+1); no scaling.
void transform_axis(cplx* data, const std::vector<int>& extents, int axis,
                    int sign);

/// Full-rank DFT over all axes (no scaling, no phases).
void transform_all(cplx* data, const std::vector<int>& extents, int sign);

/// One axis of the continuum pairing: frequencies, spacings.
struct DualAxis {
    double origin;   // coordinate of storage index 0 on the primal axis
    double spacing;  // primal spacing d
    int count;       // N
    double dual_spacing() const { return 1.0 / (spacing * count); }
    double freq(int j) const { return wrap_index(j, count) * dual_spacing(); }
};

std::vector<DualAxis> phase_axes(const GridSpec& grid);  // x axes then k axes
std::vector<DualAxis> x_axes(const GridSpec& grid);

/// Discrete realization of f_hat(Z) = integral e^{-2 pi i z.Z} f(z) dz over
/// all axes, with grid quadrature weights and box-origin phases included.
/// Output is laid out like the input with FFTW frequency ordering.
std::vector<cplx> forward(const std::vector<DualAxis>& axes,
                          const std::vector<cplx>& values);
std::vector<cplx> forward(const std::vector<DualAxis>& axes,
                          const std::vector<double>& values);

/// Inverse of forward(); exact round trip up to rounding.
std::vector<cplx> inverse(const std::vector<DualAxis>& axes,
                          std::vector<cplx> spectrum);

/// Real part of inverse() with the largest |imag| residue reported.
std::vector<double> inverse_real(const std::vector<DualAxis>& axes,
                                 std::vector<cplx> spectrum,
                                 double* imag_residue = nullptr);

/// l2 norm of a spectrum under the dual quadrature (Parseval partner).
double spectrum_l2(const std::vector<DualAxis>& axes,
                   const std::vector<cplx>& spectrum);

}  // namespace phasespace::spectral
