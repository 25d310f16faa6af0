#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "phasespace/fft.hpp"
#include "phasespace/grid.hpp"

namespace phasespace {

/// Real-valued function on the (x,k) grid with a lazily cached spectrum.
class PhaseSpaceField {
  public:
    PhaseSpaceField(GridSpec grid, std::vector<double> values);
    explicit PhaseSpaceField(GridSpec grid);  // zero field

    const GridSpec& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double value(std::size_t flat) const { return values_[flat]; }

    /// Samples of the continuum transform under the e^{-2 pi i zZ} pairing.
    const std::vector<spectral::cplx>& spectrum() const;
    bool has_spectrum() const { return spectrum_.has_value(); }

    double integral() const;  // sum * cell volume
    double l2_norm() const;
    double max_abs() const;
    double min_value() const;

    /// Replace values (drops the spectrum cache).
    void assign(std::vector<double> values);

    static PhaseSpaceField from_spectrum(const GridSpec& grid,
                                         std::vector<spectral::cplx> spectrum,
                                         double* imag_residue = nullptr);

  private:
    GridSpec grid_;
    std::vector<double> values_;
    mutable std::optional<std::vector<spectral::cplx>> spectrum_;
};

/// Complex wavefunction on the x part of a grid.
class Wavefunction {
  public:
    Wavefunction(GridSpec grid, std::vector<spectral::cplx> values);

    const GridSpec& grid() const { return grid_; }
    const std::vector<spectral::cplx>& values() const { return values_; }
    std::vector<spectral::cplx>& values() { return values_; }

    double l2_norm() const;
    void normalize();

  private:
    GridSpec grid_;
    std::vector<spectral::cplx> values_;
};

/// Flat binary snapshot: header (dim, nx, nk, box edges, epsilon, t) then
/// the raw samples.
void write_snapshot(const PhaseSpaceField& field, const std::string& path,
                    double epsilon, double t);
PhaseSpaceField read_snapshot(const std::string& path, double* epsilon = nullptr,
                              double* t = nullptr);

/// One-line CSV summary (t, mass, l2, min, max) appended to `path`.
void append_summary_csv(const PhaseSpaceField& field, const std::string& path,
                        double epsilon, double t, bool write_header);

}  // namespace phasespace
