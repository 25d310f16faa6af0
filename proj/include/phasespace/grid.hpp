#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasespace {

/// Discretization of the (x,k) phase space on a periodic torus.
///
/// The x box is [x_min, x_max) per axis with nx points, likewise for k.
/// Fields are stored row-major, x axes first: for dim()==1 the flat index
/// is ix*nk + ik; for dim()==2 it is ((ix0*nx + ix1)*nk + ik0)*nk + ik1.
class GridSpec {
  public:
    GridSpec(int dim, std::vector<double> x_min, std::vector<double> x_max,
             int nx, std::vector<double> k_min, std::vector<double> k_max,
             int nk);

    /// 1D shorthand.
    static GridSpec make_1d(double x_min, double x_max, int nx, double k_min,
                            double k_max, int nk);
    /// Symmetric box [-h,h] in every x and k axis.
    static GridSpec square(int dim, double half_width, int n);

    int dim() const { return dim_; }
    int nx() const { return nx_; }
    int nk() const { return nk_; }

    double x_min(int axis) const { return x_min_[axis]; }
    double x_max(int axis) const { return x_max_[axis]; }
    double k_min(int axis) const { return k_min_[axis]; }
    double k_max(int axis) const { return k_max_[axis]; }
    double x_length(int axis) const { return x_max_[axis] - x_min_[axis]; }
    double k_length(int axis) const { return k_max_[axis] - k_min_[axis]; }
    double dx(int axis) const { return x_length(axis) / nx_; }
    double dk(int axis) const { return k_length(axis) / nk_; }

    double x_coord(int axis, int i) const { return x_min_[axis] + i * dx(axis); }
    double k_coord(int axis, int j) const { return k_min_[axis] + j * dk(axis); }

    /// Quadrature weight of one phase-space cell.
    double cell_volume() const;
    /// Quadrature weight of one x cell (position-only fields).
    double x_cell_volume() const;

    std::size_t size() const;    // total phase-space nodes
    std::size_t x_size() const;  // nodes of the x grid alone

    /// Flat extents ordered [nx]*dim + [nk]*dim.
    std::vector<int> extents() const;

    /// True if the outermost cell shells carry less than `floor` of the
    /// field's max magnitude (torus truncation sanity).
    bool boundary_decay_ok(const std::vector<double>& values,
                           double floor_rel = 1e-12) const;
    double boundary_max_rel(const std::vector<double>& values) const;
    /// Same measure restricted to the flat axes in [axis_lo, axis_hi).
    double boundary_max_rel_axes(const std::vector<double>& values, int axis_lo,
                                 int axis_hi) const;

    bool operator==(const GridSpec& o) const;
    bool operator!=(const GridSpec& o) const { return !(*this == o); }

    std::string describe() const;

  private:
    int dim_;
    std::vector<double> x_min_, x_max_, k_min_, k_max_;
    int nx_, nk_;
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace phasespace
