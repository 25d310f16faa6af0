#include "phasespace/grid.hpp"

#include <cmath>
#include <sstream>

namespace phasespace {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument("GridSpec: " + msg);
}

}  // namespace

GridSpec::GridSpec(int dim, std::vector<double> x_min, std::vector<double> x_max,
                   int nx, std::vector<double> k_min, std::vector<double> k_max,
                   int nk)
    : dim_(dim),
      x_min_(std::move(x_min)),
      x_max_(std::move(x_max)),
      k_min_(std::move(k_min)),
      k_max_(std::move(k_max)),
      nx_(nx),
      nk_(nk) {
    require(dim_ == 1 || dim_ == 2, "dimension must be 1 or 2");
    require(static_cast<int>(x_min_.size()) == dim_ &&
                static_cast<int>(x_max_.size()) == dim_ &&
                static_cast<int>(k_min_.size()) == dim_ &&
                static_cast<int>(k_max_.size()) == dim_,
            "box edge arrays must have length dim");
    require(is_power_of_two(nx_) && is_power_of_two(nk_),
            "nx and nk must be powers of two");
    for (int a = 0; a < dim_; ++a) {
        require(x_max_[a] > x_min_[a] && k_max_[a] > k_min_[a],
                "box edges must be increasing");
        // k spacing must subdivide the reciprocal x-box length so that the
        // position/momentum grids stay consistent under the discrete pairing.
        double ratio = 1.0 / (x_length(a) * dk(a));
        require(std::abs(ratio - std::round(ratio)) < 1e-9 && ratio > 0.5,
                "k spacing must equal 1/(x box length) divided by an integer "
                "refinement factor");
    }
}

GridSpec GridSpec::make_1d(double x_min, double x_max, int nx, double k_min,
                           double k_max, int nk) {
    return GridSpec(1, {x_min}, {x_max}, nx, {k_min}, {k_max}, nk);
}

GridSpec GridSpec::square(int dim, double half_width, int n) {
    std::vector<double> lo(dim, -half_width), hi(dim, half_width);
    return GridSpec(dim, lo, hi, n, lo, hi, n);
}

double GridSpec::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= dx(a) * dk(a);
    return v;
}

double GridSpec::x_cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= dx(a);
    return v;
}

std::size_t GridSpec::size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim_; ++a) s *= static_cast<std::size_t>(nx_);
    for (int a = 0; a < dim_; ++a) s *= static_cast<std::size_t>(nk_);
    return s;
}

std::size_t GridSpec::x_size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim_; ++a) s *= static_cast<std::size_t>(nx_);
    return s;
}

std::vector<int> GridSpec::extents() const {
    std::vector<int> e;
    for (int a = 0; a < dim_; ++a) e.push_back(nx_);
    for (int a = 0; a < dim_; ++a) e.push_back(nk_);
    return e;
}

double GridSpec::boundary_max_rel_axes(const std::vector<double>& values,
                                       int axis_lo, int axis_hi) const {
    const std::vector<int> ext = extents();
    const int rank = static_cast<int>(ext.size());
    double vmax = 0.0, bmax = 0.0;
    std::vector<int> idx(rank, 0);
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        double av = std::abs(values[flat]);
        if (av > vmax) vmax = av;
        bool boundary = false;
        for (int a = axis_lo; a < axis_hi; ++a)
            if (idx[a] == 0 || idx[a] == ext[a] - 1) boundary = true;
        if (boundary && av > bmax) bmax = av;
        for (int a = rank - 1; a >= 0; --a) {
            if (++idx[a] < ext[a]) break;
            idx[a] = 0;
        }
    }
    return vmax > 0.0 ? bmax / vmax : 0.0;
}

double GridSpec::boundary_max_rel(const std::vector<double>& values) const {
    return boundary_max_rel_axes(values, 0, 2 * dim_);
}

bool GridSpec::boundary_decay_ok(const std::vector<double>& values,
                                 double floor_rel) const {
    return boundary_max_rel(values) <= floor_rel;
}

bool GridSpec::operator==(const GridSpec& o) const {
    return dim_ == o.dim_ && nx_ == o.nx_ && nk_ == o.nk_ && x_min_ == o.x_min_ &&
           x_max_ == o.x_max_ && k_min_ == o.k_min_ && k_max_ == o.k_max_;
}

std::string GridSpec::describe() const {
    std::ostringstream os;
    os << "n=" << dim_ << " nx=" << nx_ << " nk=" << nk_;
    for (int a = 0; a < dim_; ++a)
        os << " x" << a << "=[" << x_min_[a] << "," << x_max_[a] << ")"
           << " k" << a << "=[" << k_min_[a] << "," << k_max_[a] << ")";
    return os.str();
}

}  // namespace phasespace
