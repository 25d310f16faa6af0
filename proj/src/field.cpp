#include "phasespace/field.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace phasespace {

PhaseSpaceField::PhaseSpaceField(GridSpec grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("PhaseSpaceField: value count does not match grid");
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("PhaseSpaceField: non-finite sample");
}

PhaseSpaceField::PhaseSpaceField(GridSpec grid)
    : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

const std::vector<spectral::cplx>& PhaseSpaceField::spectrum() const {
    if (!spectrum_)
        spectrum_ = spectral::forward(spectral::phase_axes(grid_), values_);
    return *spectrum_;
}

double PhaseSpaceField::integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.cell_volume();
}

double PhaseSpaceField::l2_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s * grid_.cell_volume());
}

double PhaseSpaceField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double PhaseSpaceField::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : values_) m = std::min(m, v);
    return m;
}

void PhaseSpaceField::assign(std::vector<double> values) {
    if (values.size() != grid_.size())
        throw std::invalid_argument("PhaseSpaceField::assign: size mismatch");
    values_ = std::move(values);
    spectrum_.reset();
}

PhaseSpaceField PhaseSpaceField::from_spectrum(const GridSpec& grid,
                                               std::vector<spectral::cplx> spectrum,
                                               double* imag_residue) {
    auto vals = spectral::inverse_real(spectral::phase_axes(grid),
                                       std::move(spectrum), imag_residue);
    return PhaseSpaceField(grid, std::move(vals));
}

Wavefunction::Wavefunction(GridSpec grid, std::vector<spectral::cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.x_size())
        throw std::invalid_argument("Wavefunction: value count does not match x grid");
}

double Wavefunction::l2_norm() const {
    double s = 0.0;
    for (const auto& v : values_) s += std::norm(v);
    return std::sqrt(s * grid_.x_cell_volume());
}

void Wavefunction::normalize() {
    double n = l2_norm();
    if (n <= 0.0) throw std::domain_error("Wavefunction::normalize: zero norm");
    for (auto& v : values_) v /= n;
}

namespace {
constexpr std::uint64_t kSnapshotMagic = 0x50535053'4e415031ull;  // "PSPSNAP1"
}

void write_snapshot(const PhaseSpaceField& field, const std::string& path,
                    double epsilon, double t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_snapshot: cannot open " + path);
    const GridSpec& g = field.grid();
    std::uint64_t magic = kSnapshotMagic;
    std::int32_t dim = g.dim(), nx = g.nx(), nk = g.nk();
    os.write(reinterpret_cast<const char*>(&magic), sizeof magic);
    os.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    os.write(reinterpret_cast<const char*>(&nx), sizeof nx);
    os.write(reinterpret_cast<const char*>(&nk), sizeof nk);
    for (int a = 0; a < dim; ++a) {
        double lo = g.x_min(a), hi = g.x_max(a);
        os.write(reinterpret_cast<const char*>(&lo), sizeof lo);
        os.write(reinterpret_cast<const char*>(&hi), sizeof hi);
    }
    for (int a = 0; a < dim; ++a) {
        double lo = g.k_min(a), hi = g.k_max(a);
        os.write(reinterpret_cast<const char*>(&lo), sizeof lo);
        os.write(reinterpret_cast<const char*>(&hi), sizeof hi);
    }
    os.write(reinterpret_cast<const char*>(&epsilon), sizeof epsilon);
    os.write(reinterpret_cast<const char*>(&t), sizeof t);
    os.write(reinterpret_cast<const char*>(field.values().data()),
             static_cast<std::streamsize>(field.values().size() * sizeof(double)));
    if (!os) throw std::runtime_error("write_snapshot: short write to " + path);
}

PhaseSpaceField read_snapshot(const std::string& path, double* epsilon,
                              double* t) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_snapshot: cannot open " + path);
    std::uint64_t magic = 0;
    std::int32_t dim = 0, nx = 0, nk = 0;
    is.read(reinterpret_cast<char*>(&magic), sizeof magic);
    if (magic != kSnapshotMagic)
        throw std::runtime_error("read_snapshot: bad magic in " + path);
    is.read(reinterpret_cast<char*>(&dim), sizeof dim);
    is.read(reinterpret_cast<char*>(&nx), sizeof nx);
    is.read(reinterpret_cast<char*>(&nk), sizeof nk);
    std::vector<double> xlo(dim), xhi(dim), klo(dim), khi(dim);
    for (int a = 0; a < dim; ++a) {
        is.read(reinterpret_cast<char*>(&xlo[a]), sizeof(double));
        is.read(reinterpret_cast<char*>(&xhi[a]), sizeof(double));
    }
    for (int a = 0; a < dim; ++a) {
        is.read(reinterpret_cast<char*>(&klo[a]), sizeof(double));
        is.read(reinterpret_cast<char*>(&khi[a]), sizeof(double));
    }
    double eps = 0.0, tt = 0.0;
    is.read(reinterpret_cast<char*>(&eps), sizeof eps);
    is.read(reinterpret_cast<char*>(&tt), sizeof tt);
    GridSpec g(dim, xlo, xhi, nx, klo, khi, nk);
    std::vector<double> vals(g.size());
    is.read(reinterpret_cast<char*>(vals.data()),
            static_cast<std::streamsize>(vals.size() * sizeof(double)));
    if (!is) throw std::runtime_error("read_snapshot: truncated file " + path);
    if (epsilon) *epsilon = eps;
    if (t) *t = tt;
    return PhaseSpaceField(std::move(g), std::move(vals));
}

void append_summary_csv(const PhaseSpaceField& field, const std::string& path,
                        double epsilon, double t, bool write_header) {
    std::ofstream os(path, std::ios::app);
    if (!os) throw std::runtime_error("append_summary_csv: cannot open " + path);
    if (write_header) os << "t,epsilon,mass,l2,min,max\n";
    char line[256];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t,
                  epsilon, field.integral(), field.l2_norm(), field.min_value(),
                  field.max_abs());
    os << line;
}

}  // namespace phasespace
