#include "phasespace/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace phasespace::spectral {

namespace {

std::mutex plan_mutex;
bool threads_ready = false;

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

// Cached plans. All plans are created FFTW_ESTIMATE | FFTW_UNALIGNED so that
// repeated runs pick identical algorithms and any buffer can be used.
struct AxisPlanKey {
    int n, howmany, stride, dist, sign;
    bool operator<(const AxisPlanKey& o) const {
        return std::tie(n, howmany, stride, dist, sign) <
               std::tie(o.n, o.howmany, o.stride, o.dist, o.sign);
    }
};
std::map<AxisPlanKey, fftw_plan> axis_plans;

struct FullPlanKey {
    std::vector<int> ext;
    int sign;
    bool operator<(const FullPlanKey& o) const {
        return std::tie(ext, sign) < std::tie(o.ext, o.sign);
    }
};
std::map<FullPlanKey, fftw_plan> full_plans;

fftw_plan axis_plan(int n, int howmany, int stride, int dist, int sign,
                    cplx* data) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    AxisPlanKey key{n, howmany, stride, dist, sign};
    auto it = axis_plans.find(key);
    if (it != axis_plans.end()) return it->second;
    fftw_plan p = fftw_plan_many_dft(1, &n, howmany, as_fftw(data), nullptr,
                                     stride, dist, as_fftw(data), nullptr,
                                     stride, dist, sign,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw_plan_many_dft failed");
    axis_plans.emplace(key, p);
    return p;
}

fftw_plan full_plan(const std::vector<int>& ext, int sign, cplx* data) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    FullPlanKey key{ext, sign};
    auto it = full_plans.find(key);
    if (it != full_plans.end()) return it->second;
    fftw_plan p =
        fftw_plan_dft(static_cast<int>(ext.size()), ext.data(), as_fftw(data),
                      as_fftw(data), sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw_plan_dft failed");
    full_plans.emplace(key, p);
    return p;
}

}  // namespace

void init_threads(int nthreads) {
#ifdef PHASESPACE_HAVE_FFTW_OMP
    std::lock_guard<std::mutex> lock(plan_mutex);
    if (!threads_ready) {
        fftw_init_threads();
        threads_ready = true;
    }
    fftw_plan_with_nthreads(nthreads > 0 ? nthreads : 1);
#else
    (void)nthreads;
    (void)threads_ready;
#endif
}

void transform_axis(cplx* data, const std::vector<int>& extents, int axis,
                    int sign) {
    const int rank = static_cast<int>(extents.size());
    if (axis < 0 || axis >= rank) throw std::invalid_argument("bad fft axis");
    int n = extents[axis];
    std::size_t inner = 1, outer = 1;
    for (int a = axis + 1; a < rank; ++a) inner *= extents[a];
    for (int a = 0; a < axis; ++a) outer *= extents[a];
    if (inner == 1) {
        // Last axis: contiguous transforms, one batched plan over all rows.
        fftw_plan p = axis_plan(n, static_cast<int>(outer), 1, n, sign, data);
        fftw_execute_dft(p, as_fftw(data), as_fftw(data));
        return;
    }
    fftw_plan p = axis_plan(n, static_cast<int>(inner),
                            static_cast<int>(inner), 1, sign, data);
    const std::size_t block = static_cast<std::size_t>(n) * inner;
    for (std::size_t b = 0; b < outer; ++b)
        fftw_execute_dft(p, as_fftw(data + b * block), as_fftw(data + b * block));
}

void transform_all(cplx* data, const std::vector<int>& extents, int sign) {
    fftw_plan p = full_plan(extents, sign, data);
    fftw_execute_dft(p, as_fftw(data), as_fftw(data));
}

std::vector<DualAxis> phase_axes(const GridSpec& grid) {
    std::vector<DualAxis> axes;
    for (int a = 0; a < grid.dim(); ++a)
        axes.push_back({grid.x_min(a), grid.dx(a), grid.nx()});
    for (int a = 0; a < grid.dim(); ++a)
        axes.push_back({grid.k_min(a), grid.dk(a), grid.nk()});
    return axes;
}

std::vector<DualAxis> x_axes(const GridSpec& grid) {
    std::vector<DualAxis> axes;
    for (int a = 0; a < grid.dim(); ++a)
        axes.push_back({grid.x_min(a), grid.dx(a), grid.nx()});
    return axes;
}

namespace {

std::vector<int> extents_of(const std::vector<DualAxis>& axes) {
    std::vector<int> e;
    for (const auto& ax : axes) e.push_back(ax.count);
    return e;
}

// Multiply by exp(sign * 2 pi i * sum_a origin_a * freq_a(index)),
// separable across axes.
void apply_origin_phase(std::vector<cplx>& data,
                        const std::vector<DualAxis>& axes, double sign) {
    const int rank = static_cast<int>(axes.size());
    std::vector<std::vector<cplx>> phase(rank);
    for (int a = 0; a < rank; ++a) {
        phase[a].resize(axes[a].count);
        for (int j = 0; j < axes[a].count; ++j) {
            double arg = sign * 2.0 * M_PI * axes[a].origin * axes[a].freq(j);
            phase[a][j] = cplx(std::cos(arg), std::sin(arg));
        }
    }
    std::vector<int> idx(rank, 0);
    for (std::size_t flat = 0; flat < data.size(); ++flat) {
        cplx f(1.0, 0.0);
        for (int a = 0; a < rank; ++a) f *= phase[a][idx[a]];
        data[flat] *= f;
        for (int a = rank - 1; a >= 0; --a) {
            if (++idx[a] < axes[a].count) break;
            idx[a] = 0;
        }
    }
}

}  // namespace

std::vector<cplx> forward(const std::vector<DualAxis>& axes,
                          const std::vector<cplx>& values) {
    std::vector<cplx> out = values;
    transform_all(out.data(), extents_of(axes), FFTW_FORWARD);
    double quad = 1.0;
    for (const auto& ax : axes) quad *= ax.spacing;
    for (auto& v : out) v *= quad;
    apply_origin_phase(out, axes, -1.0);
    return out;
}

std::vector<cplx> forward(const std::vector<DualAxis>& axes,
                          const std::vector<double>& values) {
    std::vector<cplx> buf(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) buf[i] = values[i];
    std::vector<cplx> out = std::move(buf);
    transform_all(out.data(), extents_of(axes), FFTW_FORWARD);
    double quad = 1.0;
    for (const auto& ax : axes) quad *= ax.spacing;
    for (auto& v : out) v *= quad;
    apply_origin_phase(out, axes, -1.0);
    return out;
}

std::vector<cplx> inverse(const std::vector<DualAxis>& axes,
                          std::vector<cplx> spectrum) {
    apply_origin_phase(spectrum, axes, +1.0);
    transform_all(spectrum.data(), extents_of(axes), FFTW_BACKWARD);
    double quad = 1.0;
    for (const auto& ax : axes) quad *= ax.dual_spacing();
    for (auto& v : spectrum) v *= quad;
    return spectrum;
}

std::vector<double> inverse_real(const std::vector<DualAxis>& axes,
                                 std::vector<cplx> spectrum,
                                 double* imag_residue) {
    std::vector<cplx> full = inverse(axes, std::move(spectrum));
    std::vector<double> out(full.size());
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i) {
        out[i] = full[i].real();
        worst = std::max(worst, std::abs(full[i].imag()));
        scale = std::max(scale, std::abs(full[i].real()));
    }
    if (imag_residue) *imag_residue = scale > 0.0 ? worst / scale : worst;
    return out;
}

double spectrum_l2(const std::vector<DualAxis>& axes,
                   const std::vector<cplx>& spectrum) {
    double quad = 1.0;
    for (const auto& ax : axes) quad *= ax.dual_spacing();
    double s = 0.0;
    for (const auto& v : spectrum) s += std::norm(v);
    return std::sqrt(s * quad);
}

}  // namespace phasespace::spectral
