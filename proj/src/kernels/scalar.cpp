#include "synmarket/kernels.hpp"

namespace synmarket::kernels {
namespace {

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        for (std::size_t l = 0; l < 4; ++l) {
            const double d = a[i + l] - b[i + l];
            lane[l] += d * d;
        }
    }
    // tail goes into the leading lanes, same as the masked vector load
    for (std::size_t l = 0; i + l < n; ++l) {
        const double d = a[i + l] - b[i + l];
        lane[l] += d * d;
    }
    return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

void squared_deviations_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        out[i] = d * d;
    }
}

void unit_affine_scalar(const double* v, const double* lo, const double* width, double* out,
                        std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        // same select semantics as MAXPD/MINPD, including signed zero and NaN
        const double t = (v[i] - lo[i]) / width[i];
        const double c = t > 0.0 ? t : 0.0;
        out[i] = c < 1.0 ? c : 1.0;
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Backend::Scalar, &squared_distance_scalar,
                                   &squared_deviations_scalar, &unit_affine_scalar};
    return table;
}

}  // namespace synmarket::kernels
