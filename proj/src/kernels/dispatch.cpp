#include "synmarket/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace synmarket::kernels {
namespace {

const KernelTable& select() {
    if (const char* pin = std::getenv("SYNMARKET_KERNELS"); pin != nullptr && std::string(pin) == "scalar") {
        return scalar_kernels();
    }
    if (const KernelTable* t = avx2_kernels()) return *t;
    if (const KernelTable* t = neon_kernels()) return *t;
    return scalar_kernels();
}

void check_same_size(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("kernel operands differ in length");
}

}  // namespace

std::string_view backend_name(Backend backend) {
    switch (backend) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

Backend active_backend() { return active().backend; }

double squared_distance(std::span<const double> a, std::span<const double> b) {
    check_same_size(a.size(), b.size());
    return active().squared_distance(a.data(), b.data(), a.size());
}

void squared_deviations(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    check_same_size(a.size(), b.size());
    check_same_size(a.size(), out.size());
    active().squared_deviations(a.data(), b.data(), out.data(), a.size());
}

void unit_affine(std::span<const double> v, std::span<const double> lo, std::span<const double> width,
                 std::span<double> out) {
    check_same_size(v.size(), lo.size());
    check_same_size(v.size(), width.size());
    check_same_size(v.size(), out.size());
    active().unit_affine(v.data(), lo.data(), width.data(), out.data(), v.size());
}

}  // namespace synmarket::kernels
