#pragma once

// Data-parallel inner loops used by agent geometry and feature normalization.
//
// Every kernel has a scalar reference and vector variants (AVX2 on x86-64,
// NEON on AArch64). The reference accumulates in four interleaved lanes and
// folds them as (l0 + l2) + (l1 + l3), which is exactly the order a 4-wide
// vector accumulator produces, so all backends are bit-identical. That keeps
// ledgers byte-identical regardless of which backend the host selects.

#include <cstddef>
#include <span>
#include <string_view>

namespace synmarket::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend backend);

struct KernelTable {
    Backend backend;
    // sum_i (a_i - b_i)^2
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    // out_i = (a_i - b_i)^2
    void (*squared_deviations)(const double* a, const double* b, double* out, std::size_t n);
    // out_i = clamp((v_i - lo_i) / width_i, 0, 1)
    void (*unit_affine)(const double* v, const double* lo, const double* width, double* out,
                        std::size_t n);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Best available table, chosen once at first use. Setting SYNMARKET_KERNELS=scalar
// in the environment pins the reference implementation.
const KernelTable& active();
Backend active_backend();

double squared_distance(std::span<const double> a, std::span<const double> b);
void squared_deviations(std::span<const double> a, std::span<const double> b, std::span<double> out);
void unit_affine(std::span<const double> v, std::span<const double> lo, std::span<const double> width,
                 std::span<double> out);

}  // namespace synmarket::kernels
