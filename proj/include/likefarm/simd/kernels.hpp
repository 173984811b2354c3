#pragma once

// Dense double-precision inner loops with a scalar reference implementation
// and vectorised variants chosen at runtime.
//
// Every variant computes the same mathematical quantity; results may differ
// from the scalar reference in the last bits because of reassociation and
// fused multiply-add. The dispatch choice is made once per process.

#include <cstddef>
#include <span>
#include <string_view>

namespace likefarm::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// out[r] = |x - rows[r]|^2 for `n_rows` contiguous rows of length `dim`.
  void (*squared_distances)(const double* x, const double* rows, std::size_t n_rows,
                            std::size_t dim, double* out);
};

const KernelTable& scalar_kernels();

/// True when the variant is compiled in and the CPU can run it.
bool isa_supported(Isa isa);

/// Throws InvalidArgument for unsupported variants.
const KernelTable& kernels_for(Isa isa);

/// Best supported variant. The LIKEFARM_SIMD environment variable
/// ("scalar", "avx2", "neon") forces a choice when it is supported.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace likefarm::simd
