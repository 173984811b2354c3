#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"
#include "likefarm/error.hpp"

namespace likefarm::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if LIKEFARM_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
      return LIKEFARM_HAVE_NEON != 0;
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa))
    throw InvalidArgument("SIMD variant " + std::string(to_string(isa)) + " is not supported here");
  switch (isa) {
#if LIKEFARM_HAVE_AVX2
    case Isa::Avx2:
      return detail::avx2_table();
#endif
#if LIKEFARM_HAVE_NEON
    case Isa::Neon:
      return detail::neon_table();
#endif
    default:
      return scalar_kernels();
  }
}

namespace {

const KernelTable& select() {
  if (const char* forced = std::getenv("LIKEFARM_SIMD")) {
    const std::string_view name(forced);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (name == to_string(isa) && isa_supported(isa)) return kernels_for(isa);
    }
  }
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (isa_supported(isa)) return kernels_for(isa);
  }
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace likefarm::simd
