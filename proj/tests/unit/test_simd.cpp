#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "likefarm/error.hpp"
#include "likefarm/simd/kernels.hpp"

using namespace likefarm;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

void check_close(double a, double b, double scale) {
  CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, scale));
}

}  // namespace

TEST_CASE("scalar kernels match their definitions") {
  const auto& k = simd::scalar_kernels();
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, -5, 6};
  CHECK(k.dot(a.data(), b.data(), 3) == 12.0);
  CHECK(k.squared_distance(a.data(), b.data(), 3) == 9.0 + 49.0 + 9.0);
  std::vector<double> y{1, 1, 1};
  k.axpy(2.0, a.data(), y.data(), 3);
  CHECK(y == std::vector<double>{3, 5, 7});
  std::vector<double> out(2);
  const std::vector<double> rows{1, 2, 3, 4, -5, 6};
  k.squared_distances(a.data(), rows.data(), 2, 3, out.data());
  CHECK(out == std::vector<double>{0.0, 67.0});
}

TEST_CASE("every supported variant agrees with the scalar reference") {
  const auto& ref = simd::scalar_kernels();
  std::mt19937_64 rng(11);
  for (simd::Isa isa : {simd::Isa::Avx2, simd::Isa::Neon}) {
    if (!simd::isa_supported(isa)) {
      CHECK_THROWS_AS(simd::kernels_for(isa), InvalidArgument);
      continue;
    }
    const auto& k = simd::kernels_for(isa);
    CAPTURE(simd::to_string(isa));
    for (std::size_t n = 0; n <= 70; ++n) {
      const auto a = random_vector(rng, n);
      const auto b = random_vector(rng, n);
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]) + (a[i] - b[i]) * (a[i] - b[i]);
      check_close(k.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), scale);
      check_close(k.squared_distance(a.data(), b.data(), n), ref.squared_distance(a.data(), b.data(), n), scale);

      auto y1 = random_vector(rng, n);
      auto y2 = y1;
      k.axpy(-0.75, a.data(), y1.data(), n);
      ref.axpy(-0.75, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) check_close(y1[i], y2[i], std::abs(y2[i]) + std::abs(a[i]));

      const std::size_t rows = 5;
      const auto block = random_vector(rng, rows * n);
      std::vector<double> o1(rows), o2(rows);
      k.squared_distances(a.data(), block.data(), rows, n, o1.data());
      ref.squared_distances(a.data(), block.data(), rows, n, o2.data());
      for (std::size_t r = 0; r < rows; ++r) check_close(o1[r], o2[r], o2[r]);
    }
  }
}

TEST_CASE("the active table is a supported variant") {
  const auto& k = simd::active();
  CHECK(simd::isa_supported(k.isa));
  CHECK(&simd::active() == &k);
}
