#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "morselab/simd/kernels.hpp"

using namespace morselab::simd;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Lengths around the vector width and its unrolled multiple, plus a large one.
const std::vector<std::size_t> kLengths = {0, 1, 3, 4, 5, 7, 8, 9, 15, 16, 17, 63, 1000};

}  // namespace

TEST_CASE("the active table is one of the known tables") {
  const auto& active = active_kernels();
  CHECK((active.name == "scalar" || active.name == "avx2"));
  CHECK(scalar_kernels().name == "scalar");
  CHECK(is_small_integer_exponent(2.0));
  CHECK_FALSE(is_small_integer_exponent(2.5));
  CHECK_FALSE(is_small_integer_exponent(0.0));
}

TEST_CASE("scalar reference kernels against plain loops") {
  std::mt19937_64 rng(1);
  const auto& s = scalar_kernels();
  const auto a = random_vector(rng, 37), b = random_vector(rng, 37);
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  CHECK(s.dot(a.data(), b.data(), a.size()) == doctest::Approx(dot).epsilon(1e-14));

  std::vector<double> pp(37), p1(37), p2(37);
  std::vector<double> sq(37);
  for (std::size_t i = 0; i < 37; ++i) sq[i] = a[i] * a[i];
  for (double p : {1.0, 2.0, 2.5, 3.0}) {
    s.cell_weights(sq.data(), p, pp.data(), p1.data(), p2.data(), sq.size());
    for (std::size_t i = 0; i < sq.size(); ++i) {
      CHECK(pp[i] == doctest::Approx(std::pow(1.0 + sq[i], p)).epsilon(1e-14));
      CHECK(p1[i] == doctest::Approx(std::pow(1.0 + sq[i], p - 1.0)).epsilon(1e-14));
      CHECK(p2[i] == doctest::Approx(std::pow(1.0 + sq[i], p - 2.0)).epsilon(1e-14));
    }
  }
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const KernelTable* fast = avx2_kernels();
  if (fast == nullptr) {
    MESSAGE("AVX2+FMA not available on this CPU; equivalence not exercised");
    return;
  }
  const auto& ref = scalar_kernels();
  std::mt19937_64 rng(7);
  for (std::size_t n : kLengths) {
    const auto a = random_vector(rng, n, 3.0), b = random_vector(rng, n, 3.0);
    const double scale = 17.0;

    // Elementwise kernels are single-rounding per entry: bitwise identical.
    std::vector<double> r(n), v(n);
    ref.scaled_difference(a.data(), b.data(), scale, r.data(), n);
    fast->scaled_difference(a.data(), b.data(), scale, v.data(), n);
    CHECK(bitwise_equal(r, v));

    r = b;
    v = b;
    ref.accumulate_difference(a.data(), b.data(), scale, r.data(), n);
    fast->accumulate_difference(a.data(), b.data(), scale, v.data(), n);
    CHECK(bitwise_equal(r, v));

    ref.pair_average(a.data(), b.data(), r.data(), n);
    fast->pair_average(a.data(), b.data(), v.data(), n);
    CHECK(bitwise_equal(r, v));

    ref.multiply(a.data(), b.data(), r.data(), n);
    fast->multiply(a.data(), b.data(), v.data(), n);
    CHECK(bitwise_equal(r, v));

    ref.squared_norm(a.data(), b.data(), r.data(), n);
    fast->squared_norm(a.data(), b.data(), v.data(), n);
    CHECK(bitwise_equal(r, v));
    ref.squared_norm(a.data(), nullptr, r.data(), n);
    fast->squared_norm(a.data(), nullptr, v.data(), n);
    CHECK(bitwise_equal(r, v));

    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = a[i] * a[i];
    for (double p : {1.0, 2.0, 3.0, 4.0, 2.5}) {
      std::vector<double> rp(n), r1(n), r2(n), vp(n), v1(n), v2(n);
      ref.cell_weights(s.data(), p, rp.data(), r1.data(), r2.data(), n);
      fast->cell_weights(s.data(), p, vp.data(), v1.data(), v2.data(), n);
      CHECK(bitwise_equal(rp, vp));
      CHECK(bitwise_equal(r1, v1));
      CHECK(bitwise_equal(r2, v2));
    }

    // Reductions and fused updates differ by reassociation / FMA rounding only.
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += std::abs(a[i] * b[i]);
    const double eps = 4.0 * n * 2.2e-16 * norm + 1e-300;
    CHECK(std::abs(ref.dot(a.data(), b.data(), n) - fast->dot(a.data(), b.data(), n)) <= eps);

    r = b;
    v = b;
    ref.axpy(-0.7, a.data(), r.data(), n);
    fast->axpy(-0.7, a.data(), v.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(r[i] - v[i]) <= 2.2e-16 * (std::abs(b[i]) + 0.7 * std::abs(a[i])));
    }
  }
}
