#include <random>
#include <vector>

#include "doctest.h"
#include "hkt/simd/kernels.hpp"

using hkt::simd::cdouble;

namespace {

std::vector<cdouble> random_array(size_t len, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  std::vector<cdouble> v(len);
  for (auto& x : v) x = {dist(rng), dist(rng)};
  return v;
}

double max_diff(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("dispatched kernels match the scalar reference") {
  const auto& ref = hkt::simd::scalar_kernels();
  const auto& fast = hkt::simd::kernels();
  INFO("dispatched: ", fast.name);
  std::mt19937_64 rng(101);

  // odd lengths exercise the vector tail
  for (size_t len : {1u, 2u, 3u, 7u, 64u, 257u}) {
    auto a = random_array(len, rng);
    auto b = random_array(len, rng);
    auto out1 = random_array(len, rng);
    auto out2 = out1;
    ref.cmul_acc(out1.data(), a.data(), b.data(), -1.75, len);
    fast.cmul_acc(out2.data(), a.data(), b.data(), -1.75, len);
    CHECK(max_diff(out1, out2) < 1e-13);

    const cdouble s{0.3, -1.1};
    auto y1 = random_array(len, rng);
    auto y2 = y1;
    ref.axpy(y1.data(), s, a.data(), len);
    fast.axpy(y2.data(), s, a.data(), len);
    CHECK(max_diff(y1, y2) < 1e-13);

    auto c1 = a;
    auto c2 = a;
    ref.scale(c1.data(), s, len);
    fast.scale(c2.data(), s, len);
    CHECK(max_diff(c1, c2) < 1e-13);

    CHECK(std::abs(ref.sum(a.data(), len) - fast.sum(a.data(), len)) < 1e-11);
    CHECK(ref.sum_abs2(a.data(), len) ==
          doctest::Approx(fast.sum_abs2(a.data(), len)).epsilon(1e-12));
  }
}

TEST_CASE("kernel arithmetic against direct evaluation") {
  const auto& k = hkt::simd::kernels();
  std::vector<cdouble> a{{1, 2}, {3, -1}};
  std::vector<cdouble> b{{0, 1}, {2, 2}};
  std::vector<cdouble> out{{0, 0}, {1, 0}};
  k.cmul_acc(out.data(), a.data(), b.data(), 2.0, 2);
  CHECK(out[0] == cdouble(-4, 2));   // 2 * (1+2i)(i)
  CHECK(out[1] == cdouble(17, 8));   // 1 + 2 * (3-i)(2+2i)
  CHECK(k.sum(a.data(), 2) == cdouble(4, 1));
  CHECK(k.sum_abs2(a.data(), 2) == doctest::Approx(15.0));
}
