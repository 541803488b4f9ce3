#include <doctest.h>

#include <cmath>

#include "attnloc/kernels.hpp"
#include "attnloc/rng.hpp"

using namespace attnloc;

namespace {

std::vector<double> rand_vec(Rng& r, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = r.uniform(-2, 2);
  return v;
}

void close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= tol * (1 + std::abs(b[i])));
}

void check_against_scalar(const kernels::Table& t) {
  const auto& s = kernels::scalar_table();
  Rng r(17);
  // Sizes around the vector widths and odd tails.
  for (std::size_t rows : {1u, 3u, 4u, 7u, 16u, 33u, 64u})
    for (std::size_t cols : {1u, 2u, 5u, 8u, 9u, 18u, 31u}) {
      const auto w = rand_vec(r, rows * cols);
      const auto x = rand_vec(r, cols);
      const auto g = rand_vec(r, rows);
      auto y1 = rand_vec(r, rows), y2 = y1;
      s.gemv(w.data(), rows, cols, x.data(), y1.data());
      t.gemv(w.data(), rows, cols, x.data(), y2.data());
      close(y2, y1, 1e-13);
      auto o1 = rand_vec(r, cols), o2 = o1;
      s.gemv_t(w.data(), rows, cols, g.data(), o1.data());
      t.gemv_t(w.data(), rows, cols, g.data(), o2.data());
      close(o2, o1, 1e-13);
      auto w1 = w, w2 = w;
      s.ger(w1.data(), rows, cols, g.data(), x.data());
      t.ger(w2.data(), rows, cols, g.data(), x.data());
      close(w2, w1, 1e-13);
      auto a1 = x, a2 = x;
      const auto b = rand_vec(r, cols);
      s.axpy(0.37, b.data(), a1.data(), cols);
      t.axpy(0.37, b.data(), a2.data(), cols);
      close(a2, a1, 1e-13);
      CHECK(std::abs(t.dot(x.data(), b.data(), cols) - s.dot(x.data(), b.data(), cols)) <= 1e-12);
    }
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  const auto& s = kernels::scalar_table();
  const std::vector<double> w{1, 2, 3, 4, 5, 6};  // 2 x 3
  std::vector<double> y{1, 1};
  const std::vector<double> x{1, 0, -1};
  s.gemv(w.data(), 2, 3, x.data(), y.data());
  CHECK(y == std::vector<double>{-1, -1});
  std::vector<double> o{0, 0, 0};
  const std::vector<double> g{1, 2};
  s.gemv_t(w.data(), 2, 3, g.data(), o.data());
  CHECK(o == std::vector<double>{9, 12, 15});
  std::vector<double> m(6, 0.0);
  s.ger(m.data(), 2, 3, g.data(), x.data());
  CHECK(m == std::vector<double>{1, 0, -1, 2, 0, -2});
  CHECK(s.dot(x.data(), x.data(), 3) == 2.0);
}

TEST_CASE("every available SIMD backend agrees with scalar") {
  int simd = 0;
  if (const auto* t = kernels::avx2_table()) {
    check_against_scalar(*t);
    ++simd;
  }
  if (const auto* t = kernels::neon_table()) {
    check_against_scalar(*t);
    ++simd;
  }
  MESSAGE("SIMD backends tested: " << simd << ", active: " << std::string(kernels::active().name));
}

TEST_CASE("backend selection") {
  const auto before = kernels::active().backend;
  CHECK(kernels::select(kernels::Backend::Scalar));
  CHECK(kernels::active().backend == kernels::Backend::Scalar);
  const auto avail = kernels::available();
  CHECK(std::find(avail.begin(), avail.end(), kernels::Backend::Scalar) != avail.end());
  CHECK(kernels::select(before));
  CHECK(kernels::backend_name(kernels::Backend::Avx2) == "avx2");
}
