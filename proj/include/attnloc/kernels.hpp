#pragma once

// Dense double-precision kernels behind the model's inner loops. Each entry
// has a scalar reference implementation and, where the build and CPU allow,
// an AVX2/FMA (x86-64) or NEON (AArch64) variant chosen once at startup.
// ATTNLOC_SIMD=scalar|avx2|neon|auto overrides the choice.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace attnloc::kernels {

enum class Backend { Scalar, Avx2, Neon };

struct Table {
  Backend backend;
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += W x, W row-major rows x cols.
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y);
  // out += W^T g.
  void (*gemv_t)(const double* w, std::size_t rows, std::size_t cols, const double* g, double* out);
  // W += g x^T.
  void (*ger)(double* w, std::size_t rows, std::size_t cols, const double* g, const double* x);
  // y += alpha x.
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const Table& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks it.
const Table* avx2_table();
const Table* neon_table();

const Table& active();
// Switches the process-wide backend; false if unavailable. Not thread-safe
// against concurrent kernel calls.
bool select(Backend b);
std::vector<Backend> available();
std::string_view backend_name(Backend b);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void gemv(std::span<const double> w, std::size_t rows, std::size_t cols, std::span<const double> x,
                 std::span<double> y) {
  active().gemv(w.data(), rows, cols, x.data(), y.data());
}
inline void gemv_t(std::span<const double> w, std::size_t rows, std::size_t cols, std::span<const double> g,
                   std::span<double> out) {
  active().gemv_t(w.data(), rows, cols, g.data(), out.data());
}
inline void ger(std::span<double> w, std::size_t rows, std::size_t cols, std::span<const double> g,
                std::span<const double> x) {
  active().ger(w.data(), rows, cols, g.data(), x.data());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace attnloc::kernels
