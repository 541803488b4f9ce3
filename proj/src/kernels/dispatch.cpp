#include <atomic>
#include <cstdlib>
#include <string>

#include "attnloc/kernels.hpp"

namespace attnloc::kernels {

#if defined(ATTNLOC_HAVE_AVX2)
namespace avx2 {
const Table& table();
}
#endif
#if defined(ATTNLOC_HAVE_NEON)
namespace neon {
const Table& table();
}
#endif

const Table* avx2_table() {
#if defined(ATTNLOC_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? &avx2::table() : nullptr;
#else
  return nullptr;
#endif
}

const Table* neon_table() {
#if defined(ATTNLOC_HAVE_NEON)
  return &neon::table();  // baseline on AArch64
#else
  return nullptr;
#endif
}

namespace {

const Table* initial() {
  std::string pref = "auto";
  if (const char* env = std::getenv("ATTNLOC_SIMD")) pref = env;
  if (pref == "scalar") return &scalar_table();
  if (pref == "avx2" && avx2_table()) return avx2_table();
  if (pref == "neon" && neon_table()) return neon_table();
  if (const Table* t = avx2_table()) return t;
  if (const Table* t = neon_table()) return t;
  return &scalar_table();
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> t{initial()};
  return t;
}

}  // namespace

const Table& active() { return *current().load(std::memory_order_relaxed); }

bool select(Backend b) {
  const Table* t = nullptr;
  switch (b) {
    case Backend::Scalar: t = &scalar_table(); break;
    case Backend::Avx2: t = avx2_table(); break;
    case Backend::Neon: t = neon_table(); break;
  }
  if (!t) return false;
  current().store(t, std::memory_order_relaxed);
  return true;
}

std::vector<Backend> available() {
  std::vector<Backend> r{Backend::Scalar};
  if (avx2_table()) r.push_back(Backend::Avx2);
  if (neon_table()) r.push_back(Backend::Neon);
  return r;
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "?";
}

}  // namespace attnloc::kernels
