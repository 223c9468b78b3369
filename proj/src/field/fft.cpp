#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <map>
#include <mutex>

namespace nsreg::detail {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const std::size_t real_size = std::size_t(n) * n * n;
  const std::size_t complex_size = std::size_t(n) * n * (n / 2 + 1);
  auto* r = fftw_alloc_real(real_size);
  auto* c = fftw_alloc_complex(complex_size);
  // FFTW_ESTIMATE keeps plans, and so results, identical from run to run.
  // FFTW is row-major: dims (z, y, x) puts x last, matching our storage.
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_3d(n, n, n, r, c, FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_3d(n, n, n, c, r, FFTW_ESTIMATE);
  fftw_free(r);
  fftw_free(c);
  return cache.emplace(n, p).first->second;
}

// Plans are made for fftw_malloc alignment; transforms run on per-thread
// aligned buffers so callers can pass any storage.
struct Scratch {
  std::size_t real_size = 0, complex_size = 0;
  double* r = nullptr;
  fftw_complex* c = nullptr;

  void reserve(int n) {
    const std::size_t rs = std::size_t(n) * n * n, cs = std::size_t(n) * n * (n / 2 + 1);
    if (rs <= real_size && cs <= complex_size) return;
    release();
    r = fftw_alloc_real(rs);
    c = fftw_alloc_complex(cs);
    real_size = rs;
    complex_size = cs;
  }
  void release() {
    if (r) fftw_free(r);
    if (c) fftw_free(c);
    r = nullptr;
    c = nullptr;
    real_size = complex_size = 0;
  }
  ~Scratch() { release(); }
};

Scratch& scratch(int n) {
  thread_local Scratch s;
  s.reserve(n);
  return s;
}

}  // namespace

void forward_r2c(int n, const double* in, std::complex<double>* out) {
  const auto& p = plans_for(n);
  Scratch& s = scratch(n);
  auto* o = reinterpret_cast<fftw_complex*>(out);
  if (fftw_alignment_of(const_cast<double*>(in)) == 0 && fftw_alignment_of(reinterpret_cast<double*>(o)) == 0) {
    // r2c leaves its input intact
    fftw_execute_dft_r2c(p.forward, const_cast<double*>(in), o);
    return;
  }
  std::copy(in, in + std::size_t(n) * n * n, s.r);
  fftw_execute_dft_r2c(p.forward, s.r, s.c);
  const auto* c = reinterpret_cast<const std::complex<double>*>(s.c);
  std::copy(c, c + std::size_t(n) * n * (n / 2 + 1), out);
}

void inverse_c2r(int n, const std::complex<double>* in, double* out) {
  const auto& p = plans_for(n);
  Scratch& s = scratch(n);
  std::copy(in, in + std::size_t(n) * n * (n / 2 + 1), reinterpret_cast<std::complex<double>*>(s.c));
  if (fftw_alignment_of(out) == 0) {
    fftw_execute_dft_c2r(p.inverse, s.c, out);
    return;
  }
  fftw_execute_dft_c2r(p.inverse, s.c, s.r);
  std::copy(s.r, s.r + std::size_t(n) * n * n, out);
}

}  // namespace nsreg::detail
