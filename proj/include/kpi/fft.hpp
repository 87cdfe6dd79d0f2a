#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "kpi/field.hpp"

namespace kpi {

using cplx = std::complex<double>;

/// Fourier coefficients of a Field in r2c layout: row j (y wavenumber grid.ky(j)),
/// column p in [0, nx/2] (x wavenumber grid.xi(p)). Normalized so that
/// f(x, y) = sum c_{p,q} e^{i(ξ_p (x + lx/2) + q y)} over the full (Hermitian) set.
///
/// The phase origin is the left box edge, which is where the samples start.
struct Spectrum2D {
  Grid grid;
  std::vector<cplx> c;

  Spectrum2D() = default;
  explicit Spectrum2D(const Grid& g) : grid(g), c(static_cast<std::size_t>(g.ny) * g.nxh()) {}

  cplx& operator()(int j, int p) { return c[static_cast<std::size_t>(j) * grid.nxh() + p]; }
  cplx operator()(int j, int p) const { return c[static_cast<std::size_t>(j) * grid.nxh() + p]; }
};

/// r2c coefficients of a profile, p in [0, nx/2].
struct Spectrum1D {
  Grid grid;
  std::vector<cplx> c;

  Spectrum1D() = default;
  explicit Spectrum1D(const Grid& g) : grid(g), c(static_cast<std::size_t>(g.nxh())) {}
};

namespace detail {

enum class PlanKind { r2c_2d, c2r_2d, r2c_1d, c2r_1d };

/// Process-wide FFTW plan cache. Planning is serialized; execution through the
/// new-array interface is thread-safe, and plans are made with FFTW_UNALIGNED so
/// any std::vector buffer may be passed.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(PlanKind kind, int ny, int nx) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(kind, ny, nx);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const int nxh = nx / 2 + 1;
    std::vector<double> r(static_cast<std::size_t>(ny) * nx);
    std::vector<cplx> z(static_cast<std::size_t>(ny) * nxh);
    auto* zp = reinterpret_cast<fftw_complex*>(z.data());
    fftw_plan plan = nullptr;
    switch (kind) {
      case PlanKind::r2c_2d: plan = fftw_plan_dft_r2c_2d(ny, nx, r.data(), zp, flags); break;
      case PlanKind::c2r_2d: plan = fftw_plan_dft_c2r_2d(ny, nx, zp, r.data(), flags); break;
      case PlanKind::r2c_1d: plan = fftw_plan_dft_r2c_1d(nx, r.data(), zp, flags); break;
      case PlanKind::c2r_1d: plan = fftw_plan_dft_c2r_1d(nx, zp, r.data(), flags); break;
    }
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<PlanKind, int, int>, fftw_plan> plans_;
};

inline void r2c_2d(int ny, int nx, const double* in, cplx* out) {
  fftw_plan plan = PlanCache::instance().get(PlanKind::r2c_2d, ny, nx);
  fftw_execute_dft_r2c(plan, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

/// Destroys `in`.
inline void c2r_2d(int ny, int nx, cplx* in, double* out) {
  fftw_plan plan = PlanCache::instance().get(PlanKind::c2r_2d, ny, nx);
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(in), out);
}

inline void r2c_1d(int nx, const double* in, cplx* out) {
  fftw_plan plan = PlanCache::instance().get(PlanKind::r2c_1d, 1, nx);
  fftw_execute_dft_r2c(plan, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

inline void c2r_1d(int nx, cplx* in, double* out) {
  fftw_plan plan = PlanCache::instance().get(PlanKind::c2r_1d, 1, nx);
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace detail

inline Spectrum2D forward(const Field& f) {
  Spectrum2D s(f.grid);
  detail::r2c_2d(f.grid.ny, f.grid.nx, f.values.data(), s.c.data());
  const double scale = 1.0 / static_cast<double>(f.grid.size());
  for (cplx& z : s.c) z *= scale;
  return s;
}

inline Field inverse(Spectrum2D s) {
  Field f(s.grid);
  detail::c2r_2d(s.grid.ny, s.grid.nx, s.c.data(), f.values.data());
  return f;
}

inline Spectrum1D forward(const Profile1D& f) {
  Spectrum1D s(f.grid);
  detail::r2c_1d(f.grid.nx, f.values.data(), s.c.data());
  const double scale = 1.0 / f.grid.nx;
  for (cplx& z : s.c) z *= scale;
  return s;
}

inline Profile1D inverse(Spectrum1D s) {
  Profile1D f(s.grid);
  detail::c2r_1d(s.grid.nx, s.c.data(), f.values.data());
  return f;
}

}  // namespace kpi
