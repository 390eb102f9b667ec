#include "rfio/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace rfio {

namespace {

std::mutex g_plan_mutex;

// key: (d, n, axis or -1, sign)
using PlanKey = std::tuple<int, int, int, int>;
std::map<PlanKey, fftw_plan>& plan_cache() {
  static std::map<PlanKey, fftw_plan> cache;
  return cache;
}

fftw_plan get_plan(const TorusGrid& g, int axis, int sign) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  const PlanKey key{g.d, g.n, axis, sign};
  auto& cache = plan_cache();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const std::size_t total = g.cells();
  auto* buf = fftw_alloc_complex(total);
  fftw_plan plan;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (axis < 0) {
    std::vector<int> dims(g.d, g.n);
    plan = fftw_plan_dft(g.d, dims.data(), buf, buf, sign, flags);
  } else {
    fftw_iodim dim{g.n, static_cast<int>(g.stride(axis)), static_cast<int>(g.stride(axis))};
    std::vector<fftw_iodim> loops;
    for (int k = 0; k < g.d; ++k) {
      if (k == axis) continue;
      loops.push_back({g.n, static_cast<int>(g.stride(k)), static_cast<int>(g.stride(k))});
    }
    plan = fftw_plan_guru_dft(1, &dim, static_cast<int>(loops.size()), loops.data(), buf, buf, sign, flags);
  }
  fftw_free(buf);
  if (!plan) throw Error("fft: plan creation failed");
  cache.emplace(key, plan);
  return plan;
}

void execute(const TorusGrid& g, int axis, int sign, CVec& u) {
  if (u.size() != static_cast<Eigen::Index>(g.cells())) throw Error("fft: dimension mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(u.data());
  fftw_execute_dft(get_plan(g, axis, sign), p, p);
}

}  // namespace

void fft_forward(const TorusGrid& g, CVec& u) { execute(g, -1, FFTW_FORWARD, u); }

void fft_inverse(const TorusGrid& g, CVec& u) {
  execute(g, -1, FFTW_BACKWARD, u);
  u /= static_cast<double>(g.cells());
}

void fft_axis_forward(const TorusGrid& g, int axis, CVec& u) { execute(g, axis, FFTW_FORWARD, u); }

void fft_axis_inverse(const TorusGrid& g, int axis, CVec& u) {
  execute(g, axis, FFTW_BACKWARD, u);
  u /= static_cast<double>(g.n);
}

SpectralField fourier_forward(const Field& f) {
  SpectralField s{f.grid, f.comp1, f.comp2};
  fft_forward(f.grid, s.comp1);
  fft_forward(f.grid, s.comp2);
  return s;
}

Field fourier_inverse(const SpectralField& s) {
  Field f(s.grid, s.comp1, s.comp2);
  fft_inverse(s.grid, f.comp1);
  fft_inverse(s.grid, f.comp2);
  return f;
}

Eigen::Vector3d wavevector(const TorusGrid& g, std::size_t idx) {
  Eigen::Vector3d k = Eigen::Vector3d::Zero();
  for (int a = 0; a < g.d; ++a) k[a] = wavenumber(g, g.coord(idx, a));
  return k;
}

Field apply_scalar_multiplier(const Field& f, const std::function<cplx(const Eigen::Vector3d&)>& m) {
  SpectralField s = fourier_forward(f);
  for (std::size_t i = 0; i < f.grid.cells(); ++i) {
    const cplx w = m(wavevector(f.grid, i));
    s.comp1[i] *= w;
    s.comp2[i] *= w;
  }
  return fourier_inverse(s);
}

}  // namespace rfio
