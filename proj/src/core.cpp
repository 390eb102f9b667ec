#include "rfio/core.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace rfio {

TorusGrid::TorusGrid(int d_, int n_, double length_) : d(d_), n(n_), length(length_) {
  if (d < 1 || d > 3) throw Error("grid: dimension must be 1, 2 or 3");
  if (n < 8 || n % 2 != 0) throw Error("grid: n must be even and at least 8");
  if (!(length > 0) || !std::isfinite(length)) throw Error("grid: box length must be positive");
}

std::size_t TorusGrid::cells() const {
  std::size_t c = 1;
  for (int k = 0; k < d; ++k) c *= static_cast<std::size_t>(n);
  return c;
}

double TorusGrid::cell_volume() const { return std::pow(h(), d); }
double TorusGrid::volume() const { return std::pow(length, d); }

std::size_t TorusGrid::stride(int axis) const {
  std::size_t s = 1;
  for (int k = axis + 1; k < d; ++k) s *= static_cast<std::size_t>(n);
  return s;
}

int TorusGrid::coord(std::size_t idx, int axis) const {
  return static_cast<int>((idx / stride(axis)) % static_cast<std::size_t>(n));
}

std::size_t TorusGrid::shifted(std::size_t idx, int axis, int offset) const {
  const std::size_t s = stride(axis);
  const int c = coord(idx, axis);
  int c2 = (c + offset) % n;
  if (c2 < 0) c2 += n;
  return idx + (static_cast<std::ptrdiff_t>(c2) - c) * static_cast<std::ptrdiff_t>(s);
}

double wavenumber(const TorusGrid& g, int m) {
  const int mm = (m >= g.n / 2) ? m - g.n : m;
  return 2 * kPi * mm / g.length;
}

Field::Field(const TorusGrid& g) : grid(g), comp1(CVec::Zero(g.cells())), comp2(CVec::Zero(g.cells())) {}

Field::Field(const TorusGrid& g, CVec c1, CVec c2) : grid(g), comp1(std::move(c1)), comp2(std::move(c2)) {
  if (comp1.size() != static_cast<Eigen::Index>(g.cells()) || comp2.size() != comp1.size())
    throw Error("field: component size does not match grid");
}

bool Field::finite() const { return comp1.allFinite() && comp2.allFinite(); }

Field& Field::operator+=(const Field& o) {
  if (grid != o.grid) throw Error("field: grid mismatch");
  comp1 += o.comp1;
  comp2 += o.comp2;
  return *this;
}

Field& Field::operator-=(const Field& o) {
  if (grid != o.grid) throw Error("field: grid mismatch");
  comp1 -= o.comp1;
  comp2 -= o.comp2;
  return *this;
}

Field& Field::operator*=(cplx s) {
  comp1 *= s;
  comp2 *= s;
  return *this;
}

CVec Field::stacked() const {
  CVec x(2 * comp1.size());
  x << comp1, comp2;
  return x;
}

Field Field::from_stacked(const TorusGrid& g, const CVec& x) {
  const Eigen::Index m = static_cast<Eigen::Index>(g.cells());
  if (x.size() != 2 * m) throw Error("field: stacked vector has wrong size");
  return Field(g, x.head(m), x.tail(m));
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

double lp_norm(const Field& f, double p) {
  if (!(p >= 1) || !std::isfinite(p)) throw Error("lp_norm: p must be finite and >= 1");
  if (!f.finite()) throw Error("lp_norm: invalid field (non-finite entries)");
  CompensatedSum s;
  for (Eigen::Index i = 0; i < f.comp1.size(); ++i) {
    const double m2 = std::norm(f.comp1[i]) + std::norm(f.comp2[i]);
    if (m2 > 0) s.add(std::pow(m2, p / 2));
  }
  return std::pow(f.grid.cell_volume() * s.value(), 1.0 / p);
}

double lp_norm_scalar(const TorusGrid& g, const CVec& u, double p) {
  if (!(p >= 1) || !std::isfinite(p)) throw Error("lp_norm: p must be finite and >= 1");
  if (!u.allFinite()) throw Error("lp_norm: invalid field (non-finite entries)");
  CompensatedSum s;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double m = std::abs(u[i]);
    if (m > 0) s.add(std::pow(m, p));
  }
  return std::pow(g.cell_volume() * s.value(), 1.0 / p);
}

double sup_norm(const Field& f) {
  double m = 0;
  for (Eigen::Index i = 0; i < f.comp1.size(); ++i)
    m = std::max(m, std::sqrt(std::norm(f.comp1[i]) + std::norm(f.comp2[i])));
  return m;
}

cplx inner(const Field& a, const Field& b) {
  if (a.grid != b.grid) throw Error("inner: grid mismatch");
  const cplx s = b.comp1.dot(a.comp1) + b.comp2.dot(a.comp2);
  return s * a.grid.cell_volume();
}

double l2_norm(const Field& f) { return lp_norm(f, 2.0); }

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_cap(int n) { g_threads = std::max(1, n); }

int thread_cap() {
  const int t = g_threads.load();
  if (t > 0) return t;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(thread_cap()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next++;
        if (i >= count || failed) return;
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace rfio
