#include "rfio/tent.hpp"

#include <algorithm>
#include <cmath>

namespace rfio {

void TentField::validate() const {
  if (sigma.size() != weight.size() || sigma.size() != values.size()) throw Error("tent: ladder mismatch with F");
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    if (values[k].grid != grid) throw Error("tent: slab grid mismatch");
    if (k > 0 && !(sigma[k] < sigma[k - 1])) throw Error("tent: ladder must be strictly decreasing");
  }
}

int tent_box_radius(const TorusGrid& g, double sigma, bool* clamped) {
  const double h = g.h();
  if (sigma < h) return -1;
  double s = sigma;
  if (s > g.length / 4) {
    s = g.length / 4;
    if (clamped) *clamped = true;
  }
  return static_cast<int>(std::floor(s / (std::sqrt(double(g.d)) * h) + 1e-12));
}

namespace {

RVec modulus2(const Field& u) { return u.comp1.cwiseAbs2() + u.comp2.cwiseAbs2(); }

// Periodic box sum of half-width m along one axis by running sums.
void box_sum_axis(const TorusGrid& g, int axis, int m, RVec& a) {
  const int n = g.n;
  const std::size_t s = g.stride(axis);
  const std::size_t blocks = g.cells() / (static_cast<std::size_t>(n) * s);
  std::vector<double> line(n), pre(2 * n + 1);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t i = 0; i < s; ++i) {
      const std::size_t base = b * n * s + i;
      for (int k = 0; k < n; ++k) line[k] = a[static_cast<Eigen::Index>(base + k * s)];
      pre[0] = 0;
      for (int k = 0; k < 2 * n; ++k) pre[k + 1] = pre[k] + line[k % n];
      const int w = std::min(2 * m + 1, n);
      for (int k = 0; k < n; ++k) {
        // window [k - m, k + m] shifted into [0, 2n)
        const int lo = (k - m % n + n) % n;
        a[static_cast<Eigen::Index>(base + k * s)] = pre[lo + w] - pre[lo];
      }
    }
}

void box_max_axis(const TorusGrid& g, int axis, int m, RVec& a) {
  const int n = g.n;
  const std::size_t s = g.stride(axis);
  const std::size_t blocks = g.cells() / (static_cast<std::size_t>(n) * s);
  std::vector<double> line(n);
  const int w = std::min(m, n / 2);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t i = 0; i < s; ++i) {
      const std::size_t base = b * n * s + i;
      for (int k = 0; k < n; ++k) line[k] = a[static_cast<Eigen::Index>(base + k * s)];
      for (int k = 0; k < n; ++k) {
        double v = 0;
        for (int o = -w; o <= w; ++o) v = std::max(v, line[((k + o) % n + n) % n]);
        a[static_cast<Eigen::Index>(base + k * s)] = v;
      }
    }
}

}  // namespace

void accumulate_box_mean(const TorusGrid& g, const Field& u, double sigma, double w, RVec& acc, TentInfo* info) {
  bool cl = false;
  const int m = tent_box_radius(g, sigma, &cl);
  if (m < 0) {
    if (info) ++info->dropped;
    return;
  }
  if (cl && info) ++info->clamped;
  RVec a = modulus2(u);
  const int side = std::min(2 * m + 1, g.n);
  for (int j = 0; j < g.d; ++j) box_sum_axis(g, j, m, a);
  acc += (w / std::pow(double(side), g.d)) * a;
}

void accumulate_box_max(const TorusGrid& g, const Field& u, double sigma, RVec& acc, TentInfo* info) {
  bool cl = false;
  const int m = tent_box_radius(g, sigma, &cl);
  if (m < 0) {
    if (info) ++info->dropped;
    return;
  }
  if (cl && info) ++info->clamped;
  RVec a = modulus2(u).cwiseSqrt();
  for (int j = 0; j < g.d; ++j) box_max_axis(g, j, m, a);
  acc = acc.cwiseMax(a);
}

double profile_lp(const TorusGrid& g, const RVec& a, double p) {
  CompensatedSum s;
  for (Eigen::Index i = 0; i < a.size(); ++i) s.add(std::pow(a[i], p));
  return std::pow(g.cell_volume() * s.value(), 1.0 / p);
}

RVec tent_profile(const TentField& F, TentQ q, TentInfo* info) {
  F.validate();
  RVec acc = RVec::Zero(static_cast<Eigen::Index>(F.grid.cells()));
  for (std::size_t k = 0; k < F.sigma.size(); ++k) {
    if (q == TentQ::Two)
      accumulate_box_mean(F.grid, F.values[k], F.sigma[k], F.weight[k], acc, info);
    else
      accumulate_box_max(F.grid, F.values[k], F.sigma[k], acc, info);
  }
  return q == TentQ::Two ? RVec(acc.cwiseSqrt()) : acc;
}

double tent_norm(const TentField& F, double p, TentQ q, TentInfo* info) {
  if (!(p > 1) || !std::isfinite(p)) throw Error("tent_norm: p must lie in (1, inf)");
  return profile_lp(F.grid, tent_profile(F, q, info), p);
}

double carleson_norm(const TentField& F) {
  F.validate();
  const TorusGrid& g = F.grid;
  const double h = g.h();
  double best = 0;
  // Dyadic half-widths from one cell up to a quarter box.
  for (int m = 0; (2 * m + 1) * h <= g.length / 2 + 1e-12; m = m == 0 ? 1 : 2 * m) {
    const double r = (m + 0.5) * h * std::sqrt(double(g.d));
    RVec acc = RVec::Zero(static_cast<Eigen::Index>(g.cells()));
    for (std::size_t k = 0; k < F.sigma.size(); ++k) {
      if (F.sigma[k] > r) continue;
      RVec a = F.values[k].comp1.cwiseAbs2() + F.values[k].comp2.cwiseAbs2();
      for (int j = 0; j < g.d; ++j) box_sum_axis(g, j, m, a);
      acc += F.weight[k] * a;
    }
    const double side = std::min(2 * m + 1, g.n);
    best = std::max(best, std::sqrt(acc.maxCoeff() / std::pow(side, g.d)));
  }
  return best;
}

AtomCheck atom_check(const TentField& A, const std::vector<double>& center, double r) {
  A.validate();
  const TorusGrid& g = A.grid;
  AtomCheck out;
  if (static_cast<int>(center.size()) != g.d) throw Error("atom_check: centre dimension mismatch");
  double mass = 0;
  for (std::size_t k = 0; k < A.sigma.size(); ++k) {
    const Field& u = A.values[k];
    for (std::size_t i = 0; i < g.cells(); ++i) {
      const double v = std::norm(u.comp1[static_cast<Eigen::Index>(i)]) + std::norm(u.comp2[static_cast<Eigen::Index>(i)]);
      if (v == 0.0) continue;
      double dist = 0;
      for (int j = 0; j < g.d; ++j) {
        double dx = g.coord(i, j) * g.h() - center[j];
        dx -= g.length * std::round(dx / g.length);
        dist = std::max(dist, std::abs(dx));
      }
      if (dist > r + 1e-12 || A.sigma[k] > r + 1e-12) {
        if (out.diagnostic.empty())
          out.diagnostic = "support outside the tent at sigma = " + std::to_string(A.sigma[k]) + ", distance " +
                           std::to_string(dist);
        continue;
      }
      mass += A.weight[k] * g.cell_volume() * v;
    }
  }
  out.normalization = std::pow(r, g.d) * mass;
  out.slack = 1 - out.normalization;
  const RVec prof = tent_profile(A, TentQ::Two);
  out.t1_proxy = g.cell_volume() * prof.sum();
  out.ok = out.diagnostic.empty() && out.normalization <= 1 + 1e-12;
  if (out.diagnostic.empty() && !out.ok) out.diagnostic = "normalization exceeds 1";
  return out;
}

}  // namespace rfio
