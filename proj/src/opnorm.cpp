#include "rfio/opnorm.hpp"

#include <algorithm>
#include <boost/functional/hash.hpp>
#include <cmath>
#include <random>

#include "rfio/field_io.hpp"

namespace rfio {

LinearPipeline& LinearPipeline::then(Stage s) {
  if (!s.forward || !s.adjoint) throw Error("pipeline: stage '" + s.name + "' lacks forward or adjoint");
  stages_.push_back(std::move(s));
  return *this;
}

std::string LinearPipeline::describe() const {
  std::string out;
  for (const Stage& s : stages_) out += (out.empty() ? "" : " -> ") + s.name;
  return out;
}

Field LinearPipeline::apply(const Field& f) const {
  Field u = f;
  for (const Stage& s : stages_) u = s.forward(u);
  return u;
}

Field LinearPipeline::apply_adjoint(const Field& f) const {
  Field u = f;
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) u = it->adjoint(u);
  return u;
}

Field random_field(const TorusGrid& g, std::uint64_t seed, bool real) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Field f(g);
  for (Eigen::Index i = 0; i < f.comp1.size(); ++i) {
    f.comp1[i] = real ? cplx(nd(rng)) : cplx(nd(rng), nd(rng));
    f.comp2[i] = real ? cplx(nd(rng)) : cplx(nd(rng), nd(rng));
  }
  return f;
}

namespace {

double pairing_defect(const std::function<Field(const Field&)>& fwd, const std::function<Field(const Field&)>& adj,
                      const TorusGrid& g, std::uint64_t seed, int pairs) {
  double worst = 0;
  for (int k = 0; k < pairs; ++k) {
    const Field f = random_field(g, seed * 7919 + 2 * k);
    const Field h = random_field(g, seed * 7919 + 2 * k + 1);
    const Field Af = fwd(f);
    const Field Ah = adj(h);
    const double scale = std::max(l2_norm(Af) * l2_norm(h), std::max(l2_norm(f) * l2_norm(Ah), 1e-300));
    worst = std::max(worst, std::abs(inner(Af, h) - inner(f, Ah)) / scale);
  }
  return worst;
}

// |y|^{p-1} sgn(y) / ||y||_p^{p-1}, pointwise on the C^2 modulus.
Field duality_map(const Field& y, double p) {
  const double n = lp_norm(y, p);
  Field w(y.grid);
  if (n == 0.0) return w;
  for (Eigen::Index i = 0; i < y.comp1.size(); ++i) {
    const double m = std::sqrt(std::norm(y.comp1[i]) + std::norm(y.comp2[i]));
    const double s = std::pow(m / n, p - 1) / std::max(m, 1e-300);
    w.comp1[i] = s * y.comp1[i];
    w.comp2[i] = s * y.comp2[i];
  }
  return w;
}

struct Run {
  double value = 0;
  Field witness;
  std::vector<double> trace;
  int iterations = 0;
};

Run power_run(const LinearPipeline& A, double p, Field x, const PnormOptions& opt) {
  const double q = p / (p - 1);
  Run r;
  const double n0 = lp_norm(x, p);
  if (n0 == 0.0) return r;
  x *= cplx(1.0 / n0);
  r.witness = x;
  for (int it = 0; it < opt.iters; ++it) {
    const Field y = A.apply(x);
    const double v = lp_norm(y, p);
    if (it > 0 && v < r.value * (1 + opt.rel_tol)) break;
    r.value = v;
    r.witness = x;
    r.trace.push_back(v);
    r.iterations = it + 1;
    if (v == 0.0) break;
    const Field z = A.apply_adjoint(duality_map(y, p));
    const double zn = lp_norm(z, q);
    if (zn == 0.0) break;
    x = duality_map(z, q);
    if (opt.real_seeds) {
      x.comp1 = x.comp1.real().cast<cplx>();
      x.comp2 = x.comp2.real().cast<cplx>();
    }
    const double xn = lp_norm(x, p);
    if (xn == 0.0) break;
    x *= cplx(1.0 / xn);
  }
  return r;
}

}  // namespace

double adjoint_selfcheck(const LinearPipeline& A, std::uint64_t seed, int pairs) {
  return pairing_defect([&A](const Field& f) { return A.apply(f); }, [&A](const Field& f) { return A.apply_adjoint(f); },
                        A.grid(), seed, pairs);
}

double stage_selfcheck(const TorusGrid& g, const Stage& s, std::uint64_t seed, int pairs) {
  return pairing_defect(s.forward, s.adjoint, g, seed, pairs);
}

std::uint64_t field_hash(const Field& f) {
  const std::string b = field_io_encode(f);
  return boost::hash_range(b.begin(), b.end());
}

OperatorNormEstimate pnorm_estimate(const LinearPipeline& A, double p, const PnormOptions& opt) {
  if (!(p > 1) || !std::isfinite(p)) throw Error("pnorm_estimate: p must lie in (1, inf)");
  if (opt.iters < 1 || opt.restarts < 0) throw Error("pnorm_estimate: budgets must be positive");
  OperatorNormEstimate e;
  e.p = p;
  e.adjoint_defect = adjoint_selfcheck(A, opt.seed);
  if (!(e.adjoint_defect < opt.adjoint_tol))
    throw Error("pnorm_estimate: adjoint inconsistency " + std::to_string(e.adjoint_defect) + " in pipeline " + A.id());
  std::vector<Field> starts = opt.structured;
  for (int k = 0; k < opt.restarts; ++k) starts.push_back(random_field(A.grid(), opt.seed * 104729 + k, opt.real_seeds));
  std::vector<Run> runs(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) { runs[i] = power_run(A, p, starts[i], opt); });
  e.restarts = static_cast<int>(starts.size());
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (runs[i].value > e.value) {
      e.value = runs[i].value;
      e.best_start = static_cast<int>(i);
    }
  if (e.best_start < 0) return e;
  Run& best = runs[static_cast<std::size_t>(e.best_start)];
  e.witness = best.witness;
  e.trace = best.trace;
  e.iterations = best.iterations;
  e.value = witness_quotient(A, e);
  e.witness_hash = field_hash(e.witness);
  return e;
}

double witness_quotient(const LinearPipeline& A, const OperatorNormEstimate& e) {
  return lp_norm(A.apply(e.witness), e.p) / lp_norm(e.witness, e.p);
}

double brute_force_pnorm(const RMat& A, double p, int samples, std::uint64_t seed) {
  const Eigen::Index n = A.cols();
  auto lp = [p](const RVec& v) {
    double s = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p);
    return std::pow(s, 1 / p);
  };
  auto quotient = [&](const RVec& x) { return lp(A * x) / lp(x); };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<std::pair<double, RVec>> pts;
  for (int k = 0; k < samples; ++k) {
    RVec x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = nd(rng);
    pts.emplace_back(quotient(x), x);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    RVec x = RVec::Zero(n);
    x[i] = 1;
    pts.emplace_back(quotient(x), x);
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double best = pts.front().first;
  const std::size_t polish = std::min<std::size_t>(pts.size(), 64);
  for (std::size_t k = 0; k < polish; ++k) {
    RVec x = pts[k].second;
    double f = quotient(x);
    double step = 0.1 * x.norm();
    while (step > 1e-12 * x.norm()) {
      bool moved = false;
      for (Eigen::Index i = 0; i < n; ++i)
        for (double sgn : {1.0, -1.0}) {
          RVec y = x;
          y[i] += sgn * step;
          const double fy = quotient(y);
          if (fy > f) {
            x = y;
            f = fy;
            moved = true;
          }
        }
      if (!moved) step *= 0.5;
    }
    best = std::max(best, f);
  }
  return best;
}

LinearPipeline matrix_pipeline(const RMat& A) {
  if (A.rows() != A.cols()) throw Error("matrix_pipeline: square matrix required");
  const Eigen::Index m = A.cols();
  const int n = std::max(8, static_cast<int>(m + (m % 2)));
  const TorusGrid g(1, n, 2 * kPi);
  auto act = [g, m](const CMat& M) {
    return [g, m, M](const Field& f) {
      Field out(g);
      out.comp1.head(m) = M * f.comp1.head(m);
      return out;
    };
  };
  LinearPipeline P("matrix", g);
  P.then({"matrix", act(A.cast<cplx>()), act(A.transpose().cast<cplx>())});
  return P;
}

}  // namespace rfio
