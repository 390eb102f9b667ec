#include "rfio/propagators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "rfio/symbols.hpp"
#include "rfio/wavepackets.hpp"

namespace rfio {

Stage halfwave_stage(const TensorCalculus& T, double t) {
  auto g = [t](double l) { return std::polar(1.0, t * std::sqrt(l)); };
  return {"halfwave(t=" + std::to_string(t) + ")", [&T, g](const Field& f) { return T.apply(g, f); },
          [&T, g](const Field& f) { return T.apply_adjoint(g, f); }};
}

Stage bessel_stage(const TensorCalculus& T, double alpha) {
  auto g = [alpha](double l) { return cplx(std::pow(1 + std::sqrt(l), -alpha)); };
  return {"bessel(alpha=" + std::to_string(alpha) + ")", [&T, g](const Field& f) { return T.apply(g, f); },
          [&T, g](const Field& f) { return T.apply_adjoint(g, f); }};
}

Stage heat_stage(const TensorCalculus& T, double t) {
  auto g = [t](double l) { return cplx(std::exp(-t * l)); };
  return {"heat(t=" + std::to_string(t) + ")", [&T, g](const Field& f) { return T.apply(g, f); },
          [&T, g](const Field& f) { return T.apply_adjoint(g, f); }};
}

Stage band_stage(const TensorCalculus& T, double kmax) {
  auto g = [kmax](double l) { return cplx(phi_window(std::sqrt(l) / kmax)); };
  return {"band(" + std::to_string(kmax) + ")", [&T, g](const Field& f) { return T.apply(g, f); },
          [&T, g](const Field& f) { return T.apply_adjoint(g, f); }};
}

std::vector<Field> focusing_seeds(const TensorCalculus& T, double t, const std::vector<double>& widths) {
  const TorusGrid& g = T.grid();
  std::vector<Field> out;
  for (double w : widths)
    for (int c = 0; c < 2; ++c) {
      Field f(g);
      const double s = w * g.h();
      for (std::size_t i = 0; i < g.cells(); ++i) {
        double r2 = 0;
        for (int j = 0; j < g.d; ++j) {
          const double x = (g.coord(i, j) - g.n / 2) * g.h();
          r2 += x * x;
        }
        (c == 0 ? f.comp1 : f.comp2)[static_cast<Eigen::Index>(i)] = std::exp(-0.5 * r2 / (s * s));
      }
      out.push_back(T.halfwave(f, -t));
    }
  return out;
}

std::vector<Field> packet_seeds(const TensorCalculus& T, const std::vector<double>& sigmas) {
  const TorusGrid& g = T.grid();
  std::size_t centre = 0;
  for (int j = 0; j < g.d; ++j) centre += static_cast<std::size_t>(g.n / 2) * g.stride(j);
  std::vector<Field> out;
  for (double sig : sigmas)
    for (int c = 0; c < 2; ++c) {
      Field f(g);
      (c == 0 ? f.comp1 : f.comp2)[static_cast<Eigen::Index>(centre)] = 1;
      out.push_back(T.radial([sig](double r) { return Psi(sig * r); }, f));
    }
  return out;
}

std::vector<FixedTimeRow> fixed_time_norm(const FixedTimeSpec& spec) {
  std::vector<FixedTimeRow> rows;
  for (std::size_t k = 0; k < spec.grid_sizes.size(); ++k) {
    const TorusGrid g(spec.d, spec.grid_sizes[k], spec.length);
    const DiracOperator op(make_profile(spec.profile, g, spec.params, spec.seed), spec.coupling);
    const TensorCalculus T(op);
    const double band = 2.0 / grid_sigma_min(g, spec.J);
    LinearPipeline P("fixed_time", g);
    P.then(band_stage(T, band));
    P.then(halfwave_stage(T, spec.t));
    if (spec.alpha != 0.0) P.then(bessel_stage(T, spec.alpha));
    PnormOptions o;
    o.iters = spec.iters;
    o.restarts = spec.restarts;
    o.seed = spec.seed;
    o.structured = focusing_seeds(T, spec.t, spec.seed_widths);
    std::vector<double> sigmas;
    for (double sig = 1; sig >= grid_sigma_min(g, spec.J) - 1e-12; sig /= 2) sigmas.push_back(sig);
    for (Field& f : packet_seeds(T, sigmas)) o.structured.push_back(std::move(f));
    const OperatorNormEstimate e = pnorm_estimate(P, spec.p, o);
    FixedTimeRow r;
    r.d = spec.d;
    r.p = spec.p;
    r.alpha = spec.alpha;
    r.t = spec.t;
    r.N = g.n;
    r.estimate = e.value;
    r.ratio = rows.empty() ? 0.0 : e.value / rows.back().estimate;
    r.seed = spec.seed;
    r.profile_hash = op.profile().hash();
    r.adjoint_defect = e.adjoint_defect;
    r.band = band;
    rows.push_back(r);
  }
  return rows;
}

BesovResult besov_norm(const TensorCalculus& T, const CVec& g, double s) {
  const TorusGrid& G = T.grid();
  if (static_cast<std::size_t>(g.size()) != G.cells()) throw Error("besov_norm: size mismatch");
  const CVec g0 = g.array() - g.mean();
  Field F(G, g0, g0);
  Field A(G, T.analysis(0, g0), T.analysis(1, g0));
  BesovResult best;
  for (int j = 0;; ++j) {
    const double tau = 0.5 * G.h() * std::pow(2.0, j / 8.0);
    if (tau > G.length) break;
    for (int c = 0; c < 2; ++c) {
      CVec a = c == 0 ? A.comp1 : A.comp2;
      const RVec& lam = T.eigenvalues(c);
      for (Eigen::Index i = 0; i < a.size(); ++i) a[i] *= besov_window(tau * tau * lam[i]);
      const double v = std::pow(tau, -s) * T.synthesis(c, a).cwiseAbs().maxCoeff();
      if (v > best.value) best = {v, tau, c};
    }
  }
  return best;
}

namespace {

// Square root of an upper-triangular matrix; diagonal entries below tol are treated as exact zeros.
CMat triangular_sqrt(const CMat& T, double tol) {
  const Eigen::Index n = T.rows();
  CMat R = CMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) R(i, i) = std::abs(T(i, i)) <= tol ? cplx(0) : std::sqrt(T(i, i));
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = j - 1; i >= 0; --i) {
      cplx s = T(i, j);
      for (Eigen::Index k = i + 1; k < j; ++k) s -= R(i, k) * R(k, j);
      const cplx den = R(i, i) + R(j, j);
      if (std::abs(den) <= tol) {
        if (std::abs(s) > 1e-8 * (1 + T.cwiseAbs().maxCoeff()))
          throw Error("perturbed_halfwave: Schur square root breakdown (repeated zero eigenvalue)");
        R(i, j) = 0;
      } else {
        R(i, j) = s / den;
      }
    }
  return R;
}

}  // namespace

PerturbedResult perturbed_halfwave(const DiracOperator& op, const std::vector<RVec>& drift, double t, const Field& f) {
  const TorusGrid& g = op.grid();
  const std::size_t m = g.cells();
  if (2 * m > kPerturbedDenseMax)
    throw Error("perturbed_halfwave: dense route refused, 2 n^d = " + std::to_string(2 * m) + " exceeds " +
                std::to_string(kPerturbedDenseMax));
  if (static_cast<int>(drift.size()) != g.d) throw Error("perturbed_halfwave: need one drift per axis");
  for (const RVec& q : drift)
    if (static_cast<std::size_t>(q.size()) != m) throw Error("perturbed_halfwave: drift size mismatch");
  const Eigen::Index M = static_cast<Eigen::Index>(m);
  CMat L[2] = {CMat::Zero(M, M), CMat::Zero(M, M)};
  for (Eigen::Index i = 0; i < M; ++i) {
    Field e(g);
    e.comp1[i] = 1;
    e.comp2[i] = 1;
    const Field y = op.apply_L(e);
    L[0].col(i) = y.comp1;
    L[1].col(i) = y.comp2;
  }
  for (int j = 0; j < g.d; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::Index r = static_cast<Eigen::Index>(i);
      const Eigen::Index ip = static_cast<Eigen::Index>(g.shifted(i, j, 1));
      const Eigen::Index im = static_cast<Eigen::Index>(g.shifted(i, j, -1));
      const double c = drift[j][r] / (2 * g.h());
      for (auto& A : L) {
        A(r, ip) += c;
        A(r, im) -= c;
      }
    }
  PerturbedResult out;
  out.value = Field(g);
  out.min_real = 0;
  Eigen::ComplexSchur<CMat> schur[2];
  for (int c = 0; c < 2; ++c) {
    schur[c].compute(L[c]);
    if (schur[c].info() != Eigen::Success) throw Error("perturbed_halfwave: Schur decomposition failed");
    const CMat& T = schur[c].matrixT();
    for (Eigen::Index i = 0; i < M; ++i) out.min_real = std::min(out.min_real, T(i, i).real());
  }
  if (out.min_real < -1e-8) {
    out.shift = -out.min_real;
    out.diagnostic = "spectrum has Re lambda = " + std::to_string(out.min_real) + "; shifted upward by " +
                     std::to_string(out.shift);
  }
  for (int c = 0; c < 2; ++c) {
    CMat T = schur[c].matrixT();
    const double scale = T.cwiseAbs().maxCoeff();
    T.diagonal().array() += out.shift;
    const CMat R = triangular_sqrt(T, 1e-12 * scale);
    const CMat E = (cplx(0, t) * R).exp();
    const CMat& U = schur[c].matrixU();
    const CVec& x = c == 0 ? f.comp1 : f.comp2;
    (c == 0 ? out.value.comp1 : out.value.comp2) = U * (E * (U.adjoint() * x));
  }
  return out;
}

TransportRatio halfwave_vs_transport(const HpfioContext& ctx, const Field& f, double p, double t) {
  const TensorCalculus& T = ctx.tensor();
  const Field wave = T.halfwave(f, t);
  TransportRatio r;
  const auto& dirs = ctx.directions();
  const int d = ctx.op().d();
  double sum = 0;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    Vec xi(d);
    if (d == 1)
      xi[0] = t * std::cos(dirs[k]);
    else
      xi << t * std::cos(dirs[k]), t * std::sin(dirs[k]);
    const Field diff = wave - ctx.op().exp_i(xi, f);
    const double den = lp_norm(ctx.directional(f, k), p);
    const double v = den > 0 ? lp_norm(ctx.directional(diff, k), p) / den : 0.0;
    r.per_direction.push_back(v);
    r.max_ratio = std::max(r.max_ratio, v);
    sum += v;
  }
  r.mean_ratio = dirs.empty() ? 0.0 : sum / dirs.size();
  return r;
}

}  // namespace rfio
