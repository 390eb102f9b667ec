#include "rfio/tensor.hpp"

#include <cmath>
#include <random>

namespace rfio {

void apply_along_axis(const TorusGrid& g, int axis, const CMat& A, CVec& u) {
  const Eigen::Index n = g.n;
  const Eigen::Index s = static_cast<Eigen::Index>(g.stride(axis));
  const Eigen::Index blocks = static_cast<Eigen::Index>(g.cells()) / (n * s);
  for (Eigen::Index b = 0; b < blocks; ++b) {
    Eigen::Map<CMat> M(u.data() + b * n * s, s, n);
    M = (M * A.transpose()).eval();
  }
}

TensorCalculus::TensorCalculus(const DiracOperator& op) : op_(&op), grid_(op.grid()) {
  const int d = grid_.d;
  const std::size_t N = grid_.cells();
  for (int c = 0; c < 2; ++c) {
    const BlockKind kind = c == 0 ? BlockKind::L1 : BlockKind::L2;
    for (int j = 0; j < d; ++j) {
      blocks_[c].push_back(eigendecompose(op.block(j, kind)));
      const SpectralBlock1D& s = blocks_[c].back();
      if (s.max_residual > 1e-9 || s.gram_defect > 1e-10)
        throw Error("tensor: axis block residual too large (" + std::to_string(s.max_residual) + ")");
      vec_[c].push_back(s.vectors.cast<cplx>());
      ana_[c].push_back(s.analysis.cast<cplx>());
    }
    lambda_[c] = RVec::Zero(static_cast<Eigen::Index>(N));
    weight_[c] = RVec::Ones(static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i < N; ++i)
      for (int j = 0; j < d; ++j) {
        const int k = grid_.coord(i, j);
        lambda_[c][static_cast<Eigen::Index>(i)] += blocks_[c][j].eigenvalues[k];
        weight_[c][static_cast<Eigen::Index>(i)] *= blocks_[c][j].weight[k];
      }
  }
  // Kronecker-sum check against the assembled L on a seeded field.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Field f(grid_);
  for (std::size_t i = 0; i < N; ++i) {
    f.comp1[static_cast<Eigen::Index>(i)] = {nd(rng), nd(rng)};
    f.comp2[static_cast<Eigen::Index>(i)] = {nd(rng), nd(rng)};
  }
  const Field a = op.apply_L(f);
  const Field b = apply([](double l) { return cplx(l); }, f);
  defect_ = l2_norm(a - b) / std::max(l2_norm(a), 1e-300);
  if (defect_ > 1e-10) throw Error("tensor: Kronecker-sum apply disagrees with L (" + std::to_string(defect_) + ")");
}

CVec TensorCalculus::transform(int comp, const CVec& u, bool forward) const {
  CVec v = u;
  for (int j = 0; j < grid_.d; ++j) apply_along_axis(grid_, j, forward ? ana_[comp][j] : vec_[comp][j], v);
  return v;
}

CVec TensorCalculus::analysis(int comp, const CVec& u) const { return transform(comp, u, true); }
CVec TensorCalculus::synthesis(int comp, const CVec& c) const { return transform(comp, c, false); }

Field TensorCalculus::apply(const std::function<cplx(double)>& g, const Field& f) const {
  if (f.grid != grid_) throw Error("tensor: field grid does not match");
  Field out(grid_);
  for (int c = 0; c < 2; ++c) {
    CVec v = analysis(c, c == 0 ? f.comp1 : f.comp2);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const cplx gi = g(lambda_[c][i]);
      if (!std::isfinite(gi.real()) || !std::isfinite(gi.imag())) throw Error("tensor: function not finite on the spectrum");
      v[i] *= gi;
    }
    (c == 0 ? out.comp1 : out.comp2) = synthesis(c, v);
  }
  return out;
}

Field TensorCalculus::apply_adjoint(const std::function<cplx(double)>& g, const Field& f) const {
  Field w(grid_, f.comp1.cwiseQuotient(weight_[0].cast<cplx>()), f.comp2.cwiseQuotient(weight_[1].cast<cplx>()));
  Field out = apply([&g](double l) { return std::conj(g(l)); }, w);
  out.comp1 = out.comp1.cwiseProduct(weight_[0].cast<cplx>());
  out.comp2 = out.comp2.cwiseProduct(weight_[1].cast<cplx>());
  return out;
}

Field TensorCalculus::heat(const Field& f, double t) const {
  return apply([t](double l) { return cplx(std::exp(-t * l)); }, f);
}

Field TensorCalculus::bessel(const Field& f, double alpha) const {
  return apply([alpha](double l) { return cplx(std::pow(1 + std::sqrt(l), -alpha)); }, f);
}

Field TensorCalculus::halfwave(const Field& f, double t) const {
  if (t == 0.0) return f;
  return apply([t](double l) { return std::polar(1.0, t * std::sqrt(l)); }, f);
}

Field TensorCalculus::radial(const std::function<double(double)>& g, const Field& f) const {
  return apply([&g](double l) { return cplx(g(std::sqrt(l))); }, f);
}

}  // namespace rfio
