#include "rfio/spectral1d.hpp"

#include <cmath>

namespace rfio {

Block1D assemble_block(const RVec& a_mid, const RVec& b_nodes, double h, BlockKind kind, int axis) {
  const Eigen::Index n = a_mid.size();
  if (b_nodes.size() != n || n < 2) throw Error("assemble_block: size mismatch");
  if (a_mid.minCoeff() <= 0 || b_nodes.minCoeff() <= 0) throw Error("assemble_block: non-positive weight rejected");
  Block1D B;
  B.axis = axis;
  B.kind = kind;
  B.h = h;
  B.matrix = RMat::Zero(n, n);
  RVec outer(n), plus(n);
  if (kind == BlockKind::L1) {
    outer = b_nodes;
    plus = a_mid;
  } else {
    outer = a_mid;
    for (Eigen::Index k = 0; k < n; ++k) plus[k] = b_nodes[(k + 1) % n];
  }
  const double s = 1.0 / (h * h);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index kp = (k + 1) % n, km = (k + n - 1) % n;
    const double ap = plus[k], am = plus[km];
    B.matrix(k, kp) += -outer[k] * ap * s;
    B.matrix(k, km) += -outer[k] * am * s;
    B.matrix(k, k) += outer[k] * (ap + am) * s;
  }
  B.weight = outer.cwiseInverse();
  return B;
}

SpectralBlock1D eigendecompose(const Block1D& block) {
  const RVec& w = block.weight;
  const RVec ws = w.cwiseSqrt();
  const RVec wis = ws.cwiseInverse();
  RMat S = ws.asDiagonal() * block.matrix * wis.asDiagonal();
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RMat> es(S);
  if (es.info() != Eigen::Success) throw Error("eigendecompose: eigensolver failure");
  SpectralBlock1D out;
  out.h = block.h;
  out.weight = w;
  out.eigenvalues = es.eigenvalues();
  const double lmax = std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < out.eigenvalues.size(); ++k) {
    if (out.eigenvalues[k] < -1e-10 * lmax)
      throw Error("eigendecompose: negative eigenvalue " + std::to_string(out.eigenvalues[k]));
    if (out.eigenvalues[k] < 0) out.eigenvalues[k] = 0;
  }
  // The periodic kernel is exactly the constants; its roundoff would otherwise leak into sqrt(lambda).
  if (out.eigenvalues[0] < 1e-10 * lmax) out.eigenvalues[0] = 0;
  out.vectors = wis.asDiagonal() * es.eigenvectors() / std::sqrt(block.h);
  out.analysis = out.vectors.transpose() * w.asDiagonal() * block.h;
  const RMat R = block.matrix * out.vectors - out.vectors * es.eigenvalues().asDiagonal();
  for (Eigen::Index k = 0; k < R.cols(); ++k)
    out.max_residual = std::max(out.max_residual, R.col(k).norm() / (1 + std::abs(out.eigenvalues[k])));
  const RMat G = out.analysis * out.vectors;
  out.gram_defect = (G - RMat::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
  return out;
}

CVec apply_function_1d(const SpectralBlock1D& s, const std::function<cplx(double)>& g, const CVec& v) {
  CVec c = s.analysis.cast<cplx>() * v;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const cplx gk = g(s.eigenvalues[k]);
    if (!std::isfinite(gk.real()) || !std::isfinite(gk.imag()))
      throw Error("apply_function_1d: function not finite on the spectrum");
    c[k] *= gk;
  }
  return s.vectors.cast<cplx>() * c;
}

std::pair<CVec, CVec> halfwave_1d(const SpectralBlock1D& s, double t, const CVec& v) {
  if (t == 0.0) return {v, CVec::Zero(v.size())};
  auto cosf = [t](double l) { return cplx(std::cos(t * std::sqrt(l))); };
  auto sincf = [t](double l) {
    const double x = t * t * l;
    if (x < 1e-4) return cplx(t * (1 - x / 6 + x * x / 120));
    const double r = std::sqrt(l);
    return cplx(std::sin(t * r) / r);
  };
  return {apply_function_1d(s, cosf, v), apply_function_1d(s, sincf, v)};
}

cplx periodic_cubic(const CVec& v, double h, double x) {
  const Eigen::Index n = v.size();
  const double s = x / h;
  const double fl = std::floor(s);
  const double t = s - fl;
  auto at = [&](long long k) {
    long long m = k % n;
    if (m < 0) m += n;
    return v[static_cast<Eigen::Index>(m)];
  };
  const long long k = static_cast<long long>(fl);
  const double w0 = -t * (t - 1) * (t - 2) / 6;
  const double w1 = (t + 1) * (t - 1) * (t - 2) / 2;
  const double w2 = -(t + 1) * t * (t - 2) / 2;
  const double w3 = (t + 1) * t * (t - 1) / 6;
  return w0 * at(k - 1) + w1 * at(k) + w2 * at(k + 1) + w3 * at(k + 2);
}

CVec transport_1d(const PrimitiveMap& pm, double h, double t, const CVec& v) {
  if (t == 0.0) return v;
  CVec out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = periodic_cubic(v, h, flow_chi(pm, t, k * h));
  return out;
}

}  // namespace rfio
