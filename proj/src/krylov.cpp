#include "rfio/krylov.hpp"

#include <cmath>

namespace rfio {

CVec expmv_taylor(const LinOp& A, double anorm, cplx t, const CVec& v, double tol) {
  const double size = std::abs(t) * anorm;
  const int steps = std::max(1, static_cast<int>(std::ceil(size / 2.0)));
  const cplx tau = t / static_cast<double>(steps);
  CVec w = v;
  CVec term(v.size()), tmp(v.size());
  for (int s = 0; s < steps; ++s) {
    term = w;
    CVec acc = w;
    for (int k = 1; k < 200; ++k) {
      A(term, tmp);
      term = tmp * (tau / static_cast<double>(k));
      acc += term;
      if (term.norm() <= tol * acc.norm() && k > 2) break;
    }
    w = acc;
  }
  return w;
}

Arnoldi::Arnoldi(LinOp A, const CVec& v, int max_dim) : A_(std::move(A)) {
  V_ = CMat::Zero(v.size(), max_dim + 1);
  H_ = CMat::Zero(max_dim + 1, max_dim);
  beta_ = v.norm();
  if (beta_ == 0) {
    breakdown_ = true;
    return;
  }
  V_.col(0) = v / beta_;
}

int Arnoldi::extend(int m) {
  m = std::min<int>(m, static_cast<int>(H_.cols()));
  CVec w(V_.rows());
  while (m_ < m && !breakdown_) {
    const int j = m_;
    A_(V_.col(j), w);
    const double wn0 = w.norm();
    CVec h = CVec::Zero(j + 1);
    for (int pass = 0; pass < 2; ++pass) {
      const CVec c = V_.leftCols(j + 1).adjoint() * w;
      w -= V_.leftCols(j + 1) * c;
      h += c;
    }
    H_.col(j).head(j + 1) = h;
    const double wn = w.norm();
    H_(j + 1, j) = wn;
    ++m_;
    if (wn <= 1e-13 * std::max(wn0, 1e-300)) {
      breakdown_ = true;
      break;
    }
    V_.col(j + 1) = w / wn;
  }
  return m_;
}

RitzDecomposition ritz(const CMat& H) {
  Eigen::ComplexEigenSolver<CMat> es(H);
  if (es.info() != Eigen::Success) throw Error("ritz: eigensolver failure");
  RitzDecomposition r;
  r.values = es.eigenvalues();
  r.vectors = es.eigenvectors();
  CVec e1 = CVec::Zero(H.rows());
  e1[0] = 1;
  r.coeffs = r.vectors.partialPivLu().solve(e1);
  return r;
}

}  // namespace rfio
