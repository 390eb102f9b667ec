#pragma once

#include <functional>
#include <vector>

#include "rfio/dirac.hpp"
#include "rfio/spectral1d.hpp"

namespace rfio {

// Functions of L = diag(L1, L2) through the per-axis eigenbases: L_k is the Kronecker sum of its 1D blocks,
// so g(L_k) = E (g(lambda_1 (+) ... (+) lambda_d)) E^{-1} with E the tensor product of axis eigenvector matrices.
class TensorCalculus {
 public:
  explicit TensorCalculus(const DiracOperator& op);

  const TorusGrid& grid() const { return grid_; }
  const DiracOperator& op() const { return *op_; }
  // comp 0 carries the L1 blocks, comp 1 the L2 blocks.
  const SpectralBlock1D& block(int axis, int comp) const { return blocks_[comp][axis]; }
  const RVec& eigenvalues(int comp) const { return lambda_[comp]; }
  // Diagonal weights making L1, L2 self-adjoint (products of the axis weights).
  const RVec& weight(int comp) const { return weight_[comp]; }
  double kronecker_defect() const { return defect_; }

  CVec analysis(int comp, const CVec& u) const;
  CVec synthesis(int comp, const CVec& c) const;

  Field apply(const std::function<cplx(double)>& g, const Field& f) const;
  // Adjoint of g(L) in the unweighted pairing: W conj(g)(L) W^{-1}.
  Field apply_adjoint(const std::function<cplx(double)>& g, const Field& f) const;

  Field heat(const Field& f, double t) const;
  Field bessel(const Field& f, double alpha) const;  // (I + sqrt L)^{-alpha}
  Field halfwave(const Field& f, double t) const;    // exp(i t sqrt L)
  // Psi(sigma sqrt L) style radial functions of sqrt L.
  Field radial(const std::function<double(double)>& g, const Field& f) const;

 private:
  const DiracOperator* op_;
  TorusGrid grid_;
  std::vector<SpectralBlock1D> blocks_[2];
  std::vector<CMat> vec_[2], ana_[2];
  RVec lambda_[2];
  RVec weight_[2];
  double defect_ = 0;
  CVec transform(int comp, const CVec& u, bool forward) const;
};

// Applies a real n x n matrix along one axis of a flat row-major array.
void apply_along_axis(const TorusGrid& g, int axis, const CMat& A, CVec& u);

}  // namespace rfio
