#pragma once

#include <functional>

#include "rfio/core.hpp"

namespace rfio {

using LinOp = std::function<void(const CVec& x, CVec& y)>;

// exp(t A) v by substepped Taylor series; anorm is an upper bound for ||A||_2.
CVec expmv_taylor(const LinOp& A, double anorm, cplx t, const CVec& v, double tol = 1e-15);

// Arnoldi factorization A V_m = V_{m+1} Hbar_m with two-pass classical Gram-Schmidt.
class Arnoldi {
 public:
  Arnoldi(LinOp A, const CVec& v, int max_dim);
  // Extends the basis to dimension m (or stops at breakdown). Returns the reached dimension.
  int extend(int m);
  int dim() const { return m_; }
  bool breakdown() const { return breakdown_; }
  double beta() const { return beta_; }
  const CMat& basis() const { return V_; }
  CMat hessenberg() const { return H_.topLeftCorner(m_, m_); }
  double next_subdiagonal() const { return m_ > 0 ? std::abs(H_(m_, m_ - 1)) : 0.0; }

 private:
  LinOp A_;
  CMat V_;
  CMat H_;
  double beta_ = 0;
  int m_ = 0;
  bool breakdown_ = false;
};

// Eigen-decomposition of the Hessenberg matrix, reused for many functions g(H) e_1.
struct RitzDecomposition {
  CVec values;
  CMat vectors;
  CVec coeffs;  // V^{-1} e_1
};

RitzDecomposition ritz(const CMat& H);

}  // namespace rfio
