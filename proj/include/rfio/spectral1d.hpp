#pragma once

#include <functional>
#include <utility>

#include "rfio/coeffs.hpp"
#include "rfio/core.hpp"

namespace rfio {

enum class BlockKind { L1, L2 };

// Flux-form 1D block on a periodic grid of n cells:
//   L1: (Bu)_k = -b_k (a_{k+1/2}(u_{k+1}-u_k) - a_{k-1/2}(u_k-u_{k-1})) / h^2        (weight 1/b)
//   L2: (Bv)_k = -a_{k+1/2} (b_{k+1}(v_{k+1}-v_k) - b_k(v_k-v_{k-1})) / h^2          (weight 1/a_{k+1/2})
struct Block1D {
  int axis = 0;
  BlockKind kind = BlockKind::L1;
  double h = 1.0;
  RMat matrix;
  RVec weight;
};

Block1D assemble_block(const RVec& a_mid, const RVec& b_nodes, double h, BlockKind kind, int axis = 0);

struct SpectralBlock1D {
  RVec eigenvalues;   // ascending, clamped at 0
  RMat vectors;       // columns e_k, weighted-orthonormal
  RMat analysis;      // E^{-1} = E^T W h
  RVec weight;
  double h = 1.0;
  double max_residual = 0.0;
  double gram_defect = 0.0;
};

SpectralBlock1D eigendecompose(const Block1D& block);

CVec apply_function_1d(const SpectralBlock1D& s, const std::function<cplx(double)>& g, const CVec& v);
// (cos(t sqrt B) v, sin(t sqrt B) B^{-1/2} v)
std::pair<CVec, CVec> halfwave_1d(const SpectralBlock1D& s, double t, const CVec& v);

// v o chi(t, .) on the grid nodes, periodic cubic interpolation.
CVec transport_1d(const PrimitiveMap& pm, double h, double t, const CVec& v);
// Periodic 4-point cubic interpolation of nodal samples at arbitrary x.
cplx periodic_cubic(const CVec& v, double h, double x);

}  // namespace rfio
