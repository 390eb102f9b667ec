#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "rfio/coeffs.hpp"
#include "rfio/core.hpp"
#include "rfio/krylov.hpp"
#include "rfio/spectral1d.hpp"

namespace rfio {

// How the d first-order factors are placed relative to each other.
//   Local:     U_j = -a_{j+d} d^-_j, V_j = a_j d^+_j (nearest-neighbour stencils only).
//   HalfShift: V_j additionally carries a unitary half-cell Fourier shift along every axis k != j
//              (and U_j its inverse), so all V_j u land on the same staggered lattice. The products
//              U_j V_j and V_j U_j are unchanged; at constant coefficients the D_j then commute.
// In d = 1 the two coincide.
enum class Coupling { Local, HalfShift };

std::string to_string(Coupling c);
Coupling parse_coupling(const std::string& s);

using Vec = Eigen::VectorXd;

class DiracOperator {
 public:
  DiracOperator(CoefficientProfile profile, Coupling coupling);

  const TorusGrid& grid() const { return profile_.grid; }
  const CoefficientProfile& profile() const { return profile_; }
  Coupling coupling() const { return coupling_; }
  int d() const { return profile_.d; }

  // Scalar factors on flat grid arrays.
  void apply_V(int j, const CVec& u, CVec& out) const;
  void apply_U(int j, const CVec& v, CVec& out) const;

  // (xi . D) f
  Field apply(const Vec& xi, const Field& f) const;
  void apply_stacked(const Vec& xi, const CVec& x, CVec& y) const;
  LinOp linop(const Vec& xi) const;
  // i (xi . D), as a linear operator on stacked vectors
  LinOp ilinop(const Vec& xi) const;

  // D.D = diag(L1, L2), assembled from the same factors.
  Field apply_L(const Field& f) const;
  // Dense matrix of xi . D on stacked vectors (small grids only).
  CMat dense(const Vec& xi) const;
  Eigen::SparseMatrix<double> sparse_L1() const;

  // Upper bound for ||xi . D||_2.
  double norm_bound(const Vec& xi) const;

  // exp(i xi . D) f
  Field exp_i(const Vec& xi, const Field& f, double tol = 1e-15) const;

  // Per-axis blocks for the flux-form L1 and L2.
  Block1D block(int axis, BlockKind kind) const;

  // Constant coefficients with a single ratio a_{j+d}/a_j, and a coupling for which the D_j commute.
  bool fourier_diagonal() const;

 private:
  CoefficientProfile profile_;
  Coupling coupling_;
  std::vector<RVec> vmid_;  // a_j at midpoints, expanded on the full grid along axis j
  std::vector<RVec> unod_;  // a_{j+d} at nodes, expanded
  void half_shift(int j, CVec& u, int sign) const;
};

// Block diagonalization of xi . D over the translations that leave the coefficients invariant.
// Sector q collects the Bloch waves x(s + P m) = exp(2 pi i q.m / T) x(s); sector vectors are indexed by
// component and site of the base period cell.
class BlochReduction {
 public:
  explicit BlochReduction(const DiracOperator& op);

  const std::vector<int>& periods() const { return period_; }  // cells per period along each axis
  int sectors() const { return sectors_; }
  int sector_dim() const { return dim_; }

  std::vector<CMat> matrices(const Vec& xi) const;
  // Stacked vector -> sector coefficients (sector_dim x sectors), and back.
  CMat forward(const CVec& x) const;
  CVec inverse(const CMat& X) const;

 private:
  const DiracOperator* op_;
  std::vector<int> period_, count_;
  int sectors_ = 1, dim_ = 0;
  std::vector<std::size_t> site_;           // base-cell site -> grid index
  std::vector<std::size_t> offset_;         // period index m -> grid index offset
  CMat phase_;                              // exp(-2 pi i q.m / T), (periods x sectors)
  std::vector<std::vector<CMat>> axis_;     // sector matrices of D_j
};

// Smallest period (in cells, dividing n) of the coefficients acting along each axis.
std::vector<int> coefficient_periods(const CoefficientProfile& p, double tol = 1e-12);

struct EigenDecomposition {
  CVec values;
  CMat vectors;
};
// General complex eigendecomposition (LAPACK zgeev); eigenvalues only when vectors is false.
EigenDecomposition eigen_general(CMat A, bool vectors = true);

// Mode-wise 2x2 symbol of xi . D at constant coefficients: [[0, b], [c, 0]].
struct ModeSymbol {
  cplx b, c;
};
ModeSymbol mode_symbol(const DiracOperator& op, const Vec& xi, const Eigen::Vector3d& kappa);

// Joint spectrum data at constant coefficients for the Fourier oracle.
struct JointMode {
  Eigen::Vector3d zeta;  // joint eigenvalue of the + branch (the - branch is -zeta)
  CMat proj_plus;        // 2x2 spectral projections
  CMat proj_minus;
};
JointMode joint_mode(const DiracOperator& op, const Eigen::Vector3d& kappa);

// psi(D) f at constant coefficients by exact mode-wise calculus.
Field fourier_oracle(const DiracOperator& op, const std::function<cplx(const Eigen::Vector3d&)>& psi, const Field& f);

struct GroupLawReport {
  Vec xi, eta;
  double defect = 0;
  double max_im_lambda = 0;
  double commutativity = 0;
};

// exp(i xi D) exp(i eta D) f versus exp(i(xi+eta) D) f over a family; max |Im lambda| needs a dense solve.
GroupLawReport group_law_probe(const DiracOperator& op, const Vec& xi, const Vec& eta, const std::vector<Field>& family,
                               bool spectrum = true);

struct SpeedMeasurement {
  double xi_norm = 0;
  double kappa_hat = 0;       // smallest kappa with relative mass beyond kappa |xi| below the threshold
  double bound_distance = 0;  // Lambda |xi| + slack
  double leakage = 0;         // relative mass beyond bound_distance
};

// Evolves a point source at the box centre by exp(i xi D) and measures its spread along xi/|xi|.
SpeedMeasurement measure_speed(const DiracOperator& op, const Vec& xi, double slack_cells = 4.0,
                               double threshold = 1e-8);

}  // namespace rfio
