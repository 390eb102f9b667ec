#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rfio/coeffs.hpp"
#include "rfio/dirac.hpp"
#include "rfio/hpfio.hpp"
#include "rfio/opnorm.hpp"
#include "rfio/tensor.hpp"

namespace rfio {

// Pipeline stages backed by the tensor calculus; adjoints use TensorCalculus::apply_adjoint.
Stage halfwave_stage(const TensorCalculus& T, double t);
Stage bessel_stage(const TensorCalculus& T, double alpha);
Stage heat_stage(const TensorCalculus& T, double t);
// Smooth band limit phi(sqrt L / kmax): one below kmax / 2, zero above kmax.
Stage band_stage(const TensorCalculus& T, double kmax);

// Narrow Gaussians evolved by exp(-i t sqrt L) on each component: they refocus under exp(i t sqrt L).
std::vector<Field> focusing_seeds(const TensorCalculus& T, double t, const std::vector<double>& widths_in_cells);
// Radial packets Psi(sigma sqrt L) delta at the box centre, one per component and scale.
std::vector<Field> packet_seeds(const TensorCalculus& T, const std::vector<double>& sigmas);

struct FixedTimeSpec {
  int d = 2;
  double p = 4;
  double alpha = 0;
  double t = 1;
  std::vector<int> grid_sizes{32, 64, 128};
  ProfileKind profile = ProfileKind::Constant;
  std::map<std::string, double> params;
  double length = 2 * kPi;
  Coupling coupling = Coupling::HalfShift;
  std::uint64_t seed = 1;
  int iters = 40;
  int restarts = 4;
  std::vector<double> seed_widths{1.0, 1.5, 2.0, 3.0};
  int J = 8;  // frame scales per octave; the band limit is the frame range 2 / sigma_min
};

struct FixedTimeRow {
  int d = 2;
  double p = 0, alpha = 0, t = 0;
  int N = 0;
  double estimate = 0;
  double ratio = 0;  // estimate / estimate at the previous N (0 for the first row)
  std::uint64_t seed = 0;
  std::uint64_t profile_hash = 0;
  double adjoint_defect = 0;
  double band = 0;
};

// opnorm estimate of f -> (I + sqrt L)^{-alpha} exp(i t sqrt L) chi(sqrt L) f for each grid size, with chi the
// band limit to the frame range of that grid.
std::vector<FixedTimeRow> fixed_time_norm(const FixedTimeSpec& spec);

struct BesovResult {
  double value = 0;
  double tau = 0;  // maximizing tau
  int comp = 0;    // maximizing component (0: L1, 1: L2)
};

// max_k sup_tau tau^{-s} ||phi(tau^2 L_k) g0||_inf, phi(z) = z e^{-z}, g0 the mean-zero part of g;
// tau runs over 2^{j/8} from h/2 to the box length.
BesovResult besov_norm(const TensorCalculus& T, const CVec& g, double s);
inline double besov_window(double z) { return z * std::exp(-z); }

struct PerturbedResult {
  Field value;
  double shift = 0;         // upward spectral shift applied before the square root
  double min_real = 0;      // min Re lambda of L~ before the shift
  std::string diagnostic;
};

// Dense limit for the perturbed route: 2 n^d unknowns.
constexpr std::size_t kPerturbedDenseMax = 6000;
// exp(i t sqrt(L~)) f with L~ = diag(L1, L2) + sum_j g_j d_j (central differences) on both components.
PerturbedResult perturbed_halfwave(const DiracOperator& op, const std::vector<RVec>& drift, double t, const Field& f);

struct TransportRatio {
  std::vector<double> per_direction;
  double max_ratio = 0;
  double mean_ratio = 0;
};

// ||phi_omega(D)(exp(i t sqrt L) - exp(i t omega.D)) f||_p / ||phi_omega(D) f||_p over the outer directions.
TransportRatio halfwave_vs_transport(const HpfioContext& ctx, const Field& f, double p, double t = 1.0);

}  // namespace rfio
