#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rfio/core.hpp"
#include "rfio/symbols.hpp"

namespace rfio {

struct FrameParams {
  int d = 2;
  double octaves = 3;       // K: high scales run from 1 down to 2^-K
  int J = 8;                // scales per octave
  double c_dir = 20 * kPi;  // |Omega_sigma| = ceil(c_dir sigma^{-(d-1)/2})
  double sigma_top = 8;     // largest low-frequency scale
  bool normalize = true;    // divide phi_omega by (int phi_nu^2 dnu)^{1/2}
};

// Directions are angles in d = 2; in d = 1 the two directions +1, -1 are the angles 0 and pi.
// Frequencies are passed in polar form (rho = |zeta|, alpha = angle of zeta).
class WavePacketFrame {
 public:
  explicit WavePacketFrame(const FrameParams& p);

  const FrameParams& params() const { return p_; }
  int d() const { return p_.d; }
  // All scales, descending from sigma_top to sigma_min, trapezoid weights in dsigma/sigma.
  const ScaleLadder& ladder() const { return ladder_; }
  // Index of sigma = 1 in ladder(); scales at or after it form the high-frequency part.
  std::size_t first_high() const { return first_high_; }
  std::vector<std::size_t> high_indices() const;
  std::vector<std::size_t> low_indices() const;
  double sigma_min() const { return ladder_.sigma.back(); }
  // Frequencies with |zeta| <= resolved_band() are fully covered by the ladder.
  double resolved_band() const { return 0.5 / sigma_min(); }

  int directions(double sigma) const;
  std::vector<double> direction_angles(double sigma) const;
  // Uniform measure of one direction in a set of m directions (2 pi / m in d = 2, 1 in d = 1).
  double direction_weight(int m) const;
  double sphere_measure() const { return p_.d == 1 ? 2.0 : 2 * kPi; }

  double c(double sigma) const;
  double phi_sigma(double omega, double sigma, double alpha) const;
  double psi(double omega, double sigma, double rho, double alpha) const;
  double phi_omega_raw(double omega, double rho, double alpha) const;
  double phi_omega(double omega, double rho, double alpha) const;
  // phi_omega on a ring of angles, sharing the radial normalization.
  void phi_omega_ring(double omega, double rho, const std::vector<double>& alpha, std::vector<double>& out) const;
  double phi_norm(double rho) const;
  double r(double rho) const;
  double q(double rho) const { return r(rho); }

 private:
  FrameParams p_;
  ScaleLadder ladder_;
  std::size_t first_high_ = 0;
  std::vector<double> ladder_c_;
  std::vector<double> tau_c_;      // c at tau_k = 4 * 2^{-k/J}
  std::vector<double> pair_;       // angular pair integrals of phi_{e1,tau_k} phi_{e1,tau_k'}, banded
  int pair_band_ = 0;
  double tau_c(int k) const;
  void build_pair_table();
};

// Frame for a grid; rejects grids whose Nyquist frequency does not cover 2 / sigma_min.
WavePacketFrame build_frame(const FrameParams& p, const TorusGrid& grid);
// Smallest even n >= 8 resolving 2 / sigma_min on a box of the given length.
int required_n(double sigma_min, double length);
// sigma_min for a grid: the finest ladder scale 2^{-k/J} with sigma >= 1.25 h.
double grid_sigma_min(const TorusGrid& g, int J);

struct ResolutionReport {
  double psi_identity = 0;        // max |int int psi^2 - 1| on the resolved band
  double psi_identity_doubled = 0;
  double repro_l2 = 0;            // max over sigma of the angular deviation of sum phi_{omega,sigma}^2
  double radial_normalization = 0;
  std::vector<double> sigma;      // high scales
  std::vector<double> C_sigma;    // estimated reproducing constants
  double C_ratio = 0;
  double c_slope = 0;             // fitted slope of log c_sigma vs log sigma
};

ResolutionReport check_resolution(const WavePacketFrame& frame);

// Polar symbol chi(rho, alpha) with compact support in |zeta| <= rho_max, evaluated ring by ring.
struct PolarSymbol {
  std::function<void(double rho, const std::vector<double>& alpha, std::vector<double>& out)> ring;
  double rho_max = 1;
  std::string name;
  double operator()(double rho, double alpha) const;
};

// Base symbols (direction 0); rotations are applied by the calculus.
PolarSymbol packet_symbol(std::shared_ptr<const WavePacketFrame> frame, double sigma);
PolarSymbol directional_band_symbol(std::shared_ptr<const WavePacketFrame> frame, double sigma, int power = 1);
PolarSymbol directional_cut_symbol(std::shared_ptr<const WavePacketFrame> frame, double band, int power = 1);

}  // namespace rfio
