#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rfio/core.hpp"
#include "rfio/wavepackets.hpp"

namespace rfio {

// m_omega = phit_omega * mt_omega * (1 - r^2) and q_omega = phit_omega * mt_omega * r^2, where
// mt_omega = exp(-i omega.zeta + i |zeta|) - 1 and int_0^1 int psi_{nu,sigma}^2 dnu dsigma/sigma = 1 - r^2.
// phit_omega = (1 - phi(8 |zeta|)) phi(|zeta^ - omega| |zeta|^{1/2} / 4): one on supp phi_omega, zero for
// |zeta| < 1/16 or |zeta^ - omega| > 4 |zeta|^{-1/2}.
class MultiplierSymbol {
 public:
  MultiplierSymbol(std::shared_ptr<const WavePacketFrame> frame, double omega);

  double omega() const { return omega_; }
  double phit(double z1, double z2) const;
  cplx mt(double z1, double z2) const;
  cplx m(double z1, double z2) const;
  cplx q(double z1, double z2) const;

 private:
  std::shared_ptr<const WavePacketFrame> frame_;
  double omega_;
  double c_, s_;
};

struct MarcinkiewiczRow {
  std::string alpha;   // "0", "e1", "e2", "e1+e2"
  double sup_m = 0;
  double sup_q = 0;
};

struct MarcinkiewiczOptions {
  double rho_min = 1.0 / 32;
  double rho_max = 256;
  int per_octave = 16;   // radial nodes per octave
  int angles = 512;      // angular nodes on the full circle
  double delta = 0.02;   // log step of the multiplicative differences
};

// sup |zeta^a d^a m_omega| and the same for q_omega on a log-polar grid, with zeta written in the frame
// (omega, omega^perp); zeta_j d_j is the centred difference in log |zeta_j|.
std::vector<MarcinkiewiczRow> marcinkiewicz_check(const MultiplierSymbol& s, const MarcinkiewiczOptions& opt = {});

}  // namespace rfio
