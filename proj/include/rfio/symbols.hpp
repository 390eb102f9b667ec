#pragma once

#include <vector>

#include "rfio/core.hpp"

namespace rfio {

// exp(-1/(1-t^2)) on (-1, 1), zero elsewhere.
double bump(double t);

// Radial window: bump rescaled to (1/2, 2), normalized so that int_0^inf Psi(s u)^2 ds/s = 1.
double Psi(double u);
// int_u^inf Psi(v)^2 dv/v (1 for u <= 1/2, 0 for u >= 2).
double Psi_tail(double u);

// Angular window: 1 on [0, 1/2], 0 on [1, inf), smooth monotone transition (integrated bump).
double phi_window(double r);

// Gaussian window used for Phi_sigma.
inline double gauss_window(double u) { return std::exp(-u * u); }

// c_sigma = (int_{S^{d-1}} phi((e_1 - nu)/sqrt(sigma))^2 dnu)^{-1/2}; d in {1, 2}.
double c_sigma(int d, double sigma);

// Log-spaced ladder of scales with trapezoid weights in d sigma / sigma.
struct ScaleLadder {
  std::vector<double> sigma;
  std::vector<double> weight;
};
// sigma_k = top * 2^{-k/J}, k = 0..octaves*J; half weights at both ends.
ScaleLadder log_ladder(double top, double octaves, int J);

}  // namespace rfio
