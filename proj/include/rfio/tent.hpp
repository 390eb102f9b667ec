#pragma once

#include <string>
#include <vector>

#include "rfio/core.hpp"

namespace rfio {

// C^2-valued function of (sigma, x) on a log-spaced ladder; weight[k] is the dsigma/sigma quadrature weight.
struct TentField {
  TorusGrid grid;
  std::vector<double> sigma;
  std::vector<double> weight;
  std::vector<Field> values;

  void validate() const;
};

enum class TentQ { Two, Infinity };

struct TentInfo {
  int dropped = 0;   // scales below h
  int clamped = 0;   // scales above length / 4
};

// Half-width in cells of the box inscribed in B(x, sigma); -1 for dropped scales.
int tent_box_radius(const TorusGrid& g, double sigma, bool* clamped = nullptr);

// Pointwise |F(sigma_k, .)|^2 box means (q = 2) or box maxima of |F| (q = infinity), combined over k.
// q = 2: A F(x) = (sum_k w_k mean_{B(x, sigma_k)} |F|^2)^{1/2};  q = infinity: sup_k sup_{B(x, sigma_k)} |F|.
RVec tent_profile(const TentField& F, TentQ q, TentInfo* info = nullptr);
// Per-slab contribution to the q = 2 profile: w * box mean of |u|^2 (accumulated into acc).
void accumulate_box_mean(const TorusGrid& g, const Field& u, double sigma, double w, RVec& acc, TentInfo* info = nullptr);
void accumulate_box_max(const TorusGrid& g, const Field& u, double sigma, RVec& acc, TentInfo* info = nullptr);
double profile_lp(const TorusGrid& g, const RVec& a, double p);

double tent_norm(const TentField& F, double p, TentQ q, TentInfo* info = nullptr);

// sup over dyadic boxes B centred at grid points of (|B|^{-1} int_0^{r_B} int_B |F|^2 dy dsigma/sigma)^{1/2}.
double carleson_norm(const TentField& F);

struct AtomCheck {
  bool ok = false;
  double normalization = 0;  // r^d int_0^r int_B |A|^2 dy dsigma/sigma
  double slack = 0;          // 1 - normalization
  double t1_proxy = 0;       // tent norm at p = 1 of A
  std::string diagnostic;
};

// Atom test on the tent over the box of half-width r (centre in physical coordinates).
AtomCheck atom_check(const TentField& A, const std::vector<double>& center, double r);

}  // namespace rfio
