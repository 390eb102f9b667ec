#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rfio/core.hpp"

namespace rfio {

// Periodic positive Lipschitz function of one variable.
class Coefficient1D {
 public:
  static Coefficient1D constant(double c, double length);
  // Linear interpolation of (knots, values), periodic with the first knot at 0.
  static Coefficient1D piecewise_linear(std::vector<double> knots, std::vector<double> values, double length);
  static Coefficient1D smooth(std::function<double(double)> f, double lipschitz, double length, int probes = 4096);

  double operator()(double x) const;
  double length() const { return length_; }
  double min() const { return min_; }
  double max() const { return max_; }
  double lipschitz() const { return lip_; }
  bool is_constant() const { return min_ == max_; }
  // Antiderivative of 1/a, with F(0) = 0 and F(x + length) = F(x) + F(length).
  double inverse_primitive(double x) const;

 private:
  enum class Kind { Linear, Smooth };
  Kind kind_ = Kind::Linear;
  double length_ = 1.0;
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> cum_;  // F at knots (linear) or at cell ends (smooth)
  std::function<double(double)> f_;
  double min_ = 1.0, max_ = 1.0, lip_ = 0.0;
  double period_integral_ = 0.0;
  double local_primitive(double r) const;
  void finish_linear();
};

enum class ProfileKind { Constant, Sawtooth, Bump, RandomLipschitz };

ProfileKind parse_profile_kind(const std::string& s);
std::string to_string(ProfileKind k);

// The 2d coefficients a_1..a_2d; a_j and a_{j+d} act along axis j (zero-based: a[j], a[j+d]).
struct CoefficientProfile {
  int d = 1;
  TorusGrid grid;
  ProfileKind kind = ProfileKind::Constant;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  std::vector<Coefficient1D> a;
  std::vector<RVec> nodes;     // a[j] at x_k
  std::vector<RVec> midpoints;  // a[j] at x_{k+1/2}
  double lambda = 1.0;
  double Lambda = 1.0;
  std::vector<double> lip;  // discrete slope bound per coefficient

  bool constant() const;
  // max_{j,k} osc(a_{j+d}/a_j - a_{k+d}/a_k) on the node grid; zero iff the D_j commute for constant ratios.
  double commutativity_indicator() const;
  std::string serialize() const;
  std::uint64_t hash() const;
};

// Recognized params: constant {c, c_top}; sawtooth {base, amp, teeth, phase}; bump {base, amp, width};
// random_lipschitz {base, amp, cap, knots}. Coefficients j+d use the "_top" or phase-shifted variant.
CoefficientProfile make_profile(ProfileKind kind, const TorusGrid& grid, const std::map<std::string, double>& params,
                                std::uint64_t seed = 0);
CoefficientProfile make_profile_from_coefficients(const TorusGrid& grid, std::vector<Coefficient1D> a);

// Sampled view of phi(x) = int_0^x dy/a(y) with its inverse.
class PrimitiveMap {
 public:
  explicit PrimitiveMap(const Coefficient1D& a);
  double phi(double x) const;
  double phi_inverse(double y, double tol = 1e-13) const;
  double period() const { return period_; }
  const Coefficient1D& coefficient() const { return a_; }

 private:
  Coefficient1D a_;
  std::vector<double> xs_, ys_;  // bracketing table
  double period_;
};

// chi(t, x) = phi^{-1}(t + phi(x)), solving d/dt chi = a(chi).
double flow_chi(const PrimitiveMap& pm, double t, double x);
double flow_jacobian(const Coefficient1D& a, const PrimitiveMap& pm, double t, double x);

}  // namespace rfio
