#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rfio {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Periodic box [0, length)^d sampled at n points per axis.
struct TorusGrid {
  int d = 1;
  int n = 8;
  double length = 2 * kPi;

  TorusGrid() = default;
  TorusGrid(int d_, int n_, double length_);

  double h() const { return length / n; }
  std::size_t cells() const;
  double cell_volume() const;
  double volume() const;
  // row-major: axis 0 is the slowest index
  std::size_t stride(int axis) const;
  int coord(std::size_t idx, int axis) const;
  std::size_t shifted(std::size_t idx, int axis, int offset) const;
  bool operator==(const TorusGrid& o) const { return d == o.d && n == o.n && length == o.length; }
  bool operator!=(const TorusGrid& o) const { return !(*this == o); }
};

// Angular wavenumber of FFT index m on an axis, with the Nyquist mode at -pi/h.
double wavenumber(const TorusGrid& g, int m);

// Pair (comp1, comp2) of complex grid functions.
struct Field {
  TorusGrid grid;
  CVec comp1;
  CVec comp2;

  Field() = default;
  explicit Field(const TorusGrid& g);
  Field(const TorusGrid& g, CVec c1, CVec c2);

  std::size_t size() const { return grid.cells(); }
  bool finite() const;
  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(cplx s);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(cplx s, Field a) { return a *= s; }
  // stacked [comp1; comp2]
  CVec stacked() const;
  static Field from_stacked(const TorusGrid& g, const CVec& x);
};

double lp_norm(const Field& f, double p);
double lp_norm_scalar(const TorusGrid& g, const CVec& u, double p);
double sup_norm(const Field& f);
// h^d sum (u conj(u') + v conj(v'))
cplx inner(const Field& a, const Field& b);
double l2_norm(const Field& f);

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void set_thread_cap(int n);
int thread_cap();
// Runs body(i) for i in [0, count); results must be written to per-index slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace rfio
