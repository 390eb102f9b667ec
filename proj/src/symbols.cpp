#include "rfio/symbols.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace rfio {

namespace {

using boost::math::quadrature::gauss_kronrod;

// Composite Gauss-Kronrod on uniform panels; the windows are only piecewise smooth at table resolution.
double integrate(const std::function<double(double)>& f, double a, double b, int panels = 64) {
  if (b <= a) return 0.0;
  double s = 0;
  for (int i = 0; i < panels; ++i)
    s += gauss_kronrod<double, 31>::integrate(f, a + (b - a) * i / panels, a + (b - a) * (i + 1) / panels, 0, 0);
  return s;
}

// Piecewise Chebyshev interpolant of a primitive G(x) = int_{x0}^x g on [x0, x1], barycentric evaluation.
struct ChebTable {
  double x0 = 0, x1 = 1;
  int panels = 64;
  int degree = 16;
  std::vector<double> nodes;   // reference nodes on [-1, 1]
  std::vector<double> bw;      // barycentric weights
  std::vector<double> values;  // panels * (degree + 1)

  ChebTable(const std::function<double(double)>& g, double a, double b) : x0(a), x1(b) {
    for (int k = 0; k <= degree; ++k) {
      nodes.push_back(-std::cos(kPi * k / degree));
      bw.push_back((k % 2 ? -1.0 : 1.0) * ((k == 0 || k == degree) ? 0.5 : 1.0));
    }
    const double h = (x1 - x0) / panels;
    double offset = 0;
    for (int p = 0; p < panels; ++p) {
      const double l = x0 + p * h;
      for (int k = 0; k <= degree; ++k) {
        const double x = l + 0.5 * h * (nodes[k] + 1);
        values.push_back(offset + gauss_kronrod<double, 61>::integrate(g, l, x, 0, 0));
      }
      offset = values.back();
    }
  }
  double total() const { return values.back(); }
  double operator()(double x) const {
    const double h = (x1 - x0) / panels;
    const int p = std::clamp(static_cast<int>(std::floor((x - x0) / h)), 0, panels - 1);
    const double t = 2 * (x - x0 - p * h) / h - 1;
    const double* v = &values[static_cast<std::size_t>(p) * (degree + 1)];
    double num = 0, den = 0;
    for (int k = 0; k <= degree; ++k) {
      const double d = t - nodes[k];
      if (d == 0.0) return v[k];
      const double w = bw[k] / d;
      num += w * v[k];
      den += w;
    }
    return num / den;
  }
};

double psi_norm() {
  static const double v = integrate(
      [](double u) {
        const double b = bump((4 * u - 5) / 3);
        return b * b / u;
      },
      0.5, 2.0);
  return v;
}

// B(x) = int_0^x bump(2y-1) dy / Z on [0, 1].
const ChebTable& step_table() {
  static const ChebTable T([](double y) { return bump(2 * y - 1); }, 0.0, 1.0);
  return T;
}

// G(u) = int_{1/2}^u Psi(v)^2 dv/v on [1/2, 2]; the tail is 1 - G(u) / G(2).
const ChebTable& tail_table() {
  static const ChebTable T(
      [](double v) {
        const double p = Psi(v);
        return p * p / v;
      },
      0.5, 2.0);
  return T;
}

}  // namespace

double bump(double t) {
  if (std::abs(t) >= 1) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

double Psi(double u) {
  if (u <= 0.5 || u >= 2.0) return 0.0;
  return bump((4 * u - 5) / 3) / std::sqrt(psi_norm());
}

double Psi_tail(double u) {
  if (u <= 0.5) return 1.0;
  if (u >= 2.0) return 0.0;
  const auto& T = tail_table();
  return std::clamp(1.0 - T(u) / T.total(), 0.0, 1.0);
}

double phi_window(double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  const auto& T = step_table();
  return std::clamp(1.0 - T(2 * (r - 0.5)) / T.total(), 0.0, 1.0);
}

double c_sigma(int d, double sigma) {
  if (!(sigma > 0)) throw Error("c_sigma: sigma must be positive");
  const double s = std::sqrt(sigma);
  if (d == 1) {
    const double v = phi_window(2.0 / s);
    return 1.0 / std::sqrt(1.0 + v * v);
  }
  if (d != 2) throw Error("c_sigma: only d in {1, 2} supported");
  auto ang = [s](double r) { return r >= 2.0 ? kPi : 2 * std::asin(r / 2); };
  const double a1 = ang(0.5 * s), a2 = ang(s);
  const double inner = a1;
  const double trans = integrate(
      [s](double a) {
        const double v = phi_window(2 * std::abs(std::sin(0.5 * a)) / s);
        return v * v;
      },
      a1, a2);
  return 1.0 / std::sqrt(2 * (inner + trans));
}

ScaleLadder log_ladder(double top, double octaves, int J) {
  if (J < 1) throw Error("log_ladder: J must be >= 1");
  const int n = static_cast<int>(std::lround(octaves * J));
  ScaleLadder L;
  for (int k = 0; k <= n; ++k) {
    L.sigma.push_back(top * std::pow(2.0, -double(k) / J));
    L.weight.push_back(std::log(2.0) / J * ((k == 0 || k == n) ? 0.5 : 1.0));
  }
  if (n == 0) L.weight[0] = 0.0;
  return L;
}

}  // namespace rfio
