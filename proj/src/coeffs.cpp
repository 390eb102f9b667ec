#include "rfio/coeffs.hpp"

#include <algorithm>
#include <boost/functional/hash.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>
#include <sstream>

namespace rfio {

namespace {

double wrap(double x, double len, double* periods = nullptr) {
  const double m = std::floor(x / len);
  if (periods) *periods = m;
  double r = x - m * len;
  if (r >= len) r -= len;
  if (r < 0) r = 0;
  return r;
}

// int_0^dx 1/(a0 + s t) dt
double linear_inverse_integral(double a0, double s, double dx) {
  const double z = s * dx / a0;
  if (std::abs(z) < 1e-7) return dx / a0 * (1 - z / 2 + z * z / 3);
  return std::log1p(z) / s;
}

double gk(const std::function<double(double)>& f, double x0, double x1) {
  if (x1 <= x0) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double y) { return 1.0 / f(y); }, x0, x1, 12, 1e-15);
}

}  // namespace

Coefficient1D Coefficient1D::constant(double c, double length) {
  if (!(c > 0)) throw Error("coefficient must be positive");
  return piecewise_linear({0.0}, {c}, length);
}

Coefficient1D Coefficient1D::piecewise_linear(std::vector<double> knots, std::vector<double> values, double length) {
  if (knots.empty() || knots.size() != values.size()) throw Error("piecewise_linear: knots/values mismatch");
  if (knots.front() != 0.0) throw Error("piecewise_linear: first knot must be 0");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1]) || knots[i] >= length) throw Error("piecewise_linear: knots must increase in [0, length)");
  for (double v : values)
    if (!(v > 0) || !std::isfinite(v)) throw Error("coefficient must be positive (positivity rejected)");
  Coefficient1D c;
  c.kind_ = Kind::Linear;
  c.length_ = length;
  c.knots_ = std::move(knots);
  c.values_ = std::move(values);
  c.finish_linear();
  return c;
}

void Coefficient1D::finish_linear() {
  const std::size_t m = knots_.size();
  min_ = *std::min_element(values_.begin(), values_.end());
  max_ = *std::max_element(values_.begin(), values_.end());
  lip_ = 0;
  cum_.assign(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double x0 = knots_[i];
    const double x1 = (i + 1 < m) ? knots_[i + 1] : length_;
    const double v0 = values_[i];
    const double v1 = values_[(i + 1) % m];
    const double s = (v1 - v0) / (x1 - x0);
    lip_ = std::max(lip_, std::abs(s));
    cum_[i + 1] = cum_[i] + linear_inverse_integral(v0, s, x1 - x0);
  }
  period_integral_ = cum_[m];
}

Coefficient1D Coefficient1D::smooth(std::function<double(double)> f, double lipschitz, double length, int probes) {
  Coefficient1D c;
  c.kind_ = Kind::Smooth;
  c.length_ = length;
  c.f_ = std::move(f);
  c.lip_ = lipschitz;
  c.min_ = 1e300;
  c.max_ = -1e300;
  for (int i = 0; i < probes; ++i) {
    const double v = c.f_(length * i / probes);
    if (!(v > 0) || !std::isfinite(v)) throw Error("coefficient must be positive (positivity rejected)");
    c.min_ = std::min(c.min_, v);
    c.max_ = std::max(c.max_, v);
  }
  const int cells = 256;
  c.knots_.resize(cells);
  c.cum_.assign(cells + 1, 0.0);
  for (int i = 0; i < cells; ++i) {
    c.knots_[i] = length * i / cells;
    c.cum_[i + 1] = c.cum_[i] + gk(c.f_, length * i / cells, length * (i + 1) / cells);
  }
  c.period_integral_ = c.cum_[cells];
  return c;
}

double Coefficient1D::operator()(double x) const {
  const double r = wrap(x, length_);
  if (kind_ == Kind::Smooth) return f_(r);
  const std::size_t m = knots_.size();
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), r) - knots_.begin()) - 1;
  const double x0 = knots_[i];
  const double x1 = (i + 1 < m) ? knots_[i + 1] : length_;
  const double v0 = values_[i];
  const double v1 = values_[(i + 1) % m];
  return v0 + (v1 - v0) * (r - x0) / (x1 - x0);
}

double Coefficient1D::local_primitive(double r) const {
  const std::size_t m = knots_.size();
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), r) - knots_.begin()) - 1;
  if (kind_ == Kind::Smooth) return cum_[i] + gk(f_, knots_[i], r);
  const double x0 = knots_[i];
  const double x1 = (i + 1 < m) ? knots_[i + 1] : length_;
  const double v0 = values_[i];
  const double v1 = values_[(i + 1) % m];
  const double s = (v1 - v0) / (x1 - x0);
  return cum_[i] + linear_inverse_integral(v0, s, r - x0);
}

double Coefficient1D::inverse_primitive(double x) const {
  double periods = 0;
  const double r = wrap(x, length_, &periods);
  return periods * period_integral_ + local_primitive(r);
}

ProfileKind parse_profile_kind(const std::string& s) {
  if (s == "constant") return ProfileKind::Constant;
  if (s == "sawtooth") return ProfileKind::Sawtooth;
  if (s == "bump") return ProfileKind::Bump;
  if (s == "random_lipschitz") return ProfileKind::RandomLipschitz;
  throw Error("unknown profile kind: " + s);
}

std::string to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::Constant: return "constant";
    case ProfileKind::Sawtooth: return "sawtooth";
    case ProfileKind::Bump: return "bump";
    case ProfileKind::RandomLipschitz: return "random_lipschitz";
  }
  return "?";
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& k, double def) {
  auto it = p.find(k);
  return it == p.end() ? def : it->second;
}

// Triangle wave with `teeth` periods per box, values base +- amp, minimum at x = -phase * L / teeth.
Coefficient1D make_sawtooth(double base, double amp, int teeth, double phase, double len) {
  if (teeth < 1) throw Error("sawtooth: teeth must be >= 1");
  if (!(base - std::abs(amp) > 0)) throw Error("sawtooth: params violate positivity");
  const double tooth = len / teeth;
  auto tri = [&](double x) {
    double s = x / tooth + phase;
    s -= std::floor(s);
    return s < 0.5 ? -1 + 4 * s : 3 - 4 * s;
  };
  std::vector<double> knots{0.0};
  for (int m = -2; m <= 2 * teeth + 2; ++m) {
    const double x = (0.5 * m - phase) * tooth;
    if (x > 1e-12 * len && x < len * (1 - 1e-12)) knots.push_back(x);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end(), [&](double a, double b) { return std::abs(a - b) < 1e-12 * len; }),
              knots.end());
  std::vector<double> vals;
  for (double x : knots) vals.push_back(base + amp * tri(x));
  return Coefficient1D::piecewise_linear(knots, vals, len);
}

Coefficient1D make_bump(double base, double amp, double width, double center, double len) {
  if (!(base - std::abs(amp) > 0)) throw Error("bump: params violate positivity");
  auto f = [=](double x) {
    double r = x - center;
    r -= len * std::round(r / len);
    const double t = r / (0.5 * width * len);
    if (std::abs(t) >= 1) return base;
    return base + amp * std::exp(1 - 1 / (1 - t * t));
  };
  double lip = 0;
  const int probes = 8192;
  for (int i = 0; i < probes; ++i) {
    const double x0 = len * i / probes, x1 = len * (i + 1) / probes;
    lip = std::max(lip, std::abs(f(x1) - f(x0)) / (x1 - x0));
  }
  return Coefficient1D::smooth(f, lip * 1.01, len);
}

Coefficient1D make_random(double base, double amp, double cap, int knots, double len, std::mt19937_64& rng) {
  if (!(base - std::abs(amp) > 0)) throw Error("random_lipschitz: params violate positivity");
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> u(knots);
  for (auto& v : u) v = U(rng);
  const double dx = len / knots;
  double maxjump = 0;
  for (int i = 0; i < knots; ++i) maxjump = std::max(maxjump, std::abs(u[(i + 1) % knots] - u[i]));
  const double A = maxjump > 0 ? std::min(amp, cap * dx / maxjump) : amp;
  std::vector<double> xs, vs;
  for (int i = 0; i < knots; ++i) {
    xs.push_back(i * dx);
    vs.push_back(base + A * u[i]);
  }
  return Coefficient1D::piecewise_linear(xs, vs, len);
}

}  // namespace

CoefficientProfile make_profile_from_coefficients(const TorusGrid& grid, std::vector<Coefficient1D> a) {
  CoefficientProfile p;
  p.d = grid.d;
  p.grid = grid;
  if (static_cast<int>(a.size()) != 2 * grid.d) throw Error("profile: need 2d coefficients");
  p.a = std::move(a);
  const double h = grid.h();
  p.lambda = 1e300;
  p.Lambda = -1e300;
  for (int j = 0; j < 2 * grid.d; ++j) {
    RVec nd(grid.n), md(grid.n);
    for (int k = 0; k < grid.n; ++k) {
      nd[k] = p.a[j](k * h);
      md[k] = p.a[j]((k + 0.5) * h);
    }
    double slope = 0;
    for (int k = 0; k < grid.n; ++k) slope = std::max(slope, std::abs(nd[(k + 1) % grid.n] - nd[k]) / h);
    p.lambda = std::min({p.lambda, nd.minCoeff(), md.minCoeff(), p.a[j].min()});
    p.Lambda = std::max({p.Lambda, nd.maxCoeff(), md.maxCoeff(), p.a[j].max()});
    p.nodes.push_back(nd);
    p.midpoints.push_back(md);
    p.lip.push_back(slope);
  }
  if (!(p.lambda > 0)) throw Error("profile: coefficients must be bounded below by a positive constant");
  return p;
}

CoefficientProfile make_profile(ProfileKind kind, const TorusGrid& grid, const std::map<std::string, double>& params,
                                std::uint64_t seed) {
  const int d = grid.d;
  const double len = grid.length;
  std::vector<Coefficient1D> a;
  std::mt19937_64 rng(seed);
  for (int j = 0; j < 2 * d; ++j) {
    const bool top = j >= d;
    switch (kind) {
      case ProfileKind::Constant: {
        const double c = param(params, "c", 1.0);
        a.push_back(Coefficient1D::constant(top ? param(params, "c_top", c) : c, len));
        break;
      }
      case ProfileKind::Sawtooth: {
        const double phase = top ? param(params, "phase", 0.25) : 0.0;
        a.push_back(make_sawtooth(param(params, "base", 1.0), param(params, "amp", 0.25),
                                  static_cast<int>(param(params, "teeth", 4)), phase, len));
        break;
      }
      case ProfileKind::Bump: {
        const double center = 0.5 * len + (top ? param(params, "phase", 0.25) * len : 0.0);
        a.push_back(make_bump(param(params, "base", 1.0), param(params, "amp", 0.25), param(params, "width", 0.5), center,
                              len));
        break;
      }
      case ProfileKind::RandomLipschitz:
        a.push_back(make_random(param(params, "base", 1.0), param(params, "amp", 0.25), param(params, "cap", 0.5),
                                static_cast<int>(param(params, "knots", 8)), len, rng));
        break;
    }
  }
  CoefficientProfile p = make_profile_from_coefficients(grid, std::move(a));
  p.kind = kind;
  p.params = params;
  p.seed = seed;
  return p;
}

bool CoefficientProfile::constant() const {
  for (const auto& c : a)
    if (!c.is_constant()) return false;
  return true;
}

double CoefficientProfile::commutativity_indicator() const {
  std::vector<RVec> ratio;
  for (int j = 0; j < d; ++j) ratio.push_back(nodes[j + d].cwiseQuotient(nodes[j]));
  double ind = 0;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      if (j == k) continue;
      ind = std::max({ind, std::abs(ratio[j].maxCoeff() - ratio[k].minCoeff()),
                      std::abs(ratio[j].minCoeff() - ratio[k].maxCoeff())});
    }
  return ind;
}

std::string CoefficientProfile::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << "kind=" << to_string(kind) << "\n";
  for (const auto& [k, v] : params) os << "param." << k << "=" << v << "\n";
  os << "seed=" << seed << "\nlambda=" << lambda << "\nLambda=" << Lambda << "\n";
  for (std::size_t j = 0; j < lip.size(); ++j) os << "lip" << j + 1 << "=" << lip[j] << "\n";
  return os.str();
}

std::uint64_t CoefficientProfile::hash() const {
  std::size_t h = 0;
  const std::string s = serialize();
  boost::hash_combine(h, s);
  boost::hash_combine(h, grid.n);
  boost::hash_combine(h, grid.d);
  return static_cast<std::uint64_t>(h);
}

PrimitiveMap::PrimitiveMap(const Coefficient1D& a) : a_(a), period_(a.inverse_primitive(a.length())) {
  if (!(a.min() > 0)) throw Error("primitive: non-positive coefficient rejected");
  const int m = 1024;
  for (int i = 0; i <= m; ++i) {
    const double x = a.length() * i / m;
    xs_.push_back(x);
    ys_.push_back(i == m ? period_ : a.inverse_primitive(x));
  }
}

double PrimitiveMap::phi(double x) const { return a_.inverse_primitive(x); }

double PrimitiveMap::phi_inverse(double y, double tol) const {
  const double m = std::floor(y / period_);
  double r = y - m * period_;
  if (r < 0) r = 0;
  if (r > period_) r = period_;
  std::size_t i = static_cast<std::size_t>(std::upper_bound(ys_.begin(), ys_.end(), r) - ys_.begin());
  i = std::clamp<std::size_t>(i, 1, ys_.size() - 1);
  double lo = xs_[i - 1], hi = xs_[i];
  double x = lo + (hi - lo) * (r - ys_[i - 1]) / std::max(ys_[i] - ys_[i - 1], 1e-300);
  for (int it = 0; it < 100; ++it) {
    const double g = a_.inverse_primitive(x) - r;
    if (std::abs(g) <= tol * std::max(1.0, std::abs(r))) break;
    if (g > 0) hi = x; else lo = x;
    double xn = x - g * a_(x);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (xn == x) break;
    x = xn;
  }
  return m * a_.length() + x;
}

double flow_chi(const PrimitiveMap& pm, double t, double x) {
  if (t == 0.0) return x;
  return pm.phi_inverse(t + pm.phi(x));
}

double flow_jacobian(const Coefficient1D& a, const PrimitiveMap& pm, double t, double x) {
  if (t == 0.0) return 1.0;
  return a(flow_chi(pm, t, x)) / a(x);
}

}  // namespace rfio
