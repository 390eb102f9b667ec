#include "rfio/wavepackets.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace rfio {

namespace {

using boost::math::quadrature::gauss_kronrod;

double ang_dist(double alpha, double omega) { return 2 * std::abs(std::sin(0.5 * (alpha - omega))); }

int octave_count(double x) {
  const double l = std::log2(x);
  const int k = static_cast<int>(std::lround(l));
  if (std::abs(l - k) > 1e-12) throw Error("frame: sigma_top must be a power of two");
  return k;
}

// Half angle beyond which phi(|zeta^ - omega| / sqrt(tau)) vanishes.
double angular_support(double tau) {
  const double r = 0.5 * std::sqrt(tau);
  return r >= 1 ? kPi : 2 * std::asin(r);
}

}  // namespace

WavePacketFrame::WavePacketFrame(const FrameParams& p) : p_(p) {
  if (p_.d != 1 && p_.d != 2) throw Error("frame: only d in {1, 2} supported");
  if (p_.J < 1 || p_.octaves <= 0) throw Error("frame: need J >= 1 and K > 0");
  if (!(p_.c_dir > 0)) throw Error("frame: direction constant must be positive");
  const int low_oct = octave_count(p_.sigma_top);
  if (low_oct < 0) throw Error("frame: sigma_top must be >= 1");
  ladder_ = log_ladder(p_.sigma_top, p_.octaves + low_oct, p_.J);
  first_high_ = static_cast<std::size_t>(low_oct * p_.J);
  // tau_k = 4 * 2^{-k/J} down to the finest tau needed for |zeta| up to rho_cap.
  const double rho_cap = std::max(1024.0, 16.0 / sigma_min());
  const int kmax = static_cast<int>(std::ceil(p_.J * std::log2(8 * rho_cap))) + 1;
  tau_c_.resize(kmax + 1);
  for (int k = 0; k <= kmax; ++k) tau_c_[k] = c_sigma(p_.d, 4 * std::pow(2.0, -double(k) / p_.J));
  ladder_c_.resize(ladder_.sigma.size());
  for (std::size_t k = 0; k < ladder_.sigma.size(); ++k) {
    const double y = p_.J * std::log2(4.0 / ladder_.sigma[k]);
    const long kt = std::lround(y);
    ladder_c_[k] = (kt >= 0 && std::abs(y - kt) < 1e-9) ? tau_c_[kt] : c_sigma(p_.d, ladder_.sigma[k]);
  }
  build_pair_table();
}

std::vector<std::size_t> WavePacketFrame::high_indices() const {
  std::vector<std::size_t> v;
  for (std::size_t k = first_high_; k < ladder_.sigma.size(); ++k) v.push_back(k);
  return v;
}

std::vector<std::size_t> WavePacketFrame::low_indices() const {
  std::vector<std::size_t> v;
  for (std::size_t k = 0; k < first_high_; ++k) v.push_back(k);
  return v;
}

int WavePacketFrame::directions(double sigma) const {
  if (p_.d == 1) return 2;
  return static_cast<int>(std::ceil(p_.c_dir / std::sqrt(sigma) - 1e-9));
}

std::vector<double> WavePacketFrame::direction_angles(double sigma) const {
  if (p_.d == 1) return {0.0, kPi};
  const int m = directions(sigma);
  std::vector<double> v(m);
  for (int j = 0; j < m; ++j) v[j] = 2 * kPi * j / m;
  return v;
}

double WavePacketFrame::direction_weight(int m) const { return p_.d == 1 ? 1.0 : 2 * kPi / m; }

double WavePacketFrame::c(double sigma) const {
  const double x = p_.J * std::log2(p_.sigma_top / sigma);
  const long k = std::lround(x);
  if (std::abs(x - k) < 1e-9 && k >= 0 && k < static_cast<long>(ladder_c_.size())) return ladder_c_[k];
  return c_sigma(p_.d, sigma);
}

double WavePacketFrame::tau_c(int k) const {
  if (k < 0 || k >= static_cast<int>(tau_c_.size())) throw Error("frame: frequency beyond the tabulated range");
  return tau_c_[k];
}

double WavePacketFrame::phi_sigma(double omega, double sigma, double alpha) const {
  return c(sigma) * phi_window(ang_dist(alpha, omega) / std::sqrt(sigma));
}

double WavePacketFrame::psi(double omega, double sigma, double rho, double alpha) const {
  const double radial = Psi(sigma * rho);
  if (radial == 0.0) return 0.0;
  const double a = phi_window(ang_dist(alpha, omega) / std::sqrt(sigma));
  if (a == 0.0) return 0.0;
  return radial * c(sigma) * a;
}

namespace {

// Active tau indices k with Psi(tau_k rho) != 0 and tau_k = 4 * 2^{-k/J} <= 4.
std::pair<int, int> active_tau(double rho, int J) {
  if (rho <= 0.125) return {1, 0};
  const int lo = std::max(0, static_cast<int>(std::floor(J * std::log2(2 * rho))));
  const int hi = static_cast<int>(std::ceil(J * std::log2(8 * rho)));
  return {lo, hi};
}

}  // namespace

double WavePacketFrame::phi_omega_raw(double omega, double rho, double alpha) const {
  const auto [lo, hi] = active_tau(rho, p_.J);
  const double dist = ang_dist(alpha, omega);
  const double w = std::log(2.0) / p_.J;
  double s = 0;
  for (int k = lo; k <= hi; ++k) {
    const double tau = 4 * std::pow(2.0, -double(k) / p_.J);
    const double radial = Psi(tau * rho);
    if (radial == 0.0) continue;
    const double a = phi_window(dist / std::sqrt(tau));
    if (a == 0.0) continue;
    s += (k == 0 ? 0.5 : 1.0) * w * radial * tau_c(k) * a;
  }
  return s;
}

void WavePacketFrame::build_pair_table() {
  // Pair integrals A(k, k') = int_S phi_{e1,tau_k} phi_{e1,tau_k'} / (c_k c_k') over the sphere.
  const int K = static_cast<int>(tau_c_.size());
  const int band = 2 * p_.J + 2;
  pair_band_ = band;
  pair_.assign(static_cast<std::size_t>(K) * (band + 1), 0.0);
  for (int k = 0; k < K; ++k) {
    for (int dk = 0; dk <= band && k + dk < K; ++dk) {
      const double t1 = 4 * std::pow(2.0, -double(k) / p_.J);
      const double t2 = 4 * std::pow(2.0, -double(k + dk) / p_.J);
      double v;
      if (p_.d == 1) {
        v = 1.0 + phi_window(2 / std::sqrt(t1)) * phi_window(2 / std::sqrt(t2));
      } else {
        const double amax = angular_support(std::min(t1, t2));
        auto g = [&](double a) {
          const double s = 2 * std::sin(0.5 * a);
          return phi_window(s / std::sqrt(t1)) * phi_window(s / std::sqrt(t2));
        };
        v = 0;
        const int panels = 32;
        for (int i = 0; i < panels; ++i)
          v += gauss_kronrod<double, 31>::integrate(g, amax * i / panels, amax * (i + 1) / panels, 0, 0);
        v *= 2;
      }
      pair_[static_cast<std::size_t>(k) * (band + 1) + dk] = v;
    }
  }
}

double WavePacketFrame::phi_norm(double rho) const {
  const auto [lo, hi] = active_tau(rho, p_.J);
  if (hi < lo) return 0.0;
  const int band = pair_band_;
  const double w = std::log(2.0) / p_.J;
  std::vector<double> c(hi - lo + 1, 0.0);
  for (int k = lo; k <= hi; ++k) {
    const double tau = 4 * std::pow(2.0, -double(k) / p_.J);
    c[k - lo] = (k == 0 ? 0.5 : 1.0) * w * Psi(tau * rho) * tau_c(k);
  }
  double s = 0;
  for (int k = lo; k <= hi; ++k) {
    if (c[k - lo] == 0.0) continue;
    for (int k2 = k; k2 <= hi; ++k2) {
      if (c[k2 - lo] == 0.0 || k2 - k > band) continue;
      const double a = pair_[static_cast<std::size_t>(k) * (band + 1) + (k2 - k)];
      s += (k2 == k ? 1.0 : 2.0) * c[k - lo] * c[k2 - lo] * a;
    }
  }
  return std::sqrt(std::max(s, 0.0));
}

double WavePacketFrame::phi_omega(double omega, double rho, double alpha) const {
  const double raw = phi_omega_raw(omega, rho, alpha);
  if (!p_.normalize || raw == 0.0) return raw;
  return raw / phi_norm(rho);
}

void WavePacketFrame::phi_omega_ring(double omega, double rho, const std::vector<double>& alpha,
                                     std::vector<double>& out) const {
  out.assign(alpha.size(), 0.0);
  const auto [lo, hi] = active_tau(rho, p_.J);
  if (hi < lo) return;
  const double w = std::log(2.0) / p_.J;
  for (int k = lo; k <= hi; ++k) {
    const double tau = 4 * std::pow(2.0, -double(k) / p_.J);
    const double radial = Psi(tau * rho);
    if (radial == 0.0) continue;
    const double coef = (k == 0 ? 0.5 : 1.0) * w * radial * tau_c(k);
    const double st = std::sqrt(tau);
    for (std::size_t i = 0; i < alpha.size(); ++i) out[i] += coef * phi_window(ang_dist(alpha[i], omega) / st);
  }
  if (!p_.normalize) return;
  const double n = phi_norm(rho);
  if (n == 0.0) return;
  for (double& v : out) v /= n;
}

double WavePacketFrame::r(double rho) const { return std::sqrt(Psi_tail(rho)); }

int required_n(double sigma_min, double length) {
  int n = 8;
  while (kPi * n / length < 2.0 / sigma_min) n += 2;
  return n;
}

double grid_sigma_min(const TorusGrid& g, int J) {
  const double target = 1.25 * g.h();
  if (target >= 1) throw Error("frame: grid too coarse for any high-frequency scale");
  const int k = static_cast<int>(std::floor(J * std::log2(1.0 / target) + 1e-9));
  return std::pow(2.0, -double(k) / J);
}

WavePacketFrame build_frame(const FrameParams& p, const TorusGrid& grid) {
  if (grid.d != p.d) throw Error("build_frame: dimension mismatch");
  if (p.octaves * p.J > 64 + 1e-9) throw Error("build_frame: K*J must not exceed 64");
  const double smin = std::pow(2.0, -p.octaves);
  if (kPi / grid.h() < 2.0 / smin) {
    throw Error("build_frame: grid Nyquist " + std::to_string(kPi / grid.h()) + " does not cover 2/sigma_min = " +
                std::to_string(2.0 / smin) + "; required n = " + std::to_string(required_n(smin, grid.length)));
  }
  return WavePacketFrame(p);
}

namespace {

double psi_identity_deviation(const WavePacketFrame& f, int per_octave, int n_alpha) {
  const double lo = 0.25, hi = f.resolved_band();
  const int nrho = std::max(2, static_cast<int>(std::ceil(per_octave * std::log2(hi / lo)))) + 1;
  const auto& L = f.ladder();
  double dev = 0;
  for (int i = 0; i < nrho; ++i) {
    const double rho = lo * std::pow(hi / lo, double(i) / (nrho - 1));
    for (int ia = 0; ia < n_alpha; ++ia) {
      const double alpha = 2 * kPi * (ia + 0.37) / n_alpha;
      double s = 0;
      for (std::size_t k = 0; k < L.sigma.size(); ++k) {
        const double sig = L.sigma[k];
        const double radial = Psi(sig * rho);
        if (radial == 0.0) continue;
        const double cs = f.c(sig);
        double ang = 0;
        if (f.d() == 1) {
          ang = 1.0 + std::pow(phi_window(2 / std::sqrt(sig)), 2);
        } else {
          const int m = f.directions(sig);
          const double half = angular_support(sig);
          const int j0 = static_cast<int>(std::floor((alpha - half) * m / (2 * kPi)));
          const int j1 = static_cast<int>(std::ceil((alpha + half) * m / (2 * kPi)));
          const int jn = std::min(j1, j0 + m - 1);
          for (int j = j0; j <= jn; ++j) {
            const double v = phi_window(ang_dist(alpha, 2 * kPi * j / m) / std::sqrt(sig));
            ang += v * v;
          }
          ang *= 2 * kPi / m;
        }
        s += L.weight[k] * radial * radial * cs * cs * ang;
      }
      dev = std::max(dev, std::abs(s - 1));
      if (f.d() == 1) break;
    }
  }
  return dev;
}

}  // namespace

ResolutionReport check_resolution(const WavePacketFrame& frame) {
  ResolutionReport rep;
  rep.psi_identity = psi_identity_deviation(frame, 32, 48);
  FrameParams dbl = frame.params();
  dbl.J *= 2;
  dbl.c_dir *= 2;
  rep.psi_identity_doubled = psi_identity_deviation(WavePacketFrame(dbl), 32, 48);

  const auto& L = frame.ladder();
  {
    const double lo = 0.25, hi = frame.resolved_band();
    const int nrho = static_cast<int>(std::ceil(64 * std::log2(hi / lo))) + 1;
    for (int i = 0; i < nrho; ++i) {
      const double rho = lo * std::pow(hi / lo, double(i) / (nrho - 1));
      double s = 0;
      for (std::size_t k = 0; k < L.sigma.size(); ++k) s += L.weight[k] * std::pow(Psi(L.sigma[k] * rho), 2);
      rep.radial_normalization = std::max(rep.radial_normalization, std::abs(s - 1));
    }
  }

  std::vector<double> logs, logc;
  for (std::size_t k : frame.high_indices()) {
    const double sig = L.sigma[k];
    const auto dirs = frame.direction_angles(sig);
    const double w = frame.direction_weight(static_cast<int>(dirs.size()));
    const double cs = frame.c(sig);
    double dev = 0, csum = 0;
    const int na = frame.d() == 1 ? 1 : 33;
    for (int ia = 0; ia < na; ++ia) {
      const double alpha = frame.d() == 1 ? 0.0 : (2 * kPi / dirs.size()) * ia / (na - 1);
      double s2 = 0, s1 = 0;
      for (double om : dirs) {
        const double v = cs * phi_window(ang_dist(alpha, om) / std::sqrt(sig));
        s2 += w * v * v;
        s1 += w * v;
      }
      dev = std::max(dev, std::abs(s2 - 1));
      csum += std::pow(sig, -(frame.d() - 1) / 4.0) * s1;
    }
    rep.repro_l2 = std::max(rep.repro_l2, dev);
    rep.sigma.push_back(sig);
    rep.C_sigma.push_back(csum / na);
    logs.push_back(std::log(sig));
    logc.push_back(std::log(cs));
  }
  const auto [mn, mx] = std::minmax_element(rep.C_sigma.begin(), rep.C_sigma.end());
  rep.C_ratio = *mx / *mn;
  const std::size_t n = logs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += logs[i];
    sy += logc[i];
    sxx += logs[i] * logs[i];
    sxy += logs[i] * logc[i];
  }
  const double den = n * sxx - sx * sx;
  rep.c_slope = den > 0 ? (n * sxy - sx * sy) / den : 0.0;
  return rep;
}

double PolarSymbol::operator()(double rho, double alpha) const {
  std::vector<double> a{alpha}, out(1);
  ring(rho, a, out);
  return out[0];
}

PolarSymbol packet_symbol(std::shared_ptr<const WavePacketFrame> frame, double sigma) {
  PolarSymbol s;
  const double cs = frame->c(sigma);
  s.ring = [sigma, cs](double rho, const std::vector<double>& alpha, std::vector<double>& out) {
    out.assign(alpha.size(), 0.0);
    const double radial = Psi(sigma * rho);
    if (radial == 0.0) return;
    for (std::size_t i = 0; i < alpha.size(); ++i)
      out[i] = radial * cs * phi_window(ang_dist(alpha[i], 0.0) / std::sqrt(sigma));
  };
  s.rho_max = 2.0 / sigma;
  s.name = "packet";
  return s;
}

PolarSymbol directional_band_symbol(std::shared_ptr<const WavePacketFrame> frame, double sigma, int power) {
  PolarSymbol s;
  s.ring = [frame, sigma, power](double rho, const std::vector<double>& alpha, std::vector<double>& out) {
    out.assign(alpha.size(), 0.0);
    const double radial = Psi(sigma * rho);
    if (radial == 0.0) return;
    frame->phi_omega_ring(0.0, rho, alpha, out);
    for (double& v : out) v = radial * std::pow(v, power);
  };
  s.rho_max = 2.0 / sigma;
  s.name = "directional_band";
  return s;
}

PolarSymbol directional_cut_symbol(std::shared_ptr<const WavePacketFrame> frame, double band, int power) {
  PolarSymbol s;
  s.ring = [frame, band, power](double rho, const std::vector<double>& alpha, std::vector<double>& out) {
    out.assign(alpha.size(), 0.0);
    const double cut = phi_window(rho / (2 * band));
    if (cut == 0.0) return;
    frame->phi_omega_ring(0.0, rho, alpha, out);
    for (double& v : out) v = cut * std::pow(v, power);
  };
  s.rho_max = 2.0 * band;
  s.name = "directional_cut";
  return s;
}

}  // namespace rfio
