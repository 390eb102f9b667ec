#include "rfio/multiplier.hpp"

#include <cmath>

#include "rfio/symbols.hpp"

namespace rfio {

MultiplierSymbol::MultiplierSymbol(std::shared_ptr<const WavePacketFrame> frame, double omega)
    : frame_(std::move(frame)), omega_(omega), c_(std::cos(omega)), s_(std::sin(omega)) {
  if (frame_->d() != 2) throw Error("multiplier: d = 2 frames only");
}

double MultiplierSymbol::phit(double z1, double z2) const {
  const double rho = std::hypot(z1, z2);
  if (rho == 0.0) return 0.0;
  const double radial = 1.0 - phi_window(8 * rho);
  if (radial == 0.0) return 0.0;
  const double dist = std::hypot(z1 / rho - c_, z2 / rho - s_);
  return radial * phi_window(dist * std::sqrt(rho) / 4);
}

cplx MultiplierSymbol::mt(double z1, double z2) const {
  const double rho = std::hypot(z1, z2);
  return std::polar(1.0, rho - (c_ * z1 + s_ * z2)) - 1.0;
}

cplx MultiplierSymbol::m(double z1, double z2) const {
  const double ph = phit(z1, z2);
  if (ph == 0.0) return 0.0;
  return ph * mt(z1, z2) * (1.0 - Psi_tail(std::hypot(z1, z2)));
}

cplx MultiplierSymbol::q(double z1, double z2) const {
  const double ph = phit(z1, z2);
  if (ph == 0.0) return 0.0;
  return ph * mt(z1, z2) * Psi_tail(std::hypot(z1, z2));
}

std::vector<MarcinkiewiczRow> marcinkiewicz_check(const MultiplierSymbol& s, const MarcinkiewiczOptions& opt) {
  std::vector<MarcinkiewiczRow> rows{{"0"}, {"e1"}, {"e2"}, {"e1+e2"}};
  const double c = std::cos(s.omega()), sn = std::sin(s.omega());
  // Symbol in aligned coordinates (u along omega, v across).
  auto eval = [&](bool use_q, double u, double v) {
    const double z1 = c * u - sn * v, z2 = sn * u + c * v;
    return use_q ? s.q(z1, z2) : s.m(z1, z2);
  };
  const double e = std::exp(opt.delta), ie = 1 / e;
  const int nr = static_cast<int>(std::ceil(opt.per_octave * std::log2(opt.rho_max / opt.rho_min)));
  for (int ir = 0; ir <= nr; ++ir) {
    const double rho = opt.rho_min * std::pow(2.0, double(ir) / opt.per_octave);
    for (int ia = 0; ia < opt.angles; ++ia) {
      const double a = 2 * kPi * (ia + 0.5) / opt.angles;
      const double u = rho * std::cos(a), v = rho * std::sin(a);
      for (int qsel = 0; qsel < 2; ++qsel) {
        const bool useq = qsel == 1;
        const cplx f0 = eval(useq, u, v);
        const cplx du = (eval(useq, u * e, v) - eval(useq, u * ie, v)) / (2 * opt.delta);
        const cplx dv = (eval(useq, u, v * e) - eval(useq, u, v * ie)) / (2 * opt.delta);
        const cplx duv = (eval(useq, u * e, v * e) - eval(useq, u * e, v * ie) - eval(useq, u * ie, v * e) +
                          eval(useq, u * ie, v * ie)) /
                         (4 * opt.delta * opt.delta);
        const double vals[4] = {std::abs(f0), std::abs(du), std::abs(dv), std::abs(duv)};
        for (int k = 0; k < 4; ++k) {
          double& slot = useq ? rows[k].sup_q : rows[k].sup_m;
          slot = std::max(slot, vals[k]);
        }
      }
    }
  }
  return rows;
}

}  // namespace rfio
