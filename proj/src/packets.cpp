#include "rfio/packets.hpp"

#include <cmath>

#include "rfio/symbols.hpp"

namespace rfio {

std::string to_string(PacketBackend b) { return b == PacketBackend::FourierOracle ? "fourier_oracle" : "phillips_polar"; }

PacketApplier::PacketApplier(std::shared_ptr<const WavePacketFrame> frame, const DiracOperator& op, PacketBackend backend,
                             PhillipsOptions opt)
    : frame_(std::move(frame)), op_(&op), backend_(backend), opt_(opt) {
  if (frame_->d() != op.d()) throw Error("apply_packet: frame and operator dimensions differ");
  if (backend_ == PacketBackend::FourierOracle && !op.fourier_diagonal())
    throw Error("apply_packet: fourier_oracle needs constant commuting coefficients");
  if (backend_ == PacketBackend::PhillipsPolar) phillips_ = std::make_unique<PhillipsCalculus>(op, opt_);
}

std::shared_ptr<const LineTable> PacketApplier::table(double sigma) const {
  auto it = tables_.find(sigma);
  if (it != tables_.end()) return it->second;
  auto t = make_line_table(op_->d(), packet_symbol(frame_, sigma), opt_.radial_nodes);
  tables_[sigma] = t;
  return t;
}

std::vector<Field> PacketApplier::apply(const std::vector<double>& omegas, double sigma, const Field& f) const {
  if (f.grid != op_->grid()) throw Error("apply_packet: field grid does not match the operator");
  std::vector<Field> out;
  if (backend_ == PacketBackend::FourierOracle) {
    const bool d1 = op_->d() == 1;
    for (double om : omegas)
      out.push_back(fourier_oracle(
          *op_,
          [&](const Eigen::Vector3d& z) {
            const double rho = d1 ? std::abs(z[0]) : std::hypot(z[0], z[1]);
            const double alpha = d1 ? (z[0] >= 0 ? 0.0 : kPi) : std::atan2(z[1], z[0]);
            return cplx(frame_->psi(om, sigma, rho, alpha));
          },
          f));
    return out;
  }
  const auto tab = table(sigma);
  std::vector<SymbolRef> refs;
  for (double om : omegas) refs.push_back({tab, om, 1.0});
  return phillips_->apply(refs, f);
}

Field PacketApplier::apply(double omega, double sigma, const Field& f) const {
  return std::move(apply(std::vector<double>{omega}, sigma, f)[0]);
}

Field apply_packet(std::shared_ptr<const WavePacketFrame> frame, const DiracOperator& op, double omega, double sigma,
                   const Field& f, PacketBackend backend, PhillipsOptions opt) {
  return PacketApplier(std::move(frame), op, backend, opt).apply(omega, sigma, f);
}

double PacketTransform::energy() const {
  double e = 0;
  for (const auto& F : slabs)
    for (std::size_t j = 0; j < F.sigma.size(); ++j) e += direction_weight * F.weight[j] * std::pow(l2_norm(F.values[j]), 2);
  return e;
}

PacketTransform wavepacket_transform(const HpfioContext& ctx, const Field& f) {
  PacketTransform W;
  W.directions = ctx.directions();
  W.direction_weight = ctx.direction_weight();
  const DirectionalData data = ctx.prepare(f, 1);
  for (std::size_t k = 0; k < W.directions.size(); ++k) W.slabs.push_back(ctx.tent_field(data, k, 0.0));
  W.band_leak = ctx.band_leak(f);
  if (W.band_leak > ctx.options().leak_tol)
    W.warnings.push_back("unresolved band energy " + std::to_string(W.band_leak) + " exceeds " +
                         std::to_string(ctx.options().leak_tol));
  return W;
}

Field adjoint_synthesis(const HpfioContext& ctx, const PacketTransform& W) {
  const auto& frame = *ctx.frame();
  const TensorCalculus& T = ctx.tensor();
  const double S = frame.sphere_measure();
  Field out(ctx.grid());
  for (std::size_t k = 0; k < W.slabs.size(); ++k) {
    const TentField& F = W.slabs[k];
    if (F.sigma.size() != frame.ladder().sigma.size()) throw Error("adjoint_synthesis: ladder mismatch");
    Field high(ctx.grid()), low(ctx.grid());
    for (std::size_t j = 0; j < F.sigma.size(); ++j) {
      const double sig = F.sigma[j], w = F.weight[j];
      const Field g = T.radial([sig](double r) { return Psi(sig * r); }, F.values[j]);
      if (j < frame.first_high()) low += cplx(w / std::sqrt(S)) * g;
      else high += cplx(w) * g;
    }
    out += cplx(W.direction_weight) * (ctx.directional(high, k, 1) + low);
  }
  return out;
}

}  // namespace rfio
