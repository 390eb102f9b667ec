#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rfio/dirac.hpp"
#include "rfio/hpfio.hpp"
#include "rfio/phillips.hpp"
#include "rfio/tent.hpp"
#include "rfio/wavepackets.hpp"

namespace rfio {

enum class PacketBackend { FourierOracle, PhillipsPolar };
std::string to_string(PacketBackend b);

// psi_{omega, sigma}(D) f by the exact mode-wise oracle (constant coefficients) or by line projections.
class PacketApplier {
 public:
  PacketApplier(std::shared_ptr<const WavePacketFrame> frame, const DiracOperator& op, PacketBackend backend,
                PhillipsOptions opt = {});

  Field apply(double omega, double sigma, const Field& f) const;
  // One field, several directions at a common scale.
  std::vector<Field> apply(const std::vector<double>& omegas, double sigma, const Field& f) const;

 private:
  std::shared_ptr<const WavePacketFrame> frame_;
  const DiracOperator* op_;
  PacketBackend backend_;
  PhillipsOptions opt_;
  std::unique_ptr<PhillipsCalculus> phillips_;
  mutable std::map<double, std::shared_ptr<const LineTable>> tables_;
  std::shared_ptr<const LineTable> table(double sigma) const;
};

Field apply_packet(std::shared_ptr<const WavePacketFrame> frame, const DiracOperator& op, double omega, double sigma,
                   const Field& f, PacketBackend backend, PhillipsOptions opt = {});

// W f over the outer directions of an HpfioContext: slabs sigma > 1 carry |S|^{-1/2} Psi(sigma sqrt L) f,
// slabs sigma <= 1 carry phi_omega(D) Psi(sigma sqrt L) f.
struct PacketTransform {
  std::vector<double> directions;
  double direction_weight = 1;
  std::vector<TentField> slabs;  // one tent field per direction
  double band_leak = 0;
  std::vector<std::string> warnings;

  // sum_k w_dir sum_j w_j ||F_k(sigma_j)||_2^2
  double energy() const;
};

PacketTransform wavepacket_transform(const HpfioContext& ctx, const Field& f);
// pi F = sum_k w_dir (phi_{omega_k}(D) sum_{high j} w_j Psi(sigma_j sqrt L) F_k(sigma_j)
//                     + |S|^{-1/2} sum_{low j} w_j Psi(sigma_j sqrt L) F_k(sigma_j))
Field adjoint_synthesis(const HpfioContext& ctx, const PacketTransform& W);

}  // namespace rfio
