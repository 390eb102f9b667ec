#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rfio/dirac.hpp"
#include "rfio/phillips.hpp"
#include "rfio/tensor.hpp"
#include "rfio/tent.hpp"
#include "rfio/wavepackets.hpp"

namespace rfio {

// s_p = (d - 1) |1/p - 1/2|
double s_p(int d, double p);

struct HpfioParams {
  double p = 2;
  double s = 0;
};

enum class SymbolBackend { Auto, Oracle, Phillips };
std::string to_string(SymbolBackend b);
SymbolBackend parse_symbol_backend(const std::string& s);

struct HpfioOptions {
  SymbolBackend backend = SymbolBackend::Auto;  // Auto: exact mode-wise oracle when it applies, else Phillips
  PhillipsOptions phillips = [] {
    PhillipsOptions o;
    o.tail_tol = 1e-2;
    return o;
  }();
  int outer_directions = 0;  // 0: smallest divisor of the Phillips direction count >= ceil(2 pi / sqrt(sigma_min))
  double leak_tol = 1e-6;
};

struct NormReport {
  double value = 0;
  double p = 2, s = 0;
  std::vector<double> directions;      // outer quadrature angles
  std::vector<double> contributions;   // per-direction tent norms
  double direction_weight = 0;
  int scales = 0;
  int dropped = 0, clamped = 0;
  std::string symbol_backend;
  std::string tensor_backend = "kronecker";
  double phillips_tail = 0;
  double tail_tol = 0;
  double max_imag = 0;
  double band_leak = 0;
  double offset = 0;  // additive low-frequency term of the conical and maximal forms
  std::vector<std::string> warnings;

  // offset + (sum_w w contribution^p)^{1/p} from the stored parts.
  double recompute() const;
};

// f together with its directional pieces phi_omega(D)^power chi_B(D) f over the outer directions.
struct DirectionalData {
  Field f;
  std::vector<Field> v;
  int power = 1;
  double tail = 0;  // Phillips tail estimate of the directional table (0 for the oracle)
  double imag = 0;  // max |Im| of the spectral values used by Phillips
};

class HpfioContext {
 public:
  HpfioContext(const DiracOperator& op, const FrameParams& frame, HpfioOptions opt = {});

  const DiracOperator& op() const { return *op_; }
  const TensorCalculus& tensor() const { return *tensor_; }
  std::shared_ptr<const WavePacketFrame> frame() const { return frame_; }
  const TorusGrid& grid() const { return op_->grid(); }
  const HpfioOptions& options() const { return opt_; }
  const std::vector<double>& directions() const { return dirs_; }
  double direction_weight() const { return dir_weight_; }
  double band() const { return frame_->resolved_band(); }
  std::string symbol_backend() const;

  // Relative weighted energy of f in tensor modes with sqrt(lambda) > band().
  double band_leak(const Field& f) const;

  std::vector<DirectionalData> prepare(const std::vector<Field>& fs, int power = 1) const;
  DirectionalData prepare(const Field& f, int power = 1) const { return std::move(prepare(std::vector<Field>{f}, power)[0]); }
  // phi_omega(D)^power chi_B(D) f for a single outer direction.
  Field directional(const Field& f, std::size_t k, int power = 1) const;

  // Tent field of direction k: sigma > 1 slabs |S|^{-1/2} Psi(sigma sqrt L) f, sigma <= 1 slabs sigma^{-s} Psi(sigma sqrt L) v_k.
  TentField tent_field(const DirectionalData& data, std::size_t k, double s) const;

  std::vector<NormReport> norms(const DirectionalData& data, double s, const std::vector<double>& ps) const;
  NormReport norm(const DirectionalData& data, const HpfioParams& hp) const { return norms(data, hp.s, {hp.p})[0]; }
  NormReport norm(const Field& f, const HpfioParams& hp) const { return norm(prepare(f), hp); }

  // ||q(D) f||_p + (int ||phi_omega(D) g||_p^p domega)^{1/p}, where g_data holds (I + sqrt L)^s f.
  NormReport conical(const Field& f, const DirectionalData& g_data, double p) const;
  NormReport conical(const Field& f, const HpfioParams& hp) const;

  // T^{p,infinity} characterizations: variant 1 is ||q(D) f||_p + (int ||Phi_sigma(D) v_omega||^p)^{1/p} on
  // data with power 1; variant 2 takes power-2 data and weights by sigma^{(d-1)/4}. Phi is the Gaussian.
  NormReport maximal(const DirectionalData& data, double p) const;
  NormReport maximal(const Field& f, double p, int variant = 1) const;

 private:
  const DiracOperator* op_;
  HpfioOptions opt_;
  std::shared_ptr<const WavePacketFrame> frame_;
  std::unique_ptr<TensorCalculus> tensor_;
  std::unique_ptr<PhillipsCalculus> phillips_;
  mutable std::shared_ptr<const LineTable> tables_[3];
  std::vector<double> dirs_;
  double dir_weight_ = 1;
  bool oracle_ = false;
  std::function<cplx(const Eigen::Vector3d&)> oracle_symbol(double omega, int power) const;
  std::shared_ptr<const LineTable> table(int power) const;

  void finish(NormReport& r, const DirectionalData& data, double p) const;
  struct Spectrum {
    CVec a[2];
  };
  Spectrum spectrum(const Field& f) const;
  Field synth(const Spectrum& sp, const std::function<double(double)>& g, bool* zero = nullptr) const;
};

// Frame matching a grid: K chosen so that sigma_min = grid_sigma_min.
FrameParams frame_for_grid(const TorusGrid& g, FrameParams base = {});

// Trigonometric polynomial with seeded coefficients on integer wavevectors 0 < |k| <= kmax, tapered smoothly
// to zero at kmax; the coefficients do not depend on n, so refinements sample the same function.
Field band_limited_field(const TorusGrid& g, double kmax, std::uint64_t seed);
// Smooth spectral cut (I - projection onto the kernel) phi(sqrt L / kmax) f for variable coefficients.
Field spectral_band_limit(const TensorCalculus& T, const Field& f, double kmax);

// ||(I + sqrt L)^s f||_p
double sobolev_norm(const TensorCalculus& T, const Field& f, double p, double s);
// Finite-difference W^{1,p} and W^{2,p} cross-checks: ||f||_p + ||grad f||_p and ||f||_p + ||Lap f||_p.
double w1p_norm(const Field& f, double p);
double w2p_norm(const Field& f, double p);

struct EmbeddingRow {
  int n = 0;
  double p = 2, q = 2, alpha = 0;
  double lp_over_hpfio = 0;    // sup ||f||_p / ||f||_{H^{p, s_p/2}}
  double hpfio_over_lp = 0;    // sup ||(I + sqrt L)^{-s_p/2} f||_{H^p} / ||f||_p
  double sobolev_ratio = 0;    // sup ||f||_q / ||L^alpha f||_p
  int family = 0;
};

// Sobolev pairs use q with alpha = d/2 (1/p - 1/q); pass q = p for alpha = 0.
EmbeddingRow embedding_sweep(const HpfioContext& ctx, double p, double q, const std::vector<Field>& family);

}  // namespace rfio
