#include "rfio/hpfio.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>

#include "rfio/fft.hpp"

namespace rfio {

double s_p(int d, double p) { return (d - 1) * std::abs(1.0 / p - 0.5); }

std::string to_string(SymbolBackend b) {
  switch (b) {
    case SymbolBackend::Auto: return "auto";
    case SymbolBackend::Oracle: return "oracle";
    case SymbolBackend::Phillips: return "phillips";
  }
  return "?";
}

SymbolBackend parse_symbol_backend(const std::string& s) {
  if (s == "auto") return SymbolBackend::Auto;
  if (s == "oracle") return SymbolBackend::Oracle;
  if (s == "phillips") return SymbolBackend::Phillips;
  throw Error("unknown symbol backend '" + s + "'");
}

double NormReport::recompute() const {
  CompensatedSum sum;
  for (double c : contributions) sum.add(direction_weight * std::pow(c, p));
  return offset + std::pow(sum.value(), 1.0 / p);
}

FrameParams frame_for_grid(const TorusGrid& g, FrameParams base) {
  base.d = g.d;
  base.octaves = -std::log2(grid_sigma_min(g, base.J));
  return base;
}

HpfioContext::HpfioContext(const DiracOperator& op, const FrameParams& fp, HpfioOptions opt)
    : op_(&op), opt_(std::move(opt)) {
  frame_ = std::make_shared<const WavePacketFrame>(build_frame(fp, op.grid()));
  tensor_ = std::make_unique<TensorCalculus>(op);
  const bool diag = op.fourier_diagonal();
  if (opt_.backend == SymbolBackend::Oracle && !diag)
    throw Error("hpfio: oracle backend needs constant commuting coefficients");
  oracle_ = opt_.backend == SymbolBackend::Oracle || (opt_.backend == SymbolBackend::Auto && diag);
  if (!oracle_) phillips_ = std::make_unique<PhillipsCalculus>(op, opt_.phillips);
  if (op.d() == 1) {
    dirs_ = {0.0, kPi};
    dir_weight_ = 1.0;
    return;
  }
  int m = opt_.outer_directions;
  if (m <= 0) {
    const int need = static_cast<int>(std::ceil(2 * kPi / std::sqrt(frame_->sigma_min()) - 1e-9));
    const int M = opt_.phillips.directions;
    m = need;
    for (int k = need; k <= M; ++k)
      if (M % k == 0) {
        m = k;
        break;
      }
  }
  for (int k = 0; k < m; ++k) dirs_.push_back(2 * kPi * k / m);
  dir_weight_ = 2 * kPi / m;
}

std::string HpfioContext::symbol_backend() const {
  return oracle_ ? "oracle" : "phillips:" + to_string(phillips_->backend());
}

HpfioContext::Spectrum HpfioContext::spectrum(const Field& f) const {
  Spectrum sp;
  sp.a[0] = tensor_->analysis(0, f.comp1);
  sp.a[1] = tensor_->analysis(1, f.comp2);
  return sp;
}

Field HpfioContext::synth(const Spectrum& sp, const std::function<double(double)>& g, bool* zero) const {
  Field out(grid());
  bool all_zero = true;
  for (int c = 0; c < 2; ++c) {
    CVec a = sp.a[c];
    const RVec& lam = tensor_->eigenvalues(c);
    bool nz = false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] == cplx(0)) continue;
      a[i] *= g(std::sqrt(lam[i]));
      nz = nz || a[i] != cplx(0);
    }
    if (nz) (c == 0 ? out.comp1 : out.comp2) = tensor_->synthesis(c, a);
    all_zero = all_zero && !nz;
  }
  if (zero) *zero = all_zero;
  return out;
}

double HpfioContext::band_leak(const Field& f) const {
  const Spectrum sp = spectrum(f);
  double tot = 0, out = 0;
  for (int c = 0; c < 2; ++c) {
    const RVec& lam = tensor_->eigenvalues(c);
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double e = std::norm(sp.a[c][i]);
      tot += e;
      if (std::sqrt(lam[i]) > band()) out += e;
    }
  }
  return tot > 0 ? out / tot : 0.0;
}

std::function<cplx(const Eigen::Vector3d&)> HpfioContext::oracle_symbol(double w, int power) const {
  const double B = band();
  const int d = op_->d();
  const WavePacketFrame* fr = frame_.get();
  return [=](const Eigen::Vector3d& z) {
    const double rho = d == 1 ? std::abs(z[0]) : std::hypot(z[0], z[1]);
    const double cut = phi_window(rho / (2 * B));
    if (cut == 0.0 || rho == 0.0) return cplx(0);
    const double alpha = d == 1 ? (z[0] >= 0 ? 0.0 : kPi) : std::atan2(z[1], z[0]);
    return cplx(cut * std::pow(fr->phi_omega(w, rho, alpha), power));
  };
}

std::shared_ptr<const LineTable> HpfioContext::table(int power) const {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  if (!tables_[power])
    tables_[power] = make_line_table(op_->d(), directional_cut_symbol(frame_, band(), power), opt_.phillips.radial_nodes);
  return tables_[power];
}

std::vector<DirectionalData> HpfioContext::prepare(const std::vector<Field>& fs, int power) const {
  if (power != 1 && power != 2) throw Error("hpfio: directional power must be 1 or 2");
  std::vector<DirectionalData> out(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].grid != grid()) throw Error("hpfio: field grid does not match the operator");
    out[i].f = fs[i];
    out[i].power = power;
  }
  if (fs.empty()) return out;
  if (oracle_) {
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (double w : dirs_) out[i].v.push_back(fourier_oracle(*op_, oracle_symbol(w, power), fs[i]));
    return out;
  }
  std::vector<SymbolRef> syms;
  for (double w : dirs_) syms.push_back({table(power), w, 1.0});
  PhillipsReport rep;
  auto res = phillips_->apply_batch(syms, fs, &rep);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    out[i].v = std::move(res[i]);
    out[i].tail = rep.max_tail;
    out[i].imag = rep.max_imag;
  }
  return out;
}

Field HpfioContext::directional(const Field& f, std::size_t k, int power) const {
  if (power != 1 && power != 2) throw Error("hpfio: directional power must be 1 or 2");
  if (oracle_) return fourier_oracle(*op_, oracle_symbol(dirs_.at(k), power), f);
  return phillips_->apply(SymbolRef{table(power), dirs_.at(k), 1.0}, f);
}

TentField HpfioContext::tent_field(const DirectionalData& data, std::size_t k, double s) const {
  const ScaleLadder& L = frame_->ladder();
  const Spectrum sf = spectrum(data.f), sv = spectrum(data.v.at(k));
  const double S = frame_->sphere_measure();
  TentField F{grid(), L.sigma, L.weight, {}};
  for (std::size_t j = 0; j < L.sigma.size(); ++j) {
    const double sig = L.sigma[j];
    if (j < frame_->first_high())
      F.values.push_back(synth(sf, [sig, S](double r) { return Psi(sig * r) / std::sqrt(S); }));
    else
      F.values.push_back(synth(sv, [sig, s](double r) { return std::pow(sig, -s) * Psi(sig * r); }));
  }
  return F;
}

void HpfioContext::finish(NormReport& r, const DirectionalData& data, double p) const {
  r.p = p;
  r.directions = dirs_;
  r.direction_weight = dir_weight_;
  const ScaleLadder& L = frame_->ladder();
  r.scales = static_cast<int>(L.sigma.size());
  r.dropped = r.clamped = 0;
  for (double sig : L.sigma) {
    bool cl = false;
    if (tent_box_radius(grid(), sig, &cl) < 0) ++r.dropped;
    if (cl) ++r.clamped;
  }
  r.symbol_backend = symbol_backend();
  r.phillips_tail = data.tail;
  r.tail_tol = oracle_ ? 0.0 : opt_.phillips.tail_tol;
  r.max_imag = data.imag;
  r.band_leak = band_leak(data.f);
  if (r.band_leak > opt_.leak_tol)
    r.warnings.push_back("unresolved band energy " + std::to_string(r.band_leak) + " exceeds " +
                         std::to_string(opt_.leak_tol));
  r.value = r.recompute();
}

std::vector<NormReport> HpfioContext::norms(const DirectionalData& data, double s, const std::vector<double>& ps) const {
  for (double p : ps)
    if (!(p > 1) || !std::isfinite(p)) throw Error("hpfio: p must lie in (1, inf)");
  if (data.v.size() != dirs_.size()) throw Error("hpfio: directional data does not match the direction set");
  const TorusGrid& g = grid();
  const ScaleLadder& L = frame_->ladder();
  const double S = frame_->sphere_measure();
  const Eigen::Index N = static_cast<Eigen::Index>(g.cells());
  RVec low = RVec::Zero(N);
  const Spectrum sf = spectrum(data.f);
  for (std::size_t j = 0; j < frame_->first_high(); ++j) {
    const double sig = L.sigma[j];
    bool zero = false;
    const Field u = synth(sf, [sig](double r) { return Psi(sig * r); }, &zero);
    if (!zero) accumulate_box_mean(g, u, sig, L.weight[j] / S, low);
  }
  std::vector<NormReport> reps(ps.size());
  for (auto& r : reps) {
    r.s = s;
    r.contributions.assign(dirs_.size(), 0.0);
  }
  for (std::size_t k = 0; k < dirs_.size(); ++k) {
    RVec acc = low;
    const Spectrum sv = spectrum(data.v[k]);
    for (std::size_t j = frame_->first_high(); j < L.sigma.size(); ++j) {
      const double sig = L.sigma[j];
      const double fac = std::pow(sig, -s);
      bool zero = false;
      const Field u = synth(sv, [sig, fac](double r) { return fac * Psi(sig * r); }, &zero);
      if (!zero) accumulate_box_mean(g, u, sig, L.weight[j], acc);
    }
    const RVec prof = acc.cwiseSqrt();
    for (std::size_t i = 0; i < ps.size(); ++i) reps[i].contributions[k] = profile_lp(g, prof, ps[i]);
  }
  for (std::size_t i = 0; i < ps.size(); ++i) finish(reps[i], data, ps[i]);
  return reps;
}

NormReport HpfioContext::conical(const Field& f, const DirectionalData& g_data, double p) const {
  NormReport r;
  const Field qf = tensor_->radial([this](double rho) { return frame_->q(rho); }, f);
  r.offset = lp_norm(qf, p);
  for (const Field& v : g_data.v) r.contributions.push_back(lp_norm(v, p));
  finish(r, g_data, p);
  return r;
}

NormReport HpfioContext::conical(const Field& f, const HpfioParams& hp) const {
  const Field g = hp.s == 0.0 ? f : tensor_->bessel(f, -hp.s);
  NormReport r = conical(f, prepare(g), hp.p);
  r.s = hp.s;
  return r;
}

NormReport HpfioContext::maximal(const DirectionalData& data, double p) const {
  const TorusGrid& g = grid();
  const ScaleLadder& L = frame_->ladder();
  const int d = op_->d();
  NormReport r;
  if (data.power == 1) r.offset = lp_norm(tensor_->radial([this](double rho) { return frame_->q(rho); }, data.f), p);
  for (const Field& v : data.v) {
    RVec acc = RVec::Zero(static_cast<Eigen::Index>(g.cells()));
    const Spectrum sv = spectrum(v);
    for (std::size_t j = frame_->first_high(); j < L.sigma.size(); ++j) {
      const double sig = L.sigma[j];
      const double fac = data.power == 2 ? std::pow(sig, (d - 1) / 4.0) : 1.0;
      const Field u = synth(sv, [sig, fac](double rho) { return fac * gauss_window(sig * rho); });
      accumulate_box_max(g, u, sig, acc);
    }
    r.contributions.push_back(profile_lp(g, acc, p));
  }
  finish(r, data, p);
  return r;
}

NormReport HpfioContext::maximal(const Field& f, double p, int variant) const {
  if (variant != 1 && variant != 2) throw Error("hpfio_maximal: variant must be 1 or 2");
  return maximal(prepare(f, variant), p);
}

Field band_limited_field(const TorusGrid& g, double kmax, std::uint64_t seed) {
  const int K = static_cast<int>(std::floor(kmax * g.length / (2 * kPi) + 1e-12));
  if (2 * K >= g.n) throw Error("band_limited_field: band exceeds the grid Nyquist range");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  SpectralField s{g, CVec::Zero(static_cast<Eigen::Index>(g.cells())), CVec::Zero(static_cast<Eigen::Index>(g.cells()))};
  const double scale = static_cast<double>(g.cells());
  std::vector<int> m(g.d, -K);
  const int side = 2 * K + 1;
  int total = 1;
  for (int j = 0; j < g.d; ++j) total *= side;
  for (int t = 0; t < total; ++t) {
    int r = t;
    std::size_t idx = 0;
    double k2 = 0;
    for (int j = g.d - 1; j >= 0; --j) {
      m[j] = r % side - K;
      r /= side;
    }
    for (int j = 0; j < g.d; ++j) {
      idx += static_cast<std::size_t>((m[j] + g.n) % g.n) * g.stride(j);
      const double kj = 2 * kPi * m[j] / g.length;
      k2 += kj * kj;
    }
    const cplx c1(nd(rng), nd(rng)), c2(nd(rng), nd(rng));
    const double taper = k2 == 0.0 ? 0.0 : phi_window(std::sqrt(k2) / kmax);
    s.comp1[static_cast<Eigen::Index>(idx)] = scale * taper * c1;
    s.comp2[static_cast<Eigen::Index>(idx)] = scale * taper * c2;
  }
  return fourier_inverse(s);
}

Field spectral_band_limit(const TensorCalculus& T, const Field& f, double kmax) {
  return T.radial([kmax](double r) { return r == 0.0 ? 0.0 : phi_window(r / kmax); }, f);
}

double sobolev_norm(const TensorCalculus& T, const Field& f, double p, double s) {
  if (s == 0.0) return lp_norm(f, p);
  return lp_norm(T.bessel(f, -s), p);
}

namespace {

// Pointwise C^{2d} modulus of forward differences (order 1) or the 5-point Laplacian (order 2).
double fd_term(const Field& f, double p, int order) {
  const TorusGrid& g = f.grid;
  const double h = g.h();
  RVec m2 = RVec::Zero(static_cast<Eigen::Index>(g.cells()));
  Field lap(g);
  for (int j = 0; j < g.d; ++j)
    for (std::size_t i = 0; i < g.cells(); ++i) {
      const std::size_t ip = g.shifted(i, j, 1), im = g.shifted(i, j, -1);
      const Eigen::Index a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(ip),
                         c = static_cast<Eigen::Index>(im);
      if (order == 1) {
        m2[a] += std::norm((f.comp1[b] - f.comp1[a]) / h) + std::norm((f.comp2[b] - f.comp2[a]) / h);
      } else {
        lap.comp1[a] += (f.comp1[b] - 2.0 * f.comp1[a] + f.comp1[c]) / (h * h);
        lap.comp2[a] += (f.comp2[b] - 2.0 * f.comp2[a] + f.comp2[c]) / (h * h);
      }
    }
  if (order == 2) return lp_norm(lap, p);
  return profile_lp(g, m2.cwiseSqrt(), p);
}

}  // namespace

double w1p_norm(const Field& f, double p) { return lp_norm(f, p) + fd_term(f, p, 1); }
double w2p_norm(const Field& f, double p) { return lp_norm(f, p) + fd_term(f, p, 2); }

EmbeddingRow embedding_sweep(const HpfioContext& ctx, double p, double q, const std::vector<Field>& family) {
  if (!(p > 1 && p <= 2)) throw Error("embedding_sweep: p must lie in (1, 2]");
  const int d = ctx.op().d();
  EmbeddingRow row;
  row.n = ctx.grid().n;
  row.p = p;
  row.q = q;
  row.alpha = 0.5 * d * (1 / p - 1 / q);
  row.family = static_cast<int>(family.size());
  const double sp = s_p(d, p);
  const TensorCalculus& T = ctx.tensor();
  std::vector<Field> smooth;
  for (const Field& f : family) smooth.push_back(sp == 0.0 ? f : T.bessel(f, sp / 2));
  const auto df = ctx.prepare(family);
  const auto dg = sp == 0.0 ? df : ctx.prepare(smooth);
  const double a = row.alpha;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double fp = lp_norm(family[i], p);
    row.lp_over_hpfio = std::max(row.lp_over_hpfio, fp / ctx.norm(df[i], {p, sp / 2}).value);
    row.hpfio_over_lp = std::max(row.hpfio_over_lp, ctx.norm(dg[i], {p, 0.0}).value / fp);
    const Field La = a == 0.0 ? family[i] : T.apply([a](double l) { return cplx(std::pow(l, a)); }, family[i]);
    row.sobolev_ratio = std::max(row.sobolev_ratio, lp_norm(family[i], q) / lp_norm(La, p));
  }
  return row;
}

}  // namespace rfio
