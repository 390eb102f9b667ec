#include "rfio/phillips.hpp"

#include <algorithm>
#include <cmath>

#include "rfio/fft.hpp"

namespace rfio {

namespace {

constexpr double kTableExtent = 4.0;  // lambda table covers [-4 rho_max, 4 rho_max]

int next_pow2(int n) {
  int p = 8;
  while (p < n) p *= 2;
  return p;
}

CVec fft1(const CVec& u) {
  CVec v = u;
  fft_forward(TorusGrid(1, static_cast<int>(u.size()), 1.0), v);
  return v;
}

CVec ifft1(const CVec& u) {
  CVec v = u;
  fft_inverse(TorusGrid(1, static_cast<int>(u.size()), 1.0), v);
  return v;
}

// Six-point Lagrange weights at offset t from node 0 of the stencil -2..3.
template <class T>
void lagrange6(T t, T w[6]) {
  for (int k = 0; k < 6; ++k) {
    T num = 1.0;
    double den = 1.0;
    for (int l = 0; l < 6; ++l) {
      if (l == k) continue;
      num *= t - double(l - 2);
      den *= double(k - l);
    }
    w[k] = num / den;
  }
}

// Band-limited ramp kernel (1/2 pi) int_{-W}^{W} |r| e^{i r u} dr.
double ramp_kernel(double u, double W) {
  if (std::abs(u) * W < 1e-4) return W * W / (2 * kPi) * (1 - (u * W) * (u * W) / 4);
  return (W * std::sin(W * u) / u + (std::cos(W * u) - 1) / (u * u)) / kPi;
}

}  // namespace

cplx LineTable::Line::operator()(cplx lambda) const {
  const int n = static_cast<int>(values.size());
  // off-axis points use a stencil stride no smaller than |Im lambda|
  const int stride = std::max(1, static_cast<int>(std::ceil(std::abs(lambda.imag()) / dl)));
  const double x = (lambda.real() - lambda0) / dl;
  const int i = static_cast<int>(std::floor(x / stride)) * stride;
  if (i - 2 * stride >= 0 && i + 3 * stride < n) {
    const cplx t = (lambda - (lambda0 + i * dl)) / (dl * stride);
    if (t.imag() == 0.0) {
      double w[6];
      lagrange6(t.real(), w);
      double s = 0;
      for (int k = 0; k < 6; ++k) s += w[k] * values[i + (k - 2) * stride];
      return s;
    }
    cplx w[6];
    lagrange6(t, w);
    cplx s = 0;
    for (int k = 0; k < 6; ++k) s += w[k] * values[i + (k - 2) * stride];
    return s;
  }
  if (!has_tail) return 0.0;
  cplx s = 0, p = lambda * lambda;
  for (int k = 0; k < 5; ++k) {
    s += double(k + 1) * moments[k] / p;
    p *= lambda;
  }
  return -s / kPi;
}

LineTable::LineTable(int d, const PolarSymbol& chi, int radial_nodes)
    : d_(d), rho_max_(chi.rho_max), nodes_(radial_nodes), name_(chi.name) {
  if (d != 1 && d != 2) throw Error("line table: only d in {1, 2} supported");
  if (radial_nodes < 16 || radial_nodes % 2) throw Error("line table: radial nodes must be even and >= 16");
  if (!(rho_max_ > 0)) throw Error("line table: support radius must be positive");
  const int P = radial_nodes;

  if (d == 1) {
    dl_ = rho_max_ / P;
    const int half = static_cast<int>(std::ceil(1.25 * P));
    lambda0_ = -half * dl_;
    std::vector<double> a0{0.0}, a1{kPi}, out;
    for (int g = 0; g < 2; ++g) {
      RVec v(2 * half + 1);
      for (int q = 0; q <= 2 * half; ++q) {
        const double lam = lambda0_ + q * dl_;
        const double ang = (lam >= 0 ? 0.0 : kPi) + (g == 0 ? 0.0 : kPi);
        std::vector<double> a{ang};
        chi.ring(std::abs(lam), a, out);
        v[q] = out[0];
      }
      d1_.push_back(v);
    }
    return;
  }

  // Angular Fourier coefficients c_m(rho) on a uniform radial grid.
  const int Nr = 2 * P;
  const double hr = rho_max_ / Nr;
  int Na = 512;
  std::vector<CVec> cm;  // per radial node, modes 0..Na-1
  for (;;) {
    cm.assign(Nr + 1, CVec());
    std::vector<double> alpha(Na), out;
    for (int j = 0; j < Na; ++j) alpha[j] = 2 * kPi * j / Na;
    double peak = 0, high = 0;
    for (int i = 0; i <= Nr; ++i) {
      chi.ring(i * hr, alpha, out);
      CVec u(Na);
      for (int j = 0; j < Na; ++j) u[j] = out[j];
      cm[i] = fft1(u) / double(Na);
      for (int m = 0; m <= Na / 2; ++m) {
        const double v = std::abs(cm[i][m]);
        peak = std::max(peak, v);
        if (m >= 3 * Na / 8) high = std::max(high, v);
      }
    }
    if (peak == 0.0) throw Error("line table: symbol vanishes identically");
    if (high <= 1e-13 * peak || Na >= 16384) break;
    Na *= 2;
  }
  double peak = 0;
  for (int i = 0; i <= Nr; ++i) peak = std::max(peak, cm[i].cwiseAbs().maxCoeff());
  int mc = 0;
  for (int m = 0; m < Na / 2; ++m)
    for (int i = 0; i <= Nr; ++i)
      if (std::abs(cm[i][m]) > 1e-12 * peak) mc = std::max(mc, m);
  const int nm = mc + 1;
  // radial table rows with reflection padding: c_m(-rho) = (-1)^m c_m(rho), zero beyond rho_max
  const int pad = 3;
  CMat C = CMat::Zero(Nr + 1 + 2 * pad, nm);
  for (int i = -pad; i <= Nr + pad; ++i) {
    for (int m = 0; m < nm; ++m) {
      cplx v = 0;
      if (i < 0)
        v = (m % 2 ? -1.0 : 1.0) * cm[-i][m];
      else if (i <= Nr)
        v = cm[i][m];
      C(i + pad, m) = v;
    }
  }

  // P_m(s_p) = int c_m(rho) e^{i m beta} dt along the line s = s_p (trapezoid in t).
  const double delta = 2 * rho_max_ / P;
  std::vector<CVec> proj(nm, CVec::Zero(P));
  CVec tmp(nm);
  for (int p = 0; p < P; ++p) {
    const double s = (p - P / 2 + 0.5) * delta;
    for (int it = 0; it < P; ++it) {
      const double t = (it - P / 2 + 0.5) * delta;
      const double rho = std::hypot(s, t);
      if (rho >= rho_max_) continue;
      const double x = rho / hr;
      const int i0 = static_cast<int>(std::floor(x));
      double w[6];
      lagrange6(x - i0, w);
      tmp.setZero();
      for (int k = 0; k < 6; ++k) tmp += w[k] * C.row(i0 - 2 + k + pad).transpose();
      const cplx e = std::polar(1.0, std::atan2(t, s));
      cplx ph = 1.0;
      for (int m = 0; m < nm; ++m) {
        proj[m][p] += delta * tmp[m] * ph;
        ph *= e;
      }
    }
  }

  // Moments and top-band spectral mass of the projections.
  mom_.assign(nm, {});
  double band_lo = 0, band_hi = 0, tail_den = 0;
  for (int m = 0; m < nm; ++m) {
    for (int p = 0; p < P; ++p) {
      const double s = (p - P / 2 + 0.5) * delta;
      double sk = 1;
      for (int k = 0; k < 5; ++k) {
        mom_[m][k] += delta * sk * proj[m][p];
        sk *= s;
      }
    }
    CVec z = CVec::Zero(4 * P);
    z.head(P) = proj[m];
    const CVec F = fft1(z);
    const double wm = m == 0 ? 1.0 : 2.0;
    for (int n = 0; n < 4 * P; ++n) {
      const int k = n <= 2 * P ? n : n - 4 * P;
      const double e = wm * std::abs(k) * std::norm(F[n]);
      tail_den += e;
      if (std::abs(k) >= 3 * P / 2)
        band_hi += e;
      else if (std::abs(k) >= P)
        band_lo += e;
    }
  }
  // Mass beyond the band by geometric extrapolation of the last two quarter bands.
  const double ratio = band_lo > 0 ? band_hi / band_lo : 1.0;
  const double beyond = ratio < 1 ? band_hi * ratio / (1 - ratio) : band_hi / std::max(1 - ratio, 1e-3);
  tail_ = tail_den > 0 ? beyond / tail_den : 0.0;

  // Ramp filter by linear convolution of the 2x upsampled projections.
  const double dout = delta / 2;
  const double W = kPi / delta;
  const double s0 = (-P / 2 + 0.5) * delta;
  const int q0 = static_cast<int>(std::ceil((kTableExtent * rho_max_ + s0) / dout));
  const int Nout = 2 * q0 + 2 * P - 1;
  lambda0_ = s0 - q0 * dout;
  dl_ = dout;
  const int Nk = Nout + 2 * P - 1;
  const int F = next_pow2(2 * P + Nk);
  CVec kern = CVec::Zero(F);
  for (int i = 0; i < Nk; ++i) kern[i] = ramp_kernel((i - q0 - 2 * P + 1) * dout, W);
  const CVec kf = fft1(kern);
  q_.assign(nm, CVec());
  for (int m = 0; m < nm; ++m) {
    CVec x = CVec::Zero(F);
    for (int p = 0; p < P; ++p) x[2 * p] = proj[m][p];
    CVec y = fft1(x);
    y.array() *= kf.array();
    const CVec c = ifft1(y);
    q_[m] = delta * c.segment(2 * P - 1, Nout);
  }
}

LineTable::Line LineTable::line(double gamma) const {
  Line L;
  L.lambda0 = lambda0_;
  L.dl = dl_;
  if (d_ == 1) {
    L.values = std::cos(gamma) > 0 ? d1_[0] : d1_[1];
    return L;
  }
  const int n = static_cast<int>(q_[0].size());
  CVec acc = q_[0];
  double mom[5];
  for (int k = 0; k < 5; ++k) mom[k] = mom_[0][k].real();
  const cplx e = std::polar(1.0, gamma);
  cplx ph = 1.0;
  for (std::size_t m = 1; m < q_.size(); ++m) {
    ph *= e;
    acc += 2.0 * ph * q_[m];
    for (int k = 0; k < 5; ++k) mom[k] += 2 * (ph * mom_[m][k]).real();
  }
  L.values.resize(n);
  for (int i = 0; i < n; ++i) L.values[i] = acc[i].real();
  for (int k = 0; k < 5; ++k) L.moments[k] = mom[k];
  L.has_tail = true;
  return L;
}

std::vector<LineTable::Line> LineTable::uniform_lines(int M) const {
  std::vector<Line> out(M);
  if (d_ == 1) {
    for (int k = 0; k < M; ++k) out[k] = line(2 * kPi * k / M);
    return out;
  }
  const int n = static_cast<int>(q_[0].size());
  // fold modes m and -m (the latter as conjugates) onto residues mod M
  CMat fold = CMat::Zero(M, n);
  std::vector<std::array<cplx, 5>> mfold(M);
  for (auto& a : mfold) a.fill(0.0);
  for (std::size_t m = 0; m < q_.size(); ++m) {
    const int rp = static_cast<int>(m % M);
    fold.row(rp) += q_[m].transpose();
    for (int k = 0; k < 5; ++k) mfold[rp][k] += mom_[m][k];
    if (m == 0) continue;
    const int rn = static_cast<int>((M - static_cast<int>(m % M)) % M);
    fold.row(rn) += q_[m].conjugate().transpose();
    for (int k = 0; k < 5; ++k) mfold[rn][k] += std::conj(mom_[m][k]);
  }
  // sum_r fold[r] e^{2 pi i r k / M} = M * inverse DFT over r
  const TorusGrid g(1, M, 1.0);
  RMat vals(M, n);
  CVec col(M);
  for (int q = 0; q < n; ++q) {
    col = fold.col(q);
    fft_inverse(g, col);
    vals.col(q) = (double(M) * col).real();
  }
  for (int k = 0; k < M; ++k) {
    out[k].lambda0 = lambda0_;
    out[k].dl = dl_;
    out[k].values = vals.row(k).transpose();
    out[k].has_tail = true;
  }
  for (int kk = 0; kk < 5; ++kk) {
    for (int r = 0; r < M; ++r) col[r] = mfold[r][kk];
    fft_inverse(g, col);
    for (int k = 0; k < M; ++k) out[k].moments[kk] = (double(M) * col[k]).real();
  }
  return out;
}

std::shared_ptr<const LineTable> make_line_table(int d, const PolarSymbol& chi, int radial_nodes) {
  return std::make_shared<const LineTable>(d, chi, radial_nodes);
}

std::string to_string(PhillipsBackend b) {
  switch (b) {
    case PhillipsBackend::Auto: return "auto";
    case PhillipsBackend::FourierBlock: return "fourier_block";
    case PhillipsBackend::Dense: return "dense";
    case PhillipsBackend::Krylov: return "krylov";
  }
  return "?";
}

PhillipsBackend parse_phillips_backend(const std::string& s) {
  if (s == "auto") return PhillipsBackend::Auto;
  if (s == "fourier_block") return PhillipsBackend::FourierBlock;
  if (s == "dense") return PhillipsBackend::Dense;
  if (s == "krylov") return PhillipsBackend::Krylov;
  throw Error("unknown Phillips backend: " + s);
}

PhillipsCalculus::PhillipsCalculus(const DiracOperator& op, PhillipsOptions opt) : op_(&op), opt_(opt) {
  if (op.d() > 2) throw Error("phillips: only d in {1, 2} supported");
  if (op.d() == 2 && (opt_.directions < 4 || opt_.directions % 2))
    throw Error("phillips: direction count must be even and >= 4");
  backend_ = opt_.backend;
  if (backend_ == PhillipsBackend::Auto) {
    std::size_t dim = 2;
    for (int P : coefficient_periods(op.profile())) dim *= static_cast<std::size_t>(P);
    if (op.fourier_diagonal())
      backend_ = PhillipsBackend::FourierBlock;
    else
      backend_ = dim <= static_cast<std::size_t>(opt_.dense_sector_max) ? PhillipsBackend::Dense : PhillipsBackend::Krylov;
  }
  if (backend_ == PhillipsBackend::FourierBlock && !op.fourier_diagonal())
    throw Error("phillips: Fourier block backend needs commuting constant coefficients");
  if (op.d() == 1) {
    thetas_ = {0.0};
    weight_ = 1.0;
  } else {
    for (int j = 0; j < opt_.directions / 2; ++j) thetas_.push_back(2 * kPi * j / opt_.directions);
    weight_ = 1.0 / opt_.directions;
  }
}

Vec PhillipsCalculus::direction(double theta) const {
  Vec v(op_->d());
  if (op_->d() == 1) {
    v[0] = 1;
  } else {
    v[0] = std::cos(theta);
    v[1] = std::sin(theta);
  }
  return v;
}

std::shared_ptr<const LineTable::Line> PhillipsCalculus::line_for(const SymbolRef& s, double theta) const {
  double g = std::fmod(theta - s.omega, 2 * kPi);
  if (g < 0) g += 2 * kPi;
  const long key = std::lround(g * 1e9);
  std::lock_guard<std::mutex> lock(mu_);
  const int M = op_->d() == 1 ? 2 : opt_.directions;
  const double lat = g * M / (2 * kPi);
  const long li = std::lround(lat);
  if (std::abs(lat - li) < 1e-9) {
    auto& c = lattice_[s.table.get()];
    if (!c.owner) {
      c.owner = s.table;
      for (auto& L : s.table->uniform_lines(M)) c.lines.push_back(std::make_shared<const LineTable::Line>(std::move(L)));
    }
    return c.lines[static_cast<std::size_t>(li % M)];
  }
  auto it = lines_.find({s.table.get(), key});
  if (it != lines_.end()) return it->second.line;
  auto L = std::make_shared<const LineTable::Line>(s.table->line(g));
  lines_[{s.table.get(), key}] = CachedLine{s.table, L};
  return L;
}

void PhillipsCalculus::clear_cache() const {
  std::lock_guard<std::mutex> lock(mu_);
  lines_.clear();
  lattice_.clear();
}

std::shared_ptr<const PhillipsCalculus::ModeData> PhillipsCalculus::mode_data() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (modes_) return modes_;
  auto md = std::make_shared<ModeData>();
  const TorusGrid& g = op_->grid();
  const std::size_t n = g.cells();
  md->zeta.resize(n);
  md->pplus.resize(n);
  md->pminus.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const JointMode jm = joint_mode(*op_, wavevector(g, i));
    md->zeta[i] = jm.zeta;
    md->pplus[i] = jm.proj_plus;
    md->pminus[i] = jm.proj_minus;
  }
  modes_ = md;
  return md;
}

std::shared_ptr<const BlochReduction> PhillipsCalculus::bloch() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!bloch_) bloch_ = std::make_shared<const BlochReduction>(*op_);
  return bloch_;
}

std::shared_ptr<const PhillipsCalculus::DenseLine> PhillipsCalculus::dense_line(int j) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = dense_.find(j);
    if (it != dense_.end()) return it->second;
  }
  const auto B = bloch();
  auto dl = std::make_shared<DenseLine>();
  const double scale = op_->norm_bound(direction(thetas_[j]));
  for (CMat& A : B->matrices(direction(thetas_[j]))) {
    DenseSector s;
    // Blocks that vanish up to rounding are taken as exact zeros; their eigenvectors are not resolvable.
    if (A.norm() <= 1e-12 * scale) {
      s.values = CVec::Zero(A.rows());
      s.vectors = CMat::Identity(A.rows(), A.cols());
      s.inverse = s.vectors;
    } else {
      EigenDecomposition e = eigen_general(std::move(A));
      s.inverse = e.vectors.partialPivLu().inverse();
      const double cond = e.vectors.norm() * s.inverse.norm();
      if (!std::isfinite(cond) || cond > 1e12)
        throw Error("phillips: eigenvector basis ill-conditioned on line " + std::to_string(j));
      s.values = std::move(e.values);
      s.vectors = std::move(e.vectors);
    }
    dl->push_back(std::move(s));
  }
  const double mb = 32.0 * B->sectors() * B->sector_dim() * B->sector_dim() * thetas_.size() / (1 << 20);
  if (mb <= opt_.dense_cache_mb) {
    std::lock_guard<std::mutex> lock(mu_);
    dense_[j] = dl;
  }
  return dl;
}

std::vector<std::vector<Field>> PhillipsCalculus::apply_batch(const std::vector<SymbolRef>& symbols,
                                                              const std::vector<Field>& fields,
                                                              PhillipsReport* rep) const {
  PhillipsReport r;
  r.backend = to_string(backend_);
  r.lines = static_cast<int>(thetas_.size());
  for (const auto& f : fields)
    if (f.grid != op_->grid()) throw Error("phillips: field grid does not match the operator");
  for (const auto& s : symbols) {
    if (!s.table || s.table->d() != op_->d()) throw Error("phillips: symbol table dimension mismatch");
    r.max_tail = std::max(r.max_tail, s.table->tail_estimate());
    if (s.table->tail_estimate() > opt_.tail_tol)
      throw Error("phillips: quadrature budget exceeded for " + s.table->name() + ", tail estimate " +
                  std::to_string(s.table->tail_estimate()));
  }
  std::vector<std::vector<Field>> out(fields.size());
  if (!symbols.empty() && !fields.empty()) {
    if (backend_ == PhillipsBackend::Dense) {
      apply_dense(symbols, fields, out, r);
    } else {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        out[i].assign(symbols.size(), Field(fields[i].grid));
        PhillipsReport ri;
        if (backend_ == PhillipsBackend::FourierBlock)
          apply_fourier(symbols, fields[i], out[i], ri);
        else
          apply_krylov(symbols, fields[i], out[i], ri);
        r.max_krylov_dim = std::max(r.max_krylov_dim, ri.max_krylov_dim);
        r.max_imag = std::max(r.max_imag, ri.max_imag);
      }
    }
  }
  if (rep) *rep = r;
  return out;
}

std::vector<Field> PhillipsCalculus::apply(const std::vector<SymbolRef>& symbols, const Field& f,
                                           PhillipsReport* rep) const {
  auto out = apply_batch(symbols, std::vector<Field>{f}, rep);
  return std::move(out[0]);
}

Field PhillipsCalculus::apply(const SymbolRef& symbol, const Field& f, PhillipsReport* rep) const {
  return apply(std::vector<SymbolRef>{symbol}, f, rep)[0];
}

void PhillipsCalculus::apply_fourier(const std::vector<SymbolRef>& symbols, const Field& f, std::vector<Field>& out,
                                     PhillipsReport&) const {
  const auto md = mode_data();
  const SpectralField F = fourier_forward(f);
  const std::size_t n = f.size();
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    RVec wp = RVec::Zero(n), wm = RVec::Zero(n);
    for (double th : thetas_) {
      const auto L = line_for(symbols[s], th);
      const Vec dir = direction(th);
      for (std::size_t i = 0; i < n; ++i) {
        double lam = 0;
        for (int k = 0; k < op_->d(); ++k) lam += dir[k] * md->zeta[i][k];
        wp[i] += weight_ * (*L)(lam).real();
        wm[i] += weight_ * (*L)(-lam).real();
      }
    }
    SpectralField G{f.grid, CVec(n), CVec(n)};
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::Vector2cd v(F.comp1[i], F.comp2[i]);
      const Eigen::Vector2cd w = symbols[s].scale * (wp[i] * md->pplus[i] + wm[i] * md->pminus[i]) * v;
      G.comp1[i] = w[0];
      G.comp2[i] = w[1];
    }
    out[s] = fourier_inverse(G);
  }
}

void PhillipsCalculus::apply_dense(const std::vector<SymbolRef>& symbols, const std::vector<Field>& fields,
                                   std::vector<std::vector<Field>>& out, PhillipsReport& rep) const {
  const auto B = bloch();
  const Eigen::Index m = B->sector_dim(), F = static_cast<Eigen::Index>(fields.size());
  const Eigen::Index S = static_cast<Eigen::Index>(symbols.size());
  std::vector<CMat> X;
  for (const Field& f : fields) X.push_back(B->forward(f.stacked()));
  std::vector<CMat> acc(static_cast<std::size_t>(F * S), CMat::Zero(m, B->sectors()));
  for (std::size_t j = 0; j < thetas_.size(); ++j) {
    const auto D = dense_line(static_cast<int>(j));
    std::vector<std::shared_ptr<const LineTable::Line>> L;
    for (const auto& s : symbols) L.push_back(line_for(s, thetas_[j]));
    for (int q = 0; q < B->sectors(); ++q) {
      const DenseSector& ds = (*D)[static_cast<std::size_t>(q)];
      rep.max_imag = std::max(rep.max_imag, ds.values.imag().cwiseAbs().maxCoeff());
      CMat in(m, F);
      for (Eigen::Index i = 0; i < F; ++i) in.col(i) = X[static_cast<std::size_t>(i)].col(q);
      const CMat C = ds.inverse * in;
      CMat Z(m, F * S);
      for (Eigen::Index s = 0; s < S; ++s) {
        CVec g(m);
        for (Eigen::Index k = 0; k < m; ++k)
          g[k] = (weight_ * symbols[static_cast<std::size_t>(s)].scale) * (*L[static_cast<std::size_t>(s)])(ds.values[k]);
        Z.middleCols(s * F, F) = g.asDiagonal() * C;
      }
      const CMat Y = ds.vectors * Z;
      for (Eigen::Index c = 0; c < F * S; ++c) acc[static_cast<std::size_t>(c)].col(q) += Y.col(c);
    }
  }
  for (Eigen::Index i = 0; i < F; ++i) {
    out[static_cast<std::size_t>(i)].clear();
    for (Eigen::Index s = 0; s < S; ++s)
      out[static_cast<std::size_t>(i)].push_back(
          Field::from_stacked(fields[0].grid, B->inverse(acc[static_cast<std::size_t>(s * F + i)])));
  }
}

void PhillipsCalculus::apply_krylov(const std::vector<SymbolRef>& symbols, const Field& f, std::vector<Field>& out,
                                    PhillipsReport& rep) const {
  const CVec x = f.stacked();
  const std::size_t S = symbols.size();
  CMat acc = CMat::Zero(x.size(), static_cast<Eigen::Index>(S));
  if (x.norm() == 0.0) {
    for (std::size_t s = 0; s < S; ++s) out[s] = Field(f.grid);
    return;
  }
  for (double th : thetas_) {
    std::vector<std::shared_ptr<const LineTable::Line>> L(S);
    for (std::size_t s = 0; s < S; ++s) L[s] = line_for(symbols[s], th);
    Arnoldi arn(op_->linop(direction(th)), x, opt_.krylov_max);
    int m = std::min(24, opt_.krylov_max);
    CMat Zprev;
    CMat Z;
    double err = 0;
    RitzDecomposition R;
    for (;;) {
      const int reached = arn.extend(m);
      R = ritz(arn.hessenberg());
      Z.resize(reached, static_cast<Eigen::Index>(S));
      for (std::size_t s = 0; s < S; ++s) {
        CVec g(reached);
        for (int i = 0; i < reached; ++i) g[i] = (*L[s])(R.values[i]) * R.coeffs[i];
        Z.col(static_cast<Eigen::Index>(s)) = R.vectors * g;
      }
      if (arn.breakdown()) break;
      if (Zprev.size() > 0) {
        err = 0;
        for (Eigen::Index s = 0; s < Z.cols(); ++s) {
          CVec d = Z.col(s);
          d.head(Zprev.rows()) -= Zprev.col(s);
          err = std::max(err, d.norm());
        }
        if (err <= opt_.krylov_tol) break;
      }
      if (reached >= opt_.krylov_max)
        throw Error("phillips: Krylov budget exhausted at dimension " + std::to_string(reached) +
                    ", achieved increment " + std::to_string(err));
      Zprev = Z;
      m = std::min(opt_.krylov_max, reached + 16);
    }
    rep.max_krylov_dim = std::max(rep.max_krylov_dim, arn.dim());
    rep.max_imag = std::max(rep.max_imag, R.values.imag().cwiseAbs().maxCoeff());
    for (std::size_t s = 0; s < S; ++s) Z.col(static_cast<Eigen::Index>(s)) *= weight_ * symbols[s].scale;
    acc.noalias() += arn.beta() * (arn.basis().leftCols(arn.dim()) * Z);
  }
  for (std::size_t s = 0; s < S; ++s) out[s] = Field::from_stacked(f.grid, acc.col(static_cast<Eigen::Index>(s)));
}

}  // namespace rfio
