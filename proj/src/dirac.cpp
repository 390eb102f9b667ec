#include "rfio/dirac.hpp"

#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>

#include "rfio/fft.hpp"

namespace rfio {

std::string to_string(Coupling c) { return c == Coupling::Local ? "local" : "half_shift"; }

Coupling parse_coupling(const std::string& s) {
  if (s == "local") return Coupling::Local;
  if (s == "half_shift" || s == "spectral_half_shift") return Coupling::HalfShift;
  throw Error("unknown coupling: " + s);
}

DiracOperator::DiracOperator(CoefficientProfile profile, Coupling coupling)
    : profile_(std::move(profile)), coupling_(coupling) {
  const TorusGrid& g = profile_.grid;
  const std::size_t N = g.cells();
  for (int j = 0; j < g.d; ++j) {
    RVec vm(N), un(N);
    for (std::size_t i = 0; i < N; ++i) {
      const int c = g.coord(i, j);
      vm[i] = profile_.midpoints[j][c];
      un[i] = profile_.nodes[j + g.d][c];
    }
    vmid_.push_back(vm);
    unod_.push_back(un);
  }
}

void DiracOperator::half_shift(int j, CVec& u, int sign) const {
  const TorusGrid& g = grid();
  if (coupling_ != Coupling::HalfShift || g.d == 1) return;
  for (int k = 0; k < g.d; ++k) {
    if (k == j) continue;
    fft_axis_forward(g, k, u);
    const std::size_t N = g.cells();
    for (std::size_t i = 0; i < N; ++i) {
      const double kap = wavenumber(g, g.coord(i, k));
      u[i] *= std::polar(1.0, sign * 0.5 * kap * g.h());
    }
    fft_axis_inverse(g, k, u);
  }
}

void DiracOperator::apply_V(int j, const CVec& u, CVec& out) const {
  const TorusGrid& g = grid();
  const std::size_t N = g.cells();
  out.resize(static_cast<Eigen::Index>(N));
  const double ih = 1.0 / g.h();
  for (std::size_t i = 0; i < N; ++i) out[i] = vmid_[j][i] * (u[g.shifted(i, j, 1)] - u[i]) * ih;
  half_shift(j, out, +1);
}

void DiracOperator::apply_U(int j, const CVec& v, CVec& out) const {
  const TorusGrid& g = grid();
  const std::size_t N = g.cells();
  CVec w = v;
  half_shift(j, w, -1);
  out.resize(static_cast<Eigen::Index>(N));
  const double ih = 1.0 / g.h();
  for (std::size_t i = 0; i < N; ++i) out[i] = -unod_[j][i] * (w[i] - w[g.shifted(i, j, -1)]) * ih;
}

Field DiracOperator::apply(const Vec& xi, const Field& f) const {
  Field out(grid());
  CVec tmp;
  for (int j = 0; j < d(); ++j) {
    if (xi[j] == 0.0) continue;
    apply_U(j, f.comp2, tmp);
    out.comp1 += xi[j] * tmp;
    apply_V(j, f.comp1, tmp);
    out.comp2 += xi[j] * tmp;
  }
  return out;
}

void DiracOperator::apply_stacked(const Vec& xi, const CVec& x, CVec& y) const {
  const Eigen::Index N = static_cast<Eigen::Index>(grid().cells());
  y = CVec::Zero(2 * N);
  CVec tmp;
  const CVec x1 = x.head(N), x2 = x.tail(N);
  for (int j = 0; j < d(); ++j) {
    if (xi[j] == 0.0) continue;
    apply_U(j, x2, tmp);
    y.head(N) += xi[j] * tmp;
    apply_V(j, x1, tmp);
    y.tail(N) += xi[j] * tmp;
  }
}

LinOp DiracOperator::linop(const Vec& xi) const {
  return [this, xi](const CVec& x, CVec& y) { apply_stacked(xi, x, y); };
}

LinOp DiracOperator::ilinop(const Vec& xi) const {
  return [this, xi](const CVec& x, CVec& y) {
    apply_stacked(xi, x, y);
    y *= cplx(0, 1);
  };
}

Field DiracOperator::apply_L(const Field& f) const {
  Field out(grid());
  CVec a, b;
  for (int j = 0; j < d(); ++j) {
    apply_V(j, f.comp1, a);
    apply_U(j, a, b);
    out.comp1 += b;
    apply_U(j, f.comp2, a);
    apply_V(j, a, b);
    out.comp2 += b;
  }
  return out;
}

CMat DiracOperator::dense(const Vec& xi) const {
  const Eigen::Index M = static_cast<Eigen::Index>(2 * grid().cells());
  if (M > 8192) throw Error("dense: system too large (2n^d = " + std::to_string(M) + ")");
  CMat A(M, M);
  CVec e = CVec::Zero(M), y;
  for (Eigen::Index c = 0; c < M; ++c) {
    e[c] = 1;
    apply_stacked(xi, e, y);
    A.col(c) = y;
    e[c] = 0;
  }
  return A;
}

Eigen::SparseMatrix<double> DiracOperator::sparse_L1() const {
  const TorusGrid& g = grid();
  const std::size_t N = g.cells();
  const double s = 1.0 / (g.h() * g.h());
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i < N; ++i)
    for (int j = 0; j < g.d; ++j) {
      const int c = g.coord(i, j);
      const int cm = (c + g.n - 1) % g.n;
      const double b = profile_.nodes[j + g.d][c];
      const double ap = profile_.midpoints[j][c], am = profile_.midpoints[j][cm];
      t.emplace_back(i, g.shifted(i, j, 1), -b * ap * s);
      t.emplace_back(i, g.shifted(i, j, -1), -b * am * s);
      t.emplace_back(i, i, b * (ap + am) * s);
    }
  Eigen::SparseMatrix<double> L(N, N);
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

double DiracOperator::norm_bound(const Vec& xi) const {
  double s = 0;
  for (int j = 0; j < d(); ++j) {
    const double m = std::max(profile_.midpoints[j].maxCoeff(), profile_.nodes[j + d()].maxCoeff());
    s += std::abs(xi[j]) * 2 * m / grid().h();
  }
  return s;
}

Field DiracOperator::exp_i(const Vec& xi, const Field& f, double tol) const {
  const CVec y = expmv_taylor(linop(xi), norm_bound(xi), cplx(0, 1), f.stacked(), tol);
  return Field::from_stacked(grid(), y);
}

Block1D DiracOperator::block(int axis, BlockKind kind) const {
  return assemble_block(profile_.midpoints[axis], profile_.nodes[axis + d()], grid().h(), kind, axis);
}

bool DiracOperator::fourier_diagonal() const {
  if (!profile_.constant()) return false;
  if (d() > 1 && coupling_ != Coupling::HalfShift) return false;
  const double r0 = profile_.nodes[d()][0] / profile_.nodes[0][0];
  for (int j = 1; j < d(); ++j)
    if (std::abs(profile_.nodes[j + d()][0] / profile_.nodes[j][0] - r0) > 1e-14 * r0) return false;
  return true;
}

ModeSymbol mode_symbol(const DiracOperator& op, const Vec& xi, const Eigen::Vector3d& kappa) {
  const TorusGrid& g = op.grid();
  const double h = g.h();
  const bool shift = op.coupling() == Coupling::HalfShift && g.d > 1;
  ModeSymbol s{0.0, 0.0};
  for (int j = 0; j < g.d; ++j) {
    if (xi[j] == 0.0) continue;
    const double aj = op.profile().nodes[j][0];
    const double bj = op.profile().nodes[j + g.d][0];
    double phase = 0;
    if (shift)
      for (int k = 0; k < g.d; ++k)
        if (k != j) phase += 0.5 * kappa[k] * h;
    const cplx V = aj * (std::polar(1.0, kappa[j] * h) - 1.0) / h * std::polar(1.0, phase);
    const cplx U = -bj * (1.0 - std::polar(1.0, -kappa[j] * h)) / h * std::polar(1.0, -phase);
    s.b += xi[j] * U;
    s.c += xi[j] * V;
  }
  return s;
}

JointMode joint_mode(const DiracOperator& op, const Eigen::Vector3d& kappa) {
  if (!op.fourier_diagonal()) throw Error("fourier oracle requires commuting constant coefficients");
  const TorusGrid& g = op.grid();
  const double h = g.h();
  JointMode m;
  m.zeta.setZero();
  double Phi = 0;
  for (int k = 0; k < g.d; ++k) Phi += 0.5 * kappa[k] * h;
  const double rho = op.profile().nodes[g.d][0] / op.profile().nodes[0][0];
  for (int j = 0; j < g.d; ++j) {
    const double s = 2 * std::sin(0.5 * kappa[j] * h) / h;
    m.zeta[j] = s * std::sqrt(op.profile().nodes[j][0] * op.profile().nodes[j + g.d][0]);
  }
  CMat Q(2, 2);
  Q << 0.0, cplx(0, -1) * std::sqrt(rho) * std::polar(1.0, -Phi), cplx(0, 1) / std::sqrt(rho) * std::polar(1.0, Phi),
      0.0;
  const CMat I = CMat::Identity(2, 2);
  m.proj_plus = 0.5 * (I + Q);
  m.proj_minus = 0.5 * (I - Q);
  return m;
}

Field fourier_oracle(const DiracOperator& op, const std::function<cplx(const Eigen::Vector3d&)>& psi, const Field& f) {
  if (!op.fourier_diagonal()) throw Error("fourier_oracle: backend mismatch (variable or non-commuting coefficients)");
  SpectralField s = fourier_forward(f);
  const TorusGrid& g = f.grid;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const JointMode m = joint_mode(op, wavevector(g, i));
    Eigen::Vector2cd v(s.comp1[i], s.comp2[i]);
    const cplx pp = psi(m.zeta), pm = psi(-m.zeta);
    const Eigen::Vector2cd w = pp * (m.proj_plus * v) + pm * (m.proj_minus * v);
    s.comp1[i] = w[0];
    s.comp2[i] = w[1];
  }
  return fourier_inverse(s);
}

std::vector<int> coefficient_periods(const CoefficientProfile& p, double tol) {
  const int n = p.grid.n;
  std::vector<int> out;
  for (int j = 0; j < p.d; ++j) {
    std::vector<const RVec*> arrays{&p.nodes[j], &p.nodes[j + p.d], &p.midpoints[j], &p.midpoints[j + p.d]};
    double scale = 0;
    for (const RVec* a : arrays) scale = std::max(scale, a->cwiseAbs().maxCoeff());
    int best = n;
    for (int P = 1; P < n; ++P) {
      if (n % P) continue;
      bool ok = true;
      for (const RVec* a : arrays)
        for (int k = 0; ok && k < n; ++k) ok = std::abs((*a)[k] - (*a)[(k + P) % n]) <= tol * scale;
      if (ok) {
        best = P;
        break;
      }
    }
    out.push_back(best);
  }
  return out;
}

EigenDecomposition eigen_general(CMat A, bool vectors) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  EigenDecomposition e;
  e.values.resize(n);
  if (vectors) e.vectors.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, A.data(), n, e.values.data(),
                                        nullptr, 1, vectors ? e.vectors.data() : nullptr, n);
  if (info != 0) throw Error("eigen_general: zgeev failed with info " + std::to_string(info));
  return e;
}

BlochReduction::BlochReduction(const DiracOperator& op) : op_(&op), period_(coefficient_periods(op.profile())) {
  const TorusGrid& g = op.grid();
  const int d = g.d;
  int base = 1, periods = 1;
  for (int j = 0; j < d; ++j) {
    count_.push_back(g.n / period_[j]);
    base *= period_[j];
    periods *= count_[j];
  }
  sectors_ = periods;
  dim_ = 2 * base;
  if (dim_ > 4096) throw Error("bloch: sector dimension " + std::to_string(dim_) + " exceeds 4096");
  // Sites and offsets by mixed-radix counters over the axes.
  for (int s = 0; s < base; ++s) {
    std::size_t idx = 0;
    int r = s;
    for (int j = d - 1; j >= 0; --j) {
      idx += static_cast<std::size_t>(r % period_[j]) * g.stride(j);
      r /= period_[j];
    }
    site_.push_back(idx);
  }
  std::vector<std::vector<int>> mcoord(periods, std::vector<int>(d));
  for (int m = 0; m < periods; ++m) {
    std::size_t off = 0;
    int r = m;
    for (int j = d - 1; j >= 0; --j) {
      mcoord[m][j] = r % count_[j];
      off += static_cast<std::size_t>(mcoord[m][j] * period_[j]) * g.stride(j);
      r /= count_[j];
    }
    offset_.push_back(off);
  }
  phase_.resize(periods, sectors_);
  for (int m = 0; m < periods; ++m)
    for (int q = 0; q < sectors_; ++q) {
      double ph = 0;
      for (int j = 0; j < d; ++j) ph += double(mcoord[q][j]) * mcoord[m][j] / count_[j];
      phase_(m, q) = std::polar(1.0, -2 * kPi * ph);
    }
  const std::size_t N = g.cells();
  for (int j = 0; j < d; ++j) {
    Vec e = Vec::Zero(d);
    e[j] = 1;
    std::vector<CMat> mats(sectors_, CMat(dim_, dim_));
    CVec x = CVec::Zero(static_cast<Eigen::Index>(2 * N)), y;
    for (int c = 0; c < dim_; ++c) {
      const std::size_t at = (c < base ? 0 : N) + site_[c % base];
      x[static_cast<Eigen::Index>(at)] = 1;
      op.apply_stacked(e, x, y);
      x[static_cast<Eigen::Index>(at)] = 0;
      const CMat Y = forward(y);
      for (int q = 0; q < sectors_; ++q) mats[q].col(c) = Y.col(q);
    }
    axis_.push_back(std::move(mats));
  }
}

std::vector<CMat> BlochReduction::matrices(const Vec& xi) const {
  std::vector<CMat> out(sectors_, CMat::Zero(dim_, dim_));
  for (int q = 0; q < sectors_; ++q)
    for (int j = 0; j < op_->d(); ++j)
      if (xi[j] != 0.0) out[q] += xi[j] * axis_[j][q];
  return out;
}

CMat BlochReduction::forward(const CVec& x) const {
  const std::size_t N = op_->grid().cells();
  const int base = dim_ / 2, periods = static_cast<int>(offset_.size());
  CMat R(dim_, periods);
  for (int c = 0; c < dim_; ++c) {
    const std::size_t at = (c < base ? 0 : N) + site_[c % base];
    for (int m = 0; m < periods; ++m) R(c, m) = x[static_cast<Eigen::Index>(at + offset_[m])];
  }
  return R * phase_;
}

CVec BlochReduction::inverse(const CMat& X) const {
  const std::size_t N = op_->grid().cells();
  const int base = dim_ / 2, periods = static_cast<int>(offset_.size());
  const CMat R = X * phase_.adjoint() / double(sectors_);
  CVec x(static_cast<Eigen::Index>(2 * N));
  for (int c = 0; c < dim_; ++c) {
    const std::size_t at = (c < base ? 0 : N) + site_[c % base];
    for (int m = 0; m < periods; ++m) x[static_cast<Eigen::Index>(at + offset_[m])] = R(c, m);
  }
  return x;
}

GroupLawReport group_law_probe(const DiracOperator& op, const Vec& xi, const Vec& eta, const std::vector<Field>& family,
                               bool spectrum) {
  GroupLawReport r;
  r.xi = xi;
  r.eta = eta;
  r.commutativity = op.profile().commutativity_indicator();
  const Vec sum = xi + eta;
  for (const Field& f : family) {
    const Field a = op.exp_i(xi, op.exp_i(eta, f));
    const Field b = op.exp_i(sum, f);
    r.defect = std::max(r.defect, l2_norm(a - b) / l2_norm(f));
  }
  if (spectrum) {
    const BlochReduction bloch(op);
    for (const Vec* v : {&xi, &eta, &sum}) {
      if (v->norm() == 0) continue;
      for (const CMat& A : bloch.matrices(*v / v->norm()))
        r.max_im_lambda = std::max(r.max_im_lambda, eigen_general(A, false).values.imag().cwiseAbs().maxCoeff());
    }
  }
  return r;
}

SpeedMeasurement measure_speed(const DiracOperator& op, const Vec& xi, double slack_cells, double threshold) {
  const TorusGrid& g = op.grid();
  Field f(g);
  std::size_t centre = 0;
  for (int a = 0; a < g.d; ++a) centre += static_cast<std::size_t>(g.n / 2) * g.stride(a);
  f.comp1[centre] = 1.0 / std::sqrt(2.0);
  f.comp2[centre] = 1.0 / std::sqrt(2.0);
  const Field u = op.exp_i(xi, f, 1e-16);
  const double xn = xi.norm();
  const Vec w = xi / xn;
  std::vector<std::pair<double, double>> dm;
  dm.reserve(g.cells());
  double total = 0;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    double proj = 0;
    for (int a = 0; a < g.d; ++a) {
      double dx = (g.coord(i, a) - g.n / 2) * g.h();
      dx -= g.length * std::round(dx / g.length);
      proj += w[a] * dx;
    }
    const double m = std::norm(u.comp1[i]) + std::norm(u.comp2[i]);
    dm.emplace_back(std::abs(proj), m);
    total += m;
  }
  std::sort(dm.begin(), dm.end());
  SpeedMeasurement s;
  s.xi_norm = xn;
  double lam = op.profile().Lambda;
  s.bound_distance = lam * xn + slack_cells * g.h();
  double tail = 0, leak = 0;
  s.kappa_hat = 0;
  bool found = false;
  for (std::size_t k = dm.size(); k-- > 0;) {
    if (dm[k].first > s.bound_distance) leak += dm[k].second;
    if (!found && tail + dm[k].second >= threshold * total) {
      s.kappa_hat = dm[k].first / xn;
      found = true;
    }
    tail += dm[k].second;
  }
  s.leakage = leak / total;
  return s;
}

}  // namespace rfio
