#include "rfio/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>

#include "rfio/dirac.hpp"
#include "rfio/fft.hpp"
#include "rfio/hpfio.hpp"
#include "rfio/multiplier.hpp"
#include "rfio/opnorm.hpp"
#include "rfio/phillips.hpp"
#include "rfio/propagators.hpp"
#include "rfio/spectral1d.hpp"
#include "rfio/tensor.hpp"
#include "rfio/tent.hpp"
#include "rfio/wavepackets.hpp"

namespace rfio {

const std::vector<ScenarioInfo>& scenarios() {
  static const std::vector<ScenarioInfo> list{
      {"oracle-agreement", 1, "line-projection packets vs the Fourier multiplier oracle"},
      {"frame-identities", 2, "frame resolution identities and reproducing constants"},
      {"speed", 3, "finite propagation speed of exp(i xi.D)"},
      {"threshold", 4, "fixed-time L^p growth of the half-wave group, alpha = 0 vs alpha = 0.3"},
      {"halfwave-bounded", 5, "half-wave group on the adapted Hardy space across grids"},
      {"embedding", 6, "Sobolev and Lebesgue embedding constants"},
      {"flow-1d", 7, "1D flow group law and cosine intertwining order"},
      {"square-function", 8, "radial square function identity at p = 2"},
      {"opnorm", 9, "p-norm estimator vs brute force and pipeline adjoint checks"},
      {"heat-kernel", 10, "1D heat kernel Gaussian regime and positivity"},
      {"multiplier", 11, "Marcinkiewicz bounds of the directional multipliers"},
      {"multiplication", 12, "multiplication by heat-Besov functions"},
      {"group-law", 13, "exp(i xi.D) group-law defects and spectral non-reality"},
      {"perturbation", 0, "first-order perturbation of the half-wave group (dense route)"},
  };
  return list;
}

const ScenarioInfo* find_scenario(const std::string& id) {
  for (const auto& s : scenarios())
    if (s.id == id) return &s;
  return nullptr;
}

const ScenarioInfo* scenario_for_criterion(int k) {
  for (const auto& s : scenarios())
    if (s.criterion == k) return &s;
  return nullptr;
}

std::string Check::text() const {
  return name + " = " + fmt(value) + " " + relation + " " + fmt(bound) + (ok ? "" : " [violated]");
}

bool ScenarioResult::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
}

Check& ScenarioResult::check(std::string name, double value, std::string relation, double bound) {
  bool ok = false;
  if (std::isfinite(value)) {
    if (relation == "<=") ok = value <= bound;
    else if (relation == "<") ok = value < bound;
    else if (relation == ">=") ok = value >= bound;
    else if (relation == ">") ok = value > bound;
    else throw Error("check: unknown relation " + relation);
  }
  checks.push_back({std::move(name), value, std::move(relation), bound, ok});
  return checks.back();
}

void ScenarioResult::note_profile(const std::string& label, const CoefficientProfile& p) {
  log.push_back("profile " + label + ": kind=" + to_string(p.kind) + " d=" + fmt(p.d) + " n=" + fmt(p.grid.n) +
                " hash=" + hex(p.hash()) + " lambda=" + fmt(p.lambda) + " Lambda=" + fmt(p.Lambda) +
                " commutativity_indicator=" + fmt(p.commutativity_indicator()));
}

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  StageTimer(ScenarioResult& r, std::string name) : r_(r), name_(std::move(name)), t0_(Clock::now()) {}
  ~StageTimer() { r_.stages.push_back({name_, std::chrono::duration<double>(Clock::now() - t0_).count()}); }

 private:
  ScenarioResult& r_;
  std::string name_;
  Clock::time_point t0_;
};

constexpr double kLength = 2 * kPi;

CoefficientProfile profile_for(const ExperimentConfig& c, const TorusGrid& g) {
  return make_profile(parse_profile_kind(c.profile), g, c.profile_params, c.seed);
}

CoefficientProfile profile_for(const ExperimentConfig& c, const TorusGrid& g, const std::string& kind) {
  return make_profile(parse_profile_kind(kind), g, kind == c.profile ? c.profile_params : std::map<std::string, double>{},
                      c.seed);
}

FrameParams frame_params(const ExperimentConfig& c, int d) {
  FrameParams fp;
  fp.d = d;
  fp.J = c.frame_J;
  if (c.frame_K > 0) fp.octaves = c.frame_K;
  if (c.c_dir > 0) fp.c_dir = c.c_dir;
  return fp;
}

FrameParams grid_frame(const ExperimentConfig& c, const TorusGrid& g) {
  FrameParams fp = frame_params(c, g.d);
  return c.frame_K > 0 ? fp : frame_for_grid(g, fp);
}

HpfioOptions hpfio_options(const ExperimentConfig& c) {
  HpfioOptions o;
  o.phillips.directions = c.directions;
  o.phillips.radial_nodes = c.radial_nodes;
  return o;
}

Vec axis_vec(int d, double a, double b = 0) {
  Vec v(d);
  v[0] = a;
  if (d > 1) v[1] = b;
  return v;
}

double max_over(const std::vector<double>& v) { return v.empty() ? 0 : *std::max_element(v.begin(), v.end()); }
double min_over(const std::vector<double>& v) { return v.empty() ? 0 : *std::min_element(v.begin(), v.end()); }
double spread(const std::vector<double>& v) { return max_over(v) / min_over(v) - 1; }

// Least-squares slope of log2(e) against log2(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& e) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log2(h[i]), y = std::log2(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ScenarioResult oracle_agreement(const ExperimentConfig& c) {
  ScenarioResult r;
  const TorusGrid g(2, c.grid_sizes.front(), kLength);
  const auto prof = profile_for(c, g);
  r.note_profile("main", prof);
  const DiracOperator op(prof, parse_coupling(c.coupling));
  if (!op.fourier_diagonal()) throw Error("oracle-agreement: the Fourier oracle needs constant commuting coefficients");
  FrameParams fp = frame_params(c, 2);
  if (c.frame_K <= 0) fp.octaves = 3;
  const auto frame = std::make_shared<const WavePacketFrame>(build_frame(fp, g));
  const std::vector<double> sigmas{1.0, 0.5, 0.25};
  // The field band covers the support |zeta| <= 2 / sigma of every tested packet.
  const Field f = band_limited_field(g, 2 / sigmas.back(), c.seed);
  const int nomega = 8;

  Table detail{"errors", {"level", "directions", "radial_nodes", "sigma", "omega", "rel_l2_error", "table_tail"}, {}};
  Table summary{"summary", {"level", "directions", "radial_nodes", "max_rel_l2_error"}, {}};
  std::vector<Field> exact;
  {
    StageTimer st(r, "oracle");
    for (double sig : sigmas)
      for (int k = 0; k < nomega; ++k) {
        const double om = 2 * kPi * k / nomega;
        exact.push_back(fourier_oracle(
            op,
            [&](const Eigen::Vector3d& z) {
              return cplx(frame->psi(om, sig, std::hypot(z[0], z[1]), std::atan2(z[1], z[0])));
            },
            f));
      }
  }
  std::vector<double> worst, nodes;
  for (int level = 0; level < 2; ++level) {
    StageTimer st(r, "phillips level " + fmt(level));
    PhillipsOptions o;
    o.directions = c.directions << level;
    o.radial_nodes = c.radial_nodes << level;
    o.tail_tol = 1;
    const PhillipsCalculus pc(op, o);
    double w = 0;
    std::size_t idx = 0;
    for (double sig : sigmas) {
      const auto tab = make_line_table(2, packet_symbol(frame, sig), o.radial_nodes);
      std::vector<SymbolRef> refs;
      for (int k = 0; k < nomega; ++k) refs.push_back({tab, 2 * kPi * k / nomega, 1});
      const auto out = pc.apply(refs, f);
      for (int k = 0; k < nomega; ++k, ++idx) {
        const double e = l2_norm(out[k] - exact[idx]) / l2_norm(exact[idx]);
        w = std::max(w, e);
        detail.add({fmt(level), fmt(o.directions), fmt(o.radial_nodes), fmt(sig), fmt(2 * kPi * k / nomega), fmt(e),
                    fmt(tab->tail_estimate())});
      }
    }
    worst.push_back(w);
    nodes.push_back(o.radial_nodes);
    summary.add({fmt(level), fmt(o.directions), fmt(o.radial_nodes), fmt(w)});
  }
  r.check("baseline max relative l2 error", worst[0], "<=", 1e-2);
  r.check("doubled / baseline error ratio", worst[1] / worst[0], "<=", 0.6);
  r.tables = {summary, detail};
  r.plots.push_back({"error_vs_nodes", "packet error vs quadrature", "radial nodes (directions scale alike)",
                     "max relative l2 error", true, true, {{"max over 3 scales x 8 directions", nodes, worst}}});
  return r;
}

ScenarioResult frame_identities(const ExperimentConfig& c) {
  ScenarioResult r;
  FrameParams fp = frame_params(c, 2);
  if (c.frame_K <= 0) fp.octaves = 3;
  FrameParams fp6 = fp;
  fp6.octaves = 6;
  ResolutionReport a, b;
  {
    StageTimer st(r, "baseline frame");
    a = check_resolution(WavePacketFrame(fp));
  }
  {
    StageTimer st(r, "6-octave frame");
    b = check_resolution(WavePacketFrame(fp6));
  }
  Table t{"identities", {"octaves", "psi_identity", "psi_identity_doubled", "repro_l2", "radial_normalization", "C_ratio", "c_slope"}, {}};
  for (const auto* x : {&a, &b})
    t.add({fmt(x == &a ? fp.octaves : fp6.octaves), fmt(x->psi_identity), fmt(x->psi_identity_doubled), fmt(x->repro_l2),
           fmt(x->radial_normalization), fmt(x->C_ratio), fmt(x->c_slope)});
  Table cs{"reproducing_constants", {"sigma", "C_sigma"}, {}};
  for (std::size_t i = 0; i < b.sigma.size(); ++i) cs.add({fmt(b.sigma[i]), fmt(b.C_sigma[i])});
  r.check("psi identity deviation", a.psi_identity, "<", 1e-2);
  r.check("doubled / baseline psi identity deviation", a.psi_identity_doubled / a.psi_identity, "<=", 0.5);
  r.check("reproducing angular deviation", a.repro_l2, "<", 1e-3);
  r.check("C_sigma max/min over 6 octaves", b.C_ratio, "<=", 2);
  r.tables = {t, cs};
  r.plots.push_back({"reproducing_constants", "reproducing constants", "sigma", "C_sigma", true, false,
                     {{"6 octaves", b.sigma, b.C_sigma}}});
  return r;
}

ScenarioResult speed(const ExperimentConfig& c) {
  ScenarioResult r;
  Table t{"speed", {"d", "n", "xi1", "xi2", "xi_norm", "kappa_hat", "bound", "leakage"}, {}};
  std::vector<Series> series;
  for (int d = 1; d <= c.d; ++d) {
    StageTimer st(r, "d=" + fmt(d));
    const TorusGrid g(d, c.grid_sizes.front(), kLength);
    const auto prof = profile_for(c, g);
    r.note_profile("d" + fmt(d), prof);
    const DiracOperator op(prof, parse_coupling(c.coupling));
    std::vector<Vec> dirs{axis_vec(d, 1)};
    if (d == 2) dirs.push_back(axis_vec(2, std::sqrt(0.5), std::sqrt(0.5)));
    for (const Vec& w : dirs) {
      Series s{"d=" + fmt(d) + (w.size() > 1 && w[1] != 0 ? " diagonal" : " axis"), {}, {}};
      for (double xn : {0.25, 0.5, 1.0}) {
        const Vec xi = xn * w;
        const SpeedMeasurement m = measure_speed(op, xi, 4.0, 1e-8);
        const double bound = prof.Lambda + 4 * g.h() / xn;
        t.add({fmt(d), fmt(g.n), fmt(xi[0]), fmt(d > 1 ? xi[1] : 0.0), fmt(xn), fmt(m.kappa_hat), fmt(bound), fmt(m.leakage)});
        const std::string tag = s.label + " |xi|=" + fmt(xn);
        r.check("kappa_hat " + tag, m.kappa_hat, "<=", bound);
        r.check("leakage " + tag, m.leakage, "<", 1e-8);
        s.x.push_back(xn);
        s.y.push_back(m.kappa_hat);
      }
      series.push_back(s);
    }
  }
  r.tables = {t};
  r.plots.push_back({"kappa_hat", "measured propagation speed", "|xi|", "kappa_hat", true, false, series});
  return r;
}

// Consecutive-N growth ratios of the continuous-symbol oracle e^{it|k|} (1 + |k|)^{-alpha} chi(|k|), same band
// limit and estimator, at d = 2, p = 4, t = 1, coefficients 1, N = 32, 64, 128.
struct FrozenRatio {
  double alpha;
  int N;
  double ratio;
};
constexpr FrozenRatio kOracleRatios[] = {{0.0, 64, 1.2273}, {0.0, 128, 1.2062}, {0.3, 64, 1.0663}, {0.3, 128, 1.0384}};
constexpr double kGrowthFloor = 1.05;
constexpr double kNominalCut = 1.02;
constexpr double kCalibratedCut = 1.10;
constexpr double kOracleTolerance = 0.02;

ScenarioResult threshold(const ExperimentConfig& c) {
  ScenarioResult r;
  const bool frozen = c.d == 2 && c.profile == "constant" && c.p == std::vector<double>{4} && c.t.front() == 1 &&
                      c.grid_sizes == std::vector<int>{32, 64, 128} && (c.profile_params.empty() || c.profile_params.count("c"));
  Table t{"fixed_time", {"d", "p", "alpha", "t", "N", "estimate", "ratio", "seed", "profile_hash"}, {}};
  Table adj{"adjoint", {"alpha", "N", "band", "adjoint_defect"}, {}};
  std::vector<Series> series;
  for (double alpha : c.alpha) {
    StageTimer st(r, "alpha=" + fmt(alpha));
    FixedTimeSpec s;
    s.d = c.d;
    s.p = c.p.front();
    s.alpha = alpha;
    s.t = c.t.front();
    s.grid_sizes = c.grid_sizes;
    s.profile = parse_profile_kind(c.profile);
    s.params = c.profile_params;
    s.coupling = parse_coupling(c.coupling);
    s.seed = c.seed;
    s.iters = c.iters;
    s.restarts = c.restarts;
    s.J = c.frame_J;
    const auto rows = fixed_time_norm(s);
    Series ser{"alpha=" + fmt(alpha), {}, {}};
    std::vector<double> ratios;
    for (const auto& row : rows) {
      t.add({fmt(row.d), fmt(row.p), fmt(row.alpha), fmt(row.t), fmt(row.N), fmt(row.estimate), fmt(row.ratio),
             fmt(static_cast<unsigned long long>(row.seed)), hex(row.profile_hash)});
      adj.add({fmt(alpha), fmt(row.N), fmt(row.band), fmt(row.adjoint_defect)});
      r.check("adjoint defect alpha=" + fmt(alpha) + " N=" + fmt(row.N), row.adjoint_defect, "<", 1e-8);
      ser.x.push_back(row.N);
      ser.y.push_back(row.estimate);
      if (row.ratio == 0) continue;
      ratios.push_back(row.ratio);
      const std::string tag = "alpha=" + fmt(alpha) + " N=" + fmt(row.N);
      if (alpha == 0) r.check("growth ratio " + tag, row.ratio, ">=", kGrowthFloor);
      else r.check("growth ratio " + tag + " (calibrated cut)", row.ratio, "<=", kCalibratedCut);
      if (frozen)
        for (const auto& o : kOracleRatios)
          if (o.alpha == alpha && o.N == row.N)
            r.check("|ratio - oracle ratio| " + tag, std::abs(row.ratio - o.ratio), "<=", kOracleTolerance);
    }
    if (alpha > 0) {
      for (std::size_t i = 1; i < ratios.size(); ++i)
        r.check("ratio decrease alpha=" + fmt(alpha) + " step " + fmt(static_cast<int>(i)), ratios[i] - ratios[i - 1], "<", 0);
      r.notes.push_back("nominal cut " + fmt(kNominalCut) + " at alpha=" + fmt(alpha) + ": max ratio " + fmt(max_over(ratios)) +
                        (max_over(ratios) <= kNominalCut ? " (met)" : " (not met at these N; the oracle is above it too)"));
    }
    series.push_back(ser);
  }
  if (!frozen) r.notes.push_back("config differs from the calibrated setting; oracle comparison skipped");
  r.tables = {t, adj};
  r.plots.push_back({"growth", "fixed-time operator norm estimate", "N", "estimate", true, true, series});
  return r;
}

// Band of the coarsest grid, so that every grid samples the same family.
double family_band(const ExperimentConfig& c, int d) {
  const TorusGrid g0(d, c.grid_sizes.front(), kLength);
  return 0.5 / std::pow(2.0, -grid_frame(c, g0).octaves);
}

std::vector<Field> family_for(const ExperimentConfig& c, const TensorCalculus& T, double kmax, bool fourier) {
  std::vector<Field> fs;
  for (int i = 0; i < c.family; ++i) {
    const Field f = band_limited_field(T.grid(), kmax, c.seed + i);
    fs.push_back(fourier ? f : spectral_band_limit(T, f, kmax));
  }
  return fs;
}

ScenarioResult halfwave_bounded(const ExperimentConfig& c) {
  ScenarioResult r;
  const double kmax = family_band(c, c.d);
  Table t{"ratios", {"N", "p", "max_ratio", "mean_ratio", "band_leak", "max_imag", "phillips_tail", "backend"}, {}};
  std::map<double, std::vector<double>> by_p;
  for (int n : c.grid_sizes) {
    StageTimer st(r, "N=" + fmt(n));
    const TorusGrid g(c.d, n, kLength);
    const auto prof = profile_for(c, g);
    r.note_profile("N" + fmt(n), prof);
    const DiracOperator op(prof, parse_coupling(c.coupling));
    const HpfioContext ctx(op, grid_frame(c, g), hpfio_options(c));
    const auto fs = family_for(c, ctx.tensor(), kmax, op.fourier_diagonal());
    std::vector<Field> all = fs;
    for (const Field& f : fs) all.push_back(ctx.tensor().halfwave(f, c.t.front()));
    const auto data = ctx.prepare(all);
    for (std::size_t ip = 0; ip < c.p.size(); ++ip) {
      double mx = 0, mean = 0, leak = 0, imag = 0, tail = 0;
      for (int i = 0; i < c.family; ++i) {
        const auto a = ctx.norms(data[i], 0, {c.p[ip]})[0];
        const auto b = ctx.norms(data[i + c.family], 0, {c.p[ip]})[0];
        const double q = b.value / a.value;
        mx = std::max(mx, q);
        mean += q / c.family;
        leak = std::max({leak, a.band_leak, b.band_leak});
        imag = std::max({imag, a.max_imag, b.max_imag});
        tail = std::max({tail, a.phillips_tail, b.phillips_tail});
      }
      by_p[c.p[ip]].push_back(mx);
      t.add({fmt(n), fmt(c.p[ip]), fmt(mx), fmt(mean), fmt(leak), fmt(imag), fmt(tail), ctx.symbol_backend()});
    }
  }
  std::vector<Series> series;
  std::vector<double> ns(c.grid_sizes.begin(), c.grid_sizes.end());
  for (const auto& [p, v] : by_p) {
    r.check("max ratio variation across N at p=" + fmt(p), spread(v), "<", 0.25);
    series.push_back({"p=" + fmt(p), ns, v});
  }
  r.tables = {t};
  r.plots.push_back({"max_ratio", "max over family of ||e^{it sqrt L} f|| / ||f||", "N", "max ratio", false, false, series});
  return r;
}

ScenarioResult embedding(const ExperimentConfig& c) {
  ScenarioResult r;
  const double kmax = family_band(c, c.d);
  Table t{"embedding", {"N", "p", "q", "alpha", "lp_over_hpfio", "hpfio_over_lp", "sobolev_ratio", "family"}, {}};
  std::map<double, std::vector<EmbeddingRow>> rows;
  for (int n : c.grid_sizes) {
    StageTimer st(r, "N=" + fmt(n));
    const TorusGrid g(c.d, n, kLength);
    const auto prof = profile_for(c, g);
    r.note_profile("N" + fmt(n), prof);
    const DiracOperator op(prof, parse_coupling(c.coupling));
    const HpfioContext ctx(op, grid_frame(c, g), hpfio_options(c));
    const auto fs = family_for(c, ctx.tensor(), kmax, op.fourier_diagonal());
    for (double p : c.p) {
      // the Sobolev partner of p: q = 4 for p = 4/3 in d = 2, with alpha = d/2 (1/p - 1/q)
      const double q = p == 2 ? 2.0 : 1 / (1 / p - 1.0 / c.d);
      const auto row = embedding_sweep(ctx, p, q > 0 && std::isfinite(q) ? q : p, fs);
      rows[p].push_back(row);
      t.add({fmt(n), fmt(p), fmt(row.q), fmt(row.alpha), fmt(row.lp_over_hpfio), fmt(row.hpfio_over_lp),
             fmt(row.sobolev_ratio), fmt(row.family)});
    }
  }
  std::vector<Series> series;
  std::vector<double> ns(c.grid_sizes.begin(), c.grid_sizes.end());
  for (const auto& [p, rs] : rows) {
    std::vector<double> a, b, s;
    for (const auto& x : rs) {
      a.push_back(x.lp_over_hpfio);
      b.push_back(x.hpfio_over_lp);
      s.push_back(x.sobolev_ratio);
    }
    const std::string tag = " p=" + fmt(p);
    if (p == 2) {
      for (const auto* v : {&a, &b, &s}) {
        const std::string name = v == &a ? "lp_over_hpfio" : v == &b ? "hpfio_over_lp" : "sobolev_ratio";
        r.check(name + tag + " max", max_over(*v), "<=", 1.5);
        r.check(name + tag + " min", min_over(*v), ">=", 1 / 1.5);
      }
    } else {
      r.check("lp_over_hpfio variation" + tag, spread(a), "<", 0.25);
      r.check("hpfio_over_lp variation" + tag, spread(b), "<", 0.25);
      r.check("sobolev_ratio variation" + tag, spread(s), "<", 0.25);
    }
    series.push_back({"lp/hpfio" + tag, ns, a});
    series.push_back({"hpfio/lp" + tag, ns, b});
    series.push_back({"sobolev" + tag, ns, s});
  }
  r.tables = {t};
  r.plots.push_back({"constants", "embedding constants", "N", "constant", false, false, series});
  return r;
}

ScenarioResult flow_1d(const ExperimentConfig& c) {
  ScenarioResult r;
  const double s = c.t.front();
  Table t{"intertwining", {"N", "h", "discrepancy_exact_shift", "discrepancy_transport", "order"}, {}};
  std::vector<double> hs, es, et;
  double group = 0;
  for (int n : c.grid_sizes) {
    StageTimer st(r, "N=" + fmt(n));
    const TorusGrid g(1, n, kLength);
    const auto prof = profile_for(c, g);
    r.note_profile("N" + fmt(n), prof);
    const PrimitiveMap pm(prof.a[0]);
    const double P = pm.period();
    auto f = [P](double y) { return std::cos(2 * kPi * y / P) + 0.5 * std::sin(4 * kPi * y / P + 0.3); };
    const auto S = eigendecompose(assemble_block(prof.midpoints[0], prof.nodes[0], g.h(), BlockKind::L1));
    CVec v(n), rhs(n);
    for (int k = 0; k < n; ++k) {
      const double y = pm.phi(k * g.h());
      v[k] = f(y);
      rhs[k] = 0.5 * (f(y + s) + f(y - s));
    }
    const CVec lhs = apply_function_1d(S, [s](double l) { return cplx(std::cos(s * std::sqrt(l))); }, v);
    const CVec tr = 0.5 * (transport_1d(pm, g.h(), s, v) + transport_1d(pm, g.h(), -s, v));
    const double scale = rhs.cwiseAbs().maxCoeff();
    hs.push_back(g.h());
    es.push_back((lhs - rhs).cwiseAbs().maxCoeff() / scale);
    et.push_back((lhs - tr).cwiseAbs().maxCoeff() / scale);
    const double order = es.size() > 1 ? std::log2(es[es.size() - 2] / es.back()) : 0.0;
    t.add({fmt(n), fmt(g.h()), fmt(es.back()), fmt(et.back()), fmt(order)});
    for (double a : {0.3, -0.7, 1.1})
      for (double b : {0.5, -1.3})
        for (int k = 0; k < n; k += std::max(1, n / 64)) {
          const double x = k * g.h();
          group = std::max(group, std::abs(flow_chi(pm, a, flow_chi(pm, b, x)) - flow_chi(pm, a + b, x)));
        }
  }
  r.check("flow group-law defect", group, "<", 1e-8);
  for (std::size_t i = 1; i < es.size(); ++i)
    r.check("intertwining order N=" + fmt(c.grid_sizes[i]), std::log2(es[i - 1] / es[i]), ">=", 1.8);
  r.notes.push_back("fitted order " + fmt(fitted_order(hs, es)));
  r.tables = {t};
  r.plots.push_back({"intertwining", "cos(s sqrt B)(f o phi) vs shift-then-compose", "h", "relative max discrepancy", true,
                     true, {{"exact shift", hs, es}, {"cubic transport", hs, et}}});
  return r;
}

ScenarioResult square_function(const ExperimentConfig& c) {
  ScenarioResult r;
  const double kmax = family_band(c, c.d);
  Table t{"ratios", {"profile", "N", "min_ratio", "max_ratio", "C", "scales", "dropped", "clamped"}, {}};
  std::vector<std::string> kinds{"constant"};
  if (c.profile != "constant") kinds.push_back(c.profile);
  std::vector<Series> series;
  std::vector<double> ns(c.grid_sizes.begin(), c.grid_sizes.end());
  for (const auto& kind : kinds) {
    std::vector<double> Cs, lo, hi;
    for (int n : c.grid_sizes) {
      StageTimer st(r, kind + " N=" + fmt(n));
      const TorusGrid g(c.d, n, kLength);
      const auto prof = profile_for(c, g, kind);
      r.note_profile(kind + " N" + fmt(n), prof);
      const DiracOperator op(prof, parse_coupling(c.coupling));
      const TensorCalculus T(op);
      const WavePacketFrame frame(grid_frame(c, g));
      const auto fs = family_for(c, T, kmax, op.fourier_diagonal());
      double mn = 1e300, mx = 0;
      TentInfo info;
      for (const Field& f : fs) {
        TentField F{g, frame.ladder().sigma, frame.ladder().weight, {}};
        for (double sig : F.sigma) F.values.push_back(T.radial([sig](double x) { return Psi(sig * x); }, f));
        info = {};
        const double v = tent_norm(F, 2, TentQ::Two, &info);
        const double q = v * v / (l2_norm(f) * l2_norm(f));
        mn = std::min(mn, q);
        mx = std::max(mx, q);
      }
      const double C = std::max(mx, 1 / mn);
      Cs.push_back(C);
      lo.push_back(mn);
      hi.push_back(mx);
      t.add({kind, fmt(n), fmt(mn), fmt(mx), fmt(C), fmt(static_cast<int>(frame.ladder().sigma.size())), fmt(info.dropped),
             fmt(info.clamped)});
      if (kind == "constant") {
        r.check("constant N=" + fmt(n) + " min ratio", mn, ">=", 0.98);
        r.check("constant N=" + fmt(n) + " max ratio", mx, "<=", 1.02);
      }
    }
    if (kind != "constant")
      for (std::size_t i = 1; i < Cs.size(); ++i)
        r.check(kind + " |C(N=" + fmt(c.grid_sizes[i]) + ")/C(N=" + fmt(c.grid_sizes[i - 1]) + ") - 1|",
                std::abs(Cs[i] / Cs[i - 1] - 1), "<", 0.1);
    series.push_back({kind + " min", ns, lo});
    series.push_back({kind + " max", ns, hi});
  }
  r.tables = {t};
  r.plots.push_back({"ratios", "tent norm^2 / ||f||^2", "N", "ratio", false, false, series});
  return r;
}

std::vector<std::pair<LinearPipeline, std::string>> shipped_pipelines(const TensorCalculus& T, const std::string& tag) {
  const double band = 2.0 / grid_sigma_min(T.grid(), 8);
  std::vector<std::pair<LinearPipeline, std::string>> out;
  auto single = [&](const std::string& id, Stage s) {
    LinearPipeline p(id + "/" + tag, T.grid());
    p.then(std::move(s));
    out.emplace_back(std::move(p), id);
  };
  single("halfwave", halfwave_stage(T, 1.0));
  single("bessel", bessel_stage(T, 0.25));
  single("heat", heat_stage(T, 0.1));
  single("band", band_stage(T, band));
  LinearPipeline ft("fixed_time/" + tag, T.grid());
  ft.then(band_stage(T, band)).then(halfwave_stage(T, 1.0)).then(bessel_stage(T, 0.3));
  out.emplace_back(std::move(ft), "fixed_time");
  return out;
}

ScenarioResult opnorm(const ExperimentConfig& c) {
  ScenarioResult r;
  Table bt{"brute_force", {"instance", "p", "estimate", "brute_force", "rel_error"}, {}};
  double worst = 0;
  {
    StageTimer st(r, "6x6 instances");
    for (double p : c.p)
      for (int s = 0; s < c.family; ++s) {
        std::mt19937_64 rng(c.seed * 1000 + s);
        std::normal_distribution<double> nd;
        RMat A(6, 6);
        for (int i = 0; i < 36; ++i) A(i / 6, i % 6) = nd(rng);
        PnormOptions o;
        o.seed = c.seed + s;
        o.real_seeds = true;
        o.iters = 100;
        o.restarts = 10;
        const auto e = pnorm_estimate(matrix_pipeline(A), p, o);
        const double b = brute_force_pnorm(A, p, 20000, c.seed + s);
        const double err = std::abs(e.value / b - 1);
        worst = std::max(worst, err);
        bt.add({fmt(s), fmt(p), fmt(e.value), fmt(b), fmt(err)});
      }
  }
  r.check("worst relative error vs brute force", worst, "<=", 1e-2);

  Table at{"adjoint", {"pipeline", "stages", "adjoint_defect"}, {}};
  Table nt{"opnorm", {"pipeline", "p", "value", "iters", "restarts", "witness_hash"}, {}};
  double worst_adj = 0;
  {
    StageTimer st(r, "pipelines");
    for (int d = 1; d <= 2; ++d)
      for (const std::string kind : {"constant", "sawtooth"}) {
        const TorusGrid g(d, d == 1 ? 64 : c.grid_sizes.front(), kLength);
        const auto prof = profile_for(c, g, kind);
        r.note_profile(kind + " d" + fmt(d), prof);
        const DiracOperator op(prof, parse_coupling(c.coupling));
        const TensorCalculus T(op);
        for (const auto& [pipe, id] : shipped_pipelines(T, kind + "-d" + fmt(d))) {
          const double defect = adjoint_selfcheck(pipe, c.seed);
          worst_adj = std::max(worst_adj, defect);
          at.add({pipe.id(), pipe.describe(), fmt(defect)});
          if (id != "fixed_time") continue;
          for (double p : c.p) {
            PnormOptions o;
            o.seed = c.seed;
            o.iters = c.iters;
            o.restarts = c.restarts;
            const auto e = pnorm_estimate(pipe, p, o);
            nt.add({pipe.id(), fmt(p), fmt(e.value), fmt(e.iterations), fmt(e.restarts), hex(e.witness_hash)});
          }
        }
        if (d == 2 && kind == "sawtooth") {
          // negative control: the forward map posing as its own adjoint must be caught
          Stage wrong = halfwave_stage(T, 1.0);
          wrong.adjoint = wrong.forward;
          LinearPipeline bad("negative-control/" + kind + "-d2", g);
          bad.then(wrong);
          const double defect = adjoint_selfcheck(bad, c.seed);
          at.add({bad.id(), bad.describe(), fmt(defect)});
          r.check("negative control adjoint defect", defect, ">", 1e-8);
        }
      }
  }
  r.check("worst shipped pipeline adjoint defect", worst_adj, "<", 1e-8);
  r.tables = {bt, at, nt};
  std::vector<double> idx, errs;
  for (std::size_t i = 0; i < bt.rows.size(); ++i) {
    idx.push_back(static_cast<double>(i));
    errs.push_back(std::max(std::stod(bt.rows[i][4]), 1e-16));
  }
  r.plots.push_back({"brute_force", "estimator vs brute force", "instance", "relative error", false, true, {{"rel error", idx, errs}}});
  return r;
}

ScenarioResult heat_kernel(const ExperimentConfig& c) {
  ScenarioResult r;
  const TorusGrid g(1, c.grid_sizes.front(), kLength);
  const auto prof = profile_for(c, g);
  r.note_profile("main", prof);
  const auto S = eigendecompose(assemble_block(prof.midpoints[0], prof.nodes[0], g.h(), BlockKind::L1));
  const int n = g.n;
  Table fit{"fit", {"t", "y", "points", "slope", "intercept", "r2"}, {}};
  Table prof_t{"profile", {"t", "y", "x", "kernel"}, {}};
  std::vector<Series> series;
  for (double t : c.t) {
    StageTimer st(r, "t=" + fmt(t));
    const RVec e = (-t * S.eigenvalues.array()).exp().matrix();
    const RMat K = S.vectors * e.asDiagonal() * S.analysis;  // columns exp(-tB) e_y
    r.check("min kernel entry t=" + fmt(t), K.minCoeff() / g.h(), ">=", -1e-12);
    for (int y : {n / 2, n / 4 + 3}) {
      const RVec col = K.col(y) / g.h();
      const double peak = col.maxCoeff();
      double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
      int m = 0;
      Series s{"t=" + fmt(t) + " y=" + fmt(y * g.h()), {}, {}};
      for (int k = 0; k < n; ++k) {
        double dx = (k - y) * g.h();
        dx -= kLength * std::round(dx / kLength);
        if (!(col[k] > 1e-8 * peak)) continue;
        const double X = dx * dx / t, Y = std::log(col[k]);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
        syy += Y * Y;
        ++m;
        s.x.push_back(X);
        s.y.push_back(Y);
        prof_t.add({fmt(t), fmt(y * g.h()), fmt(k * g.h()), fmt(col[k])});
      }
      const double cov = m * sxy - sx * sy, vx = m * sxx - sx * sx, vy = m * syy - sy * sy;
      const double slope = cov / vx, icpt = (sy - slope * sx) / m;
      const double r2 = cov * cov / (vx * vy);
      fit.add({fmt(t), fmt(y * g.h()), fmt(m), fmt(slope), fmt(icpt), fmt(r2)});
      const std::string tag = "t=" + fmt(t) + " y=" + fmt(y * g.h());
      // the check uses the source at the box centre; the second source is reported
      if (y == n / 2) r.check("log-kernel linear fit R^2 " + tag, r2, ">=", 0.98);
      else r.notes.push_back("off-centre source R^2 " + tag + " = " + fmt(r2));
      series.push_back(s);
    }
  }
  r.tables = {fit, prof_t};
  r.plots.push_back({"log_kernel", "heat kernel log-profile", "|x-y|^2 / t", "log K", false, false, series});
  return r;
}

ScenarioResult multiplier(const ExperimentConfig& c) {
  ScenarioResult r;
  FrameParams fp = frame_params(c, 2);
  const auto frame = std::make_shared<const WavePacketFrame>(fp);
  Table t{"bounds", {"omega", "alpha", "sup_m", "sup_m_doubled", "sup_q", "sup_q_doubled", "rel_change"}, {}};
  MarcinkiewiczOptions o, o2;
  o2.per_octave *= 2;
  o2.angles *= 2;
  o2.delta /= 2;
  double sup0 = 0, change = 0;
  std::map<std::string, std::vector<double>> curves;
  std::vector<double> oms;
  StageTimer st(r, "marcinkiewicz");
  for (int k = 0; k < c.directions; ++k) {
    const double om = 2 * kPi * k / c.directions;
    oms.push_back(om);
    const MultiplierSymbol m(frame, om);
    const auto a = marcinkiewicz_check(m, o), b = marcinkiewicz_check(m, o2);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double ch = std::max(std::abs(b[i].sup_m / a[i].sup_m - 1), std::abs(b[i].sup_q / a[i].sup_q - 1));
      change = std::max(change, ch);
      if (!std::isfinite(a[i].sup_m) || !std::isfinite(a[i].sup_q)) change = std::numeric_limits<double>::infinity();
      if (a[i].alpha == "0") sup0 = std::max({sup0, a[i].sup_m, b[i].sup_m});
      curves[a[i].alpha].push_back(a[i].sup_m);
      t.add({fmt(om), a[i].alpha, fmt(a[i].sup_m), fmt(b[i].sup_m), fmt(a[i].sup_q), fmt(b[i].sup_q), fmt(ch)});
    }
  }
  r.check("max relative change under doubling", change, "<", 0.1);
  r.check("sup |m_omega|", sup0, "<=", 2.05);
  r.tables = {t};
  std::vector<Series> series;
  for (const auto& [a, v] : curves) series.push_back({"alpha=" + a, oms, v});
  r.plots.push_back({"sups", "sup |zeta^a d^a m_omega|", "omega", "sup", false, true, series});
  return r;
}

ScenarioResult multiplication(const ExperimentConfig& c) {
  ScenarioResult r;
  const double p = c.p.front();
  Table t{"constants", {"N", "p", "C", "max_ratio", "worst_pair"}, {}};
  Table pairs{"pairs", {"N", "pair", "ratio", "besov", "sup_g", "normalized"}, {}};
  std::vector<double> Cs;
  for (int n : c.grid_sizes) {
    StageTimer st(r, "N=" + fmt(n));
    const TorusGrid g(c.d, n, kLength);
    const auto prof = profile_for(c, g);
    r.note_profile("N" + fmt(n), prof);
    const DiracOperator op(prof, parse_coupling(c.coupling));
    const HpfioContext ctx(op, grid_frame(c, g), hpfio_options(c));
    const double sp = s_p(c.d, p);
    std::vector<Field> fs, gfs;
    std::vector<CVec> gs;
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < c.family; ++i) {
      const Field f = band_limited_field(g, 2.0, c.seed + 100 + i);
      const Field u = band_limited_field(g, 1.5, c.seed + 200 + i);
      const CVec re = u.comp1.real().cast<cplx>();
      const double offset = 2 * U(rng) - 1, amp = 0.2 + 1.8 * U(rng);
      gs.push_back(CVec::Constant(g.cells(), offset) + amp / re.cwiseAbs().maxCoeff() * re);
      Field gf = f;
      gf.comp1 = gs.back().cwiseProduct(f.comp1);
      gf.comp2 = gs.back().cwiseProduct(f.comp2);
      fs.push_back(f);
      gfs.push_back(gf);
    }
    const auto df = ctx.prepare(fs), dg = ctx.prepare(gfs);
    double C = 0, mx = 0;
    int worst = 0;
    for (int i = 0; i < c.family; ++i) {
      const double q = ctx.norm(dg[i], {p, 0.0}).value / ctx.norm(df[i], {p, 0.0}).value;
      const double b = besov_norm(ctx.tensor(), gs[i], sp).value;
      const double sup = gs[i].cwiseAbs().maxCoeff();
      const double v = q / (b + sup);
      if (v > C) worst = i;
      C = std::max(C, v);
      mx = std::max(mx, q);
      pairs.add({fmt(n), fmt(i), fmt(q), fmt(b), fmt(sup), fmt(v)});
    }
    Cs.push_back(C);
    t.add({fmt(n), fmt(p), fmt(C), fmt(mx), fmt(worst)});
  }
  for (std::size_t i = 1; i < Cs.size(); ++i)
    r.check("|C(N=" + fmt(c.grid_sizes[i]) + ")/C(N=" + fmt(c.grid_sizes[i - 1]) + ") - 1|", std::abs(Cs[i] / Cs[i - 1] - 1),
            "<", 0.25);
  r.tables = {t, pairs};
  r.plots.push_back({"constant", "multiplication constant", "N", "C", false, false,
                     {{"C", std::vector<double>(c.grid_sizes.begin(), c.grid_sizes.end()), Cs}}});
  return r;
}

ScenarioResult group_law(const ExperimentConfig& c) {
  ScenarioResult r;
  Table t{"group_law", {"case", "d", "n", "defect", "max_im_lambda", "commutativity"}, {}};
  struct Case {
    std::string name;
    int d;
    std::string kind;
  };
  const std::vector<Case> cases{{"constant-d2", 2, "constant"}, {"variable-d1", 1, c.profile}, {"variable-d2", 2, c.profile}};
  for (const auto& k : cases) {
    StageTimer st(r, k.name);
    const TorusGrid g(k.d, k.d == 1 ? 4 * c.grid_sizes.front() : c.grid_sizes.front(), kLength);
    const auto prof = profile_for(c, g, k.kind);
    r.note_profile(k.name, prof);
    const DiracOperator op(prof, parse_coupling(c.coupling));
    std::vector<Field> fam;
    for (int i = 0; i < c.family; ++i) fam.push_back(band_limited_field(g, 3.0, c.seed + i));
    const auto rep = group_law_probe(op, axis_vec(k.d, 0.6, -0.4), axis_vec(k.d, 0.3, 0.5), fam, true);
    t.add({k.name, fmt(k.d), fmt(g.n), fmt(rep.defect), fmt(rep.max_im_lambda), fmt(rep.commutativity)});
    r.log.push_back("group law " + k.name + ": defect=" + fmt(rep.defect) + " max_im_lambda=" + fmt(rep.max_im_lambda) +
                    " commutativity_indicator=" + fmt(rep.commutativity));
    if (k.kind == "constant" || k.d == 1) r.check("defect " + k.name, rep.defect, "<", 1e-8);
    else r.notes.push_back(k.name + " defect " + fmt(rep.defect) + ", max |Im lambda| " + fmt(rep.max_im_lambda) +
                           ", commutativity indicator " + fmt(rep.commutativity) + " (reported)");
  }
  r.tables = {t};
  return r;
}

ScenarioResult perturbation(const ExperimentConfig& c) {
  ScenarioResult r;
  Table t{"perturbation", {"N", "drift", "p", "max_ratio", "zero_drift_defect", "shift", "min_real", "diagnostic"}, {}};
  for (int n : c.grid_sizes) {
    StageTimer st(r, "N=" + fmt(n));
    const TorusGrid g(c.d, n, kLength);
    if (2 * std::pow(double(n), c.d) > kPerturbedDenseMax)
      throw Error("perturbation: dense route refused at n = " + fmt(n) + " (2 n^d = " + fmt(2 * std::pow(double(n), c.d)) +
                  " > " + fmt(static_cast<int>(kPerturbedDenseMax)) + ")");
    const auto prof = profile_for(c, g);
    r.note_profile("N" + fmt(n), prof);
    const DiracOperator op(prof, parse_coupling(c.coupling));
    const TensorCalculus T(op);
    std::vector<RVec> zero(c.d, RVec::Zero(g.cells())), drift = zero;
    for (int j = 0; j < c.d; ++j)
      for (std::size_t i = 0; i < g.cells(); ++i) drift[j][i] = c.drift * std::sin(g.coord(i, j) * g.h() + j);
    const double t1 = c.t.front();
    for (double p : c.p) {
      double mx = 0, zd = 0, shift = 0, minre = 1e300;
      std::string diag;
      for (int i = 0; i < c.family; ++i) {
        const Field f = band_limited_field(g, 3.0, c.seed + i);
        const auto z = perturbed_halfwave(op, zero, t1, f);
        const Field ref = T.halfwave(f, t1);
        zd = std::max(zd, l2_norm(z.value - ref) / l2_norm(ref));
        const auto w = perturbed_halfwave(op, drift, t1, f);
        mx = std::max(mx, lp_norm(w.value, p) / lp_norm(f, p));
        shift = std::max(shift, w.shift);
        minre = std::min(minre, w.min_real);
        if (!w.diagnostic.empty()) diag = w.diagnostic;
      }
      t.add({fmt(n), fmt(c.drift), fmt(p), fmt(mx), fmt(zd), fmt(shift), fmt(minre), diag});
      r.check("zero-drift route vs half-wave N=" + fmt(n), zd, "<", 1e-8);
      r.check("perturbed L^p ratio finite N=" + fmt(n) + " p=" + fmt(p), mx, "<", 1e6);
    }
  }
  r.tables = {t};
  return r;
}

}  // namespace

ScenarioResult run_scenario(const ExperimentConfig& c) {
  for (const auto& d : validate_config(c))
    if (d.error) throw Error("invalid config: " + d.message);
  set_thread_cap(c.threads);
  ScenarioResult r;
  const std::string& id = c.scenario;
  if (id == "oracle-agreement") r = oracle_agreement(c);
  else if (id == "frame-identities") r = frame_identities(c);
  else if (id == "speed") r = speed(c);
  else if (id == "threshold") r = threshold(c);
  else if (id == "halfwave-bounded") r = halfwave_bounded(c);
  else if (id == "embedding") r = embedding(c);
  else if (id == "flow-1d") r = flow_1d(c);
  else if (id == "square-function") r = square_function(c);
  else if (id == "opnorm") r = opnorm(c);
  else if (id == "heat-kernel") r = heat_kernel(c);
  else if (id == "multiplier") r = multiplier(c);
  else if (id == "multiplication") r = multiplication(c);
  else if (id == "group-law") r = group_law(c);
  else if (id == "perturbation") r = perturbation(c);
  else throw Error("unknown scenario: " + id);
  r.id = id;
  return r;
}

void write_artifacts(const ScenarioResult& r, const ExperimentConfig& c, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string chash = hex(c.hash());
  const std::vector<std::string> comments{"scenario=" + r.id, "config_hash=" + chash, "version=" + std::string(kVersion),
                                          "seed=" + fmt(static_cast<unsigned long long>(c.seed))};
  for (const auto& t : r.tables) csv_write((fs::path(dir) / (t.name + ".csv")).string(), t, comments);
  for (const auto& p : r.plots) svg_write((fs::path(dir) / (p.name + ".svg")).string(), p);
  std::ofstream os(fs::path(dir) / "provenance.txt", std::ios::binary);
  if (!os) throw Error("cannot write provenance in " + dir);
  os << "scenario " << r.id << "\nversion " << kVersion << "\nconfig_hash " << chash << "\n[config]\n" << c.canonical();
  os << "[log]\n";
  for (const auto& l : r.log) os << l << "\n";
  os << "[checks]\n";
  for (const auto& k : r.checks) os << k.text() << "\n";
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  os << "result " << (r.pass() ? "PASS" : "FAIL") << "\n[stages]\n";
  double total = 0;
  for (const auto& s : r.stages) {
    os << s.name << " " << fmt(s.seconds) << " s\n";
    total += s.seconds;
  }
  os << "total " << fmt(total) << " s\n";
}

}  // namespace rfio
