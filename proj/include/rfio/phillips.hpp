#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rfio/core.hpp"
#include "rfio/dirac.hpp"
#include "rfio/wavepackets.hpp"

namespace rfio {

// Filtered line projections of a polar symbol chi. With A_theta = theta . D,
//   chi(D) ~ (1/M) sum_{j < M/2} G_j(A_{theta_j}),   theta_j = 2 pi j / M,
// where G_j is the ramp-filtered Radon projection of chi along theta_j; in d = 1, chi(D) = G(A_{+1}) with G = chi.
// The ramp filter is the band-limited |r| multiplier at the sampling rate of the projection, so the radial
// integral of the polar inversion formula is done in closed form per line.
class LineTable {
 public:
  LineTable(int d, const PolarSymbol& chi, int radial_nodes);

  int d() const { return d_; }
  double rho_max() const { return rho_max_; }
  int radial_nodes() const { return nodes_; }
  int angular_modes() const { return static_cast<int>(q_.size()); }
  // Relative |r|-weighted spectral mass beyond the resolved band, extrapolated from its top two quarter bands.
  double tail_estimate() const { return tail_; }
  const std::string& name() const { return name_; }

  // Samples of G for the line at angle theta and the symbol rotated by omega (gamma = theta - omega).
  struct Line {
    double lambda0 = 0, dl = 1;
    RVec values;
    double moments[5] = {0, 0, 0, 0, 0};  // asymptotic tail beyond the table (d = 2)
    bool has_tail = false;
    cplx operator()(cplx lambda) const;
  };
  Line line(double gamma) const;
  // Lines for gamma_k = 2 pi k / M, k = 0..M-1, by one FFT over the folded angular modes.
  std::vector<Line> uniform_lines(int M) const;

 private:
  int d_;
  double rho_max_;
  int nodes_;
  std::string name_;
  double tail_ = 0;
  double lambda0_ = 0, dl_ = 1;
  std::vector<CVec> q_;                    // d = 2: filtered projections per angular mode m >= 0
  std::vector<std::array<cplx, 5>> mom_;   // moments of the unfiltered projections per mode
  std::vector<RVec> d1_;                   // d = 1: samples for gamma = 0 and gamma = pi
};

std::shared_ptr<const LineTable> make_line_table(int d, const PolarSymbol& chi, int radial_nodes);

enum class PhillipsBackend { Auto, FourierBlock, Dense, Krylov };
std::string to_string(PhillipsBackend b);
PhillipsBackend parse_phillips_backend(const std::string& s);

struct PhillipsOptions {
  int directions = 96;     // M: directions on the full circle (M/2 lines)
  int radial_nodes = 128;  // samples per line projection
  PhillipsBackend backend = PhillipsBackend::Auto;
  double krylov_tol = 1e-8;
  int krylov_max = 400;
  double tail_tol = 1e-6;
  int dense_sector_max = 1024;  // Auto picks the dense backend when every Bloch sector is at most this size
  int dense_cache_mb = 256;     // line decompositions are cached only when all of them fit
};

struct SymbolRef {
  std::shared_ptr<const LineTable> table;
  double omega = 0;  // rotation angle (d = 2) or 0 / pi for +1 / -1 (d = 1)
  double scale = 1;
};

struct PhillipsReport {
  std::string backend;
  int lines = 0;
  int max_krylov_dim = 0;
  double max_tail = 0;
  double max_imag = 0;  // max |Im| over the eigen or Ritz values used
};

class PhillipsCalculus {
 public:
  PhillipsCalculus(const DiracOperator& op, PhillipsOptions opt);

  const DiracOperator& op() const { return *op_; }
  const PhillipsOptions& options() const { return opt_; }
  PhillipsBackend backend() const { return backend_; }

  std::vector<Field> apply(const std::vector<SymbolRef>& symbols, const Field& f, PhillipsReport* rep = nullptr) const;
  // out[i][s] = symbols[s](D) fields[i]; the dense backend decomposes each line once for the whole batch.
  std::vector<std::vector<Field>> apply_batch(const std::vector<SymbolRef>& symbols, const std::vector<Field>& fields,
                                              PhillipsReport* rep = nullptr) const;
  Field apply(const SymbolRef& symbol, const Field& f, PhillipsReport* rep = nullptr) const;
  // Drops cached line samples (they keep their tables alive).
  void clear_cache() const;

 private:
  const DiracOperator* op_;
  PhillipsOptions opt_;
  PhillipsBackend backend_;
  std::vector<double> thetas_;
  double weight_;

  struct ModeData {
    std::vector<Eigen::Vector3d> zeta;
    std::vector<CMat> pplus, pminus;
  };
  struct DenseSector {
    CVec values;
    CMat vectors;
    CMat inverse;
  };
  using DenseLine = std::vector<DenseSector>;
  mutable std::mutex mu_;
  mutable std::shared_ptr<ModeData> modes_;
  mutable std::map<int, std::shared_ptr<const DenseLine>> dense_;
  mutable std::shared_ptr<const BlochReduction> bloch_;
  struct CachedLine {
    std::shared_ptr<const LineTable> owner;
    std::shared_ptr<const LineTable::Line> line;
  };
  mutable std::map<std::pair<const LineTable*, long>, CachedLine> lines_;
  struct CachedLattice {
    std::shared_ptr<const LineTable> owner;
    std::vector<std::shared_ptr<const LineTable::Line>> lines;
  };
  mutable std::map<const LineTable*, CachedLattice> lattice_;

  std::shared_ptr<const LineTable::Line> line_for(const SymbolRef& s, double theta) const;
  std::shared_ptr<const ModeData> mode_data() const;
  std::shared_ptr<const BlochReduction> bloch() const;
  std::shared_ptr<const DenseLine> dense_line(int j) const;
  Vec direction(double theta) const;

  void apply_fourier(const std::vector<SymbolRef>& s, const Field& f, std::vector<Field>& out, PhillipsReport& rep) const;
  void apply_dense(const std::vector<SymbolRef>& s, const std::vector<Field>& f, std::vector<std::vector<Field>>& out,
                   PhillipsReport& rep) const;
  void apply_krylov(const std::vector<SymbolRef>& s, const Field& f, std::vector<Field>& out, PhillipsReport& rep) const;
};

}  // namespace rfio
