#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rfio/core.hpp"

namespace rfio {

struct Stage {
  std::string name;
  std::function<Field(const Field&)> forward;
  // Adjoint in the pairing inner(a, b) = h^d sum a conj(b).
  std::function<Field(const Field&)> adjoint;
};

class LinearPipeline {
 public:
  LinearPipeline(std::string id, TorusGrid grid) : id_(std::move(id)), grid_(grid) {}

  LinearPipeline& then(Stage s);
  const std::string& id() const { return id_; }
  const TorusGrid& grid() const { return grid_; }
  const std::vector<Stage>& stages() const { return stages_; }
  std::string describe() const;

  Field apply(const Field& f) const;
  Field apply_adjoint(const Field& f) const;

 private:
  std::string id_;
  TorusGrid grid_;
  std::vector<Stage> stages_;
};

// Max relative pairing defect |<Af, g> - <f, A*g>| / (||Af|| ||g||) over random complex pairs.
double adjoint_selfcheck(const LinearPipeline& A, std::uint64_t seed, int pairs = 10);
double stage_selfcheck(const TorusGrid& g, const Stage& s, std::uint64_t seed, int pairs = 10);

struct PnormOptions {
  int iters = 60;
  int restarts = 10;
  std::uint64_t seed = 1;
  bool real_seeds = false;         // keep iterates real (for real operators and real-sphere oracles)
  std::vector<Field> structured;   // extra starting fields tried before the random restarts
  double adjoint_tol = 1e-8;
  double rel_tol = 1e-12;          // stop when the quotient improves by less than this
};

struct OperatorNormEstimate {
  double value = 0;  // certified lower bound: lp_norm(A witness) / lp_norm(witness)
  double p = 2;
  Field witness;
  std::vector<double> trace;  // best restart, nondecreasing
  int restarts = 0;
  int iterations = 0;
  int best_start = -1;        // index into structured seeds, then random restarts
  double adjoint_defect = 0;
  std::uint64_t witness_hash = 0;
};

// Boyd's dual power iteration with the p-power duality map.
OperatorNormEstimate pnorm_estimate(const LinearPipeline& A, double p, const PnormOptions& opt);

// Recomputes the quotient achieved by the stored witness.
double witness_quotient(const LinearPipeline& A, const OperatorNormEstimate& e);

std::uint64_t field_hash(const Field& f);

// Real-sphere brute force for small dense matrices: sampled starts plus projected gradient ascent.
double brute_force_pnorm(const RMat& A, double p, int samples, std::uint64_t seed);

// Pipeline acting by a real matrix on the leading entries of comp1 of a small 1D grid; everything else maps to zero.
LinearPipeline matrix_pipeline(const RMat& A);

Field random_field(const TorusGrid& g, std::uint64_t seed, bool real = false);

}  // namespace rfio
