#pragma once

#include "relax.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

// Linear SDP solver for problems of the form
//
//   min  c'y   s.t.   B0^k + sum_i y_i B_i^k  >= 0   for every block k,
//
// by a primal-dual interior-point method with Nesterov-Todd scaling and a
// Mehrotra predictor-corrector, dense per-block linear algebra.  The same
// module reads and writes the sparse SDPA exchange format so results can be
// audited against independent solvers.

namespace framecert::sdp {

struct SolveOptions {
  double tol = 1e-8;            // relative duality gap and residual target
  double loosened_tol = 1e-6;   // fallback accepted on stalling instances
  int max_iterations = 200;
  bool verbose = false;         // iteration log to stderr
  int threads = 0;              // 0: hardware concurrency
  double step_fraction = 0.95;  // fraction of the step to the boundary
};

enum class SolveStatus {
  optimal,
  optimal_loosened,  // converged to loosened_tol only; warning case
  max_iterations,
  infeasible,
  numerical_failure,
};

std::string to_string(SolveStatus s);

struct IterationRecord {
  int iteration = 0;
  double primal_objective = 0.0;  // c'y (+ constant)
  double dual_objective = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double mu = 0.0;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd y;
  double objective = 0.0;         // includes the problem's constant term
  double objective_linear = 0.0;  // c'y only
  std::vector<Eigen::MatrixXd> slack;  // X_k = B0 + sum y_i B_i at the solution
  std::vector<Eigen::MatrixXd> dual;   // Y_k
  double duality_gap = 0.0;       // relative
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool tolerance_loosened = false;
  std::string message;
  std::vector<IterationRecord> log;
};

SdpSolution solve(const relax::SdpProblem& problem, const SolveOptions& options = {});

// Solver-agnostic residual report: recomputed from the problem data only.
struct VerifyBlock {
  std::string label;
  double min_eigenvalue = 0.0;
  double block_scale = 1.0;    // 1 + max |entry|
  double complementarity = 0.0;  // <X_k, Y_k> when duals are present
};

struct VerifyReport {
  double objective = 0.0;
  double worst_violation = 0.0;  // max(0, -min_k lambda_min / scale)
  std::vector<VerifyBlock> blocks;
  bool passes(double tol) const { return worst_violation <= tol; }
};

VerifyReport verify(const relax::SdpProblem& problem, const SdpSolution& solution);
VerifyReport verify(const relax::SdpProblem& problem, const Eigen::VectorXd& y);

// Sparse SDPA exchange files (".dat-s").  The constant term of the objective
// is not part of the format and is dropped on export.
void export_sdpa(const relax::SdpProblem& problem, const std::string& path);
std::string sdpa_text(const relax::SdpProblem& problem);
relax::SdpProblem import_sdpa(const std::string& path);
relax::SdpProblem import_sdpa_text(const std::string& text);

}  // namespace framecert::sdp
