#pragma once

#include "analysis.hpp"
#include "bounds.hpp"
#include "fem.hpp"
#include "relax.hpp"
#include "sdp.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

// Hierarchy driver and certification: lower bounds from the relaxations,
// feasible upper bounds from the first-order moments, epsilon-optimality
// gaps, flatness diagnostics and rank-one minimizer extraction.

namespace framecert::certify {

struct FlatnessResult {
  int rank = 0;      // rank M_r(y)
  int rank_sub = 0;  // rank M_{r-1}(y)
  bool flat = false;
};

// Numerical ranks via singular values at threshold rank_tol * sigma_max.
FlatnessResult flatness_check(const relax::MomentIndexMap& map,
                              const Eigen::VectorXd& y, int order,
                              double rank_tol = 1e-4);

// atilde_g = (y1_g + 1)/2 * ubar_g, clamped to [0, ubar] against solver noise.
Eigen::VectorXd recover_ratios(const Eigen::VectorXd& first_order_moments,
                               const bounds::ScaledModel& scaled);

struct Extraction {
  enum class Status { not_attempted, extracted, unavailable };
  Status status = Status::not_attempted;
  Eigen::VectorXd design;       // group areas
  double weight = 0.0;
  double moment_residual = 0.0; // max |y_ij - y_i y_j|
  std::string note;
};

Extraction extract_minimizer(const relax::MomentIndexMap& map,
                             const Eigen::VectorXd& y,
                             const FlatnessResult& flatness,
                             const bounds::ScaledModel& scaled,
                             const fem::FrameModel& model);

struct Certificate {
  int order = 0;
  double lower_bound = 0.0;
  Eigen::VectorXd first_order_moments;
  Eigen::VectorXd ratios;       // recovered atilde
  double delta_star = 0.0;
  double upper_bound = 0.0;
  Eigen::VectorXd design;       // delta* atilde, the feasible upper-bound design
  Eigen::VectorXd compliances;  // at the upper-bound design
  double gap = 0.0;             // UB - LB
  double gap_identity_residual = 0.0;
  FlatnessResult flatness;
  Extraction extraction;
  // Relaxation accounting.
  std::vector<std::pair<std::string, int>> block_sizes;
  int y_dim = 0;
  // Solver diagnostics.
  sdp::SolveStatus solver_status = sdp::SolveStatus::numerical_failure;
  int solver_iterations = 0;
  double solver_gap = 0.0;
  bool solver_loosened = false;
  double solve_seconds = 0.0;
  double stage_seconds = 0.0;
};

// (delta* - 1) * 0.5 * wbar * (n_g + 1'y1), the certified gap; agrees with
// UB - LB as an algebraic identity.
double epsilon_gap(const Certificate& cert, const bounds::ScaledModel& scaled);

struct HierarchyOptions {
  int r_max = 2;
  double eps_target = -1.0;   // < 0: use 1e-3 * wbar
  double solver_tol = 1e-8;
  double rank_tol = 1e-4;
  double bisect_tol = 1e-9;
  bool reduce_lmi = true;     // Schur pre-reduction of constant rows/columns
  int threads = 0;
  bool verbose = false;
};

struct HierarchyReport {
  std::string model_name;
  int n_vars = 0;
  double w_bar = 0.0;
  double delta0 = 0.0;                 // scaling factor of the unit direction
  Eigen::VectorXd box_upper;
  Eigen::VectorXd infimum_compliance;  // per load case, at atilde = 1
  std::vector<Certificate> stages;
  std::string termination;             // gap | flat | r_max | error:...
  Eigen::VectorXd final_design;
  double final_weight = 0.0;
  double total_seconds = 0.0;
};

// Stage 0 scales the unit direction and compactifies the box; stages
// r = r_min..r_max build, solve and certify the relaxations, stopping on
// gap <= eps_target, on flatness, or at r_max.
HierarchyReport run_hierarchy(const fem::FrameModel& model,
                              const HierarchyOptions& options = {});

// Pieces reused by the CLI: the scaled formulation and the relaxation of one
// order, including the per-case compliance PMI blocks (reduced when the
// design-dependent stiffness has a kernel).
struct ScaledProblem {
  fem::AssembledStiffness assembled;
  bounds::ScalingResult unit_scaling;
  bounds::BoxBounds box;
  bounds::ScaledModel scaled;
  std::vector<poly::MatrixPolynomial> compliance_blocks;  // in a_s variables
  std::vector<analysis::PartitionedSystem> partitions;    // at atilde = 1
  int min_order = 1;
};

ScaledProblem prepare_scaled_problem(const fem::FrameModel& model,
                                     bool reduce_lmi = true,
                                     double bisect_tol = 1e-9);

relax::SdpProblem build_order(const ScaledProblem& sp, int order);

}  // namespace framecert::certify
