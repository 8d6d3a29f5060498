#pragma once

#include "analysis.hpp"
#include "fem.hpp"
#include "poly.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

// Feasible upper bounds by uniform scaling of a fixed area ratio, box
// compactification of the design variables, and scaling to [-1, 1].

namespace framecert::bounds {

// Scaling direction cannot reach feasibility: inf c_j >= cbar_j.
struct InfeasibleDirectionError : std::runtime_error {
  int load_case;
  InfeasibleDirectionError(int lc, const std::string& msg)
      : std::runtime_error(msg), load_case(lc) {}
};

struct ScalingResult {
  double delta_star = 0.0;
  Eigen::VectorXd compliances;     // per load case at delta_star
  std::vector<int> active_cases;   // |c_j - cbar_j| <= 1e-6 cbar_j
  double upper_bound_weight = 0.0; // delta* sum_g atilde_g sum_{e in g} rho l
  Eigen::VectorXd feasible_design; // delta* atilde
};

// Smallest delta (to relative tolerance tol_delta) with
// c_j(delta atilde) <= cbar_j for every j; valid because each c_j is
// non-increasing in delta.  Brackets by doubling/halving from delta = 1.
ScalingResult scale_bisect(const fem::FrameModel& model,
                           const fem::AssembledStiffness& assembled,
                           const Eigen::VectorXd& ratio,
                           double tol_delta = 1e-9,
                           const analysis::Tolerances& tol = {});

struct BoxBounds {
  Eigen::VectorXd upper;  // ubar_g = wbar / sum_{e in g} rho_e l_e
};

BoxBounds box_bounds(const fem::FrameModel& model, double upper_bound_weight);

// The final scaled formulation: design variables a_s in [-1, 1]^n with
// a_g = (a_{s,g} + 1)/2 * ubar_g, objective 0.5 sum_g ubar_g (sum rho l)_g
// (1 + a_{s,g}), and the stiffness polynomials substituted accordingly.
struct ScaledModel {
  double w_bar = 0.0;
  Eigen::VectorXd u_bounds;
  double objective_constant = 0.0;
  Eigen::VectorXd objective_linear;  // coefficient of a_{s,g}
  std::vector<std::pair<double, double>> substitution;  // a = s a_s + t per group
  poly::MatrixPolynomial stiffness_scaled;  // K(a(a_s))

  Eigen::VectorXd unscale(const Eigen::VectorXd& a_s) const;
  Eigen::VectorXd scale(const Eigen::VectorXd& areas) const;
  double objective_at(const Eigen::VectorXd& a_s) const;
};

ScaledModel scale_model(const fem::FrameModel& model,
                        const fem::AssembledStiffness& assembled,
                        const BoxBounds& box);

}  // namespace framecert::bounds
