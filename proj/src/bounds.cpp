#include "bounds.hpp"

#include <cmath>
#include <string>

namespace framecert::bounds {

namespace {

bool feasible_at(const fem::AssembledStiffness& assembled,
                 const Eigen::VectorXd& design,
                 const analysis::Tolerances& tol, Eigen::VectorXd* compliances) {
  bool ok = true;
  for (int j = 0; j < assembled.n_load_cases(); ++j) {
    const double c = analysis::compliance_fast(assembled, j, design, tol);
    if (compliances) (*compliances)[j] = c;
    if (c > assembled.compliance_bounds[static_cast<size_t>(j)]) ok = false;
  }
  return ok;
}

}  // namespace

ScalingResult scale_bisect(const fem::FrameModel& model,
                           const fem::AssembledStiffness& assembled,
                           const Eigen::VectorXd& ratio, double tol_delta,
                           const analysis::Tolerances& tol) {
  if (ratio.size() != model.n_vars()) {
    throw std::invalid_argument("ratio vector dimension mismatch");
  }
  if (ratio.minCoeff() < 0.0 || ratio.maxCoeff() <= 0.0) {
    throw std::invalid_argument("ratio must be nonnegative and nonzero");
  }

  // The direction must be able to satisfy every bound in the stiff limit,
  // and the loads must be carriable along it at all.
  for (int j = 0; j < assembled.n_load_cases(); ++j) {
    const analysis::PartitionedSystem part =
        analysis::partition(assembled, j, ratio, tol);
    const double inf_c = analysis::compliance_infimum(part, tol);
    const double cbar = assembled.compliance_bounds[static_cast<size_t>(j)];
    if (inf_c >= cbar) {
      throw InfeasibleDirectionError(
          j, "load case " + std::to_string(j) + ": compliance infimum " +
                 std::to_string(inf_c) + " is not below the bound " +
                 std::to_string(cbar) + " along this direction");
    }
    analysis::compliance(assembled, j, ratio, tol);  // range check
  }

  constexpr int kMaxBracket = 60;
  double hi = 1.0;
  double lo = 0.0;
  Eigen::VectorXd scratch(assembled.n_load_cases());
  if (feasible_at(assembled, ratio, tol, &scratch)) {
    // Shrink until infeasible to obtain a lower bracket; delta* may be below 1.
    lo = 1.0;
    int guard = 0;
    while (feasible_at(assembled, lo * ratio, tol, nullptr)) {
      hi = lo;
      lo *= 0.5;
      if (++guard > kMaxBracket) {
        // Feasible down to numerical zero: the constraint never activates.
        lo = 0.0;
        break;
      }
    }
  } else {
    int guard = 0;
    while (!feasible_at(assembled, hi * ratio, tol, nullptr)) {
      lo = hi;
      hi *= 2.0;
      if (++guard > kMaxBracket) {
        throw InfeasibleDirectionError(
            -1, "bracketing exceeded 60 doublings: scaling direction degenerate");
      }
    }
  }

  while (hi - lo > tol_delta * hi) {
    const double mid = 0.5 * (hi + lo);
    if (feasible_at(assembled, mid * ratio, tol, nullptr)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  ScalingResult out;
  out.delta_star = hi;
  out.feasible_design = hi * ratio;
  out.compliances.resize(assembled.n_load_cases());
  feasible_at(assembled, out.feasible_design, tol, &out.compliances);
  for (int j = 0; j < assembled.n_load_cases(); ++j) {
    const double cbar = assembled.compliance_bounds[static_cast<size_t>(j)];
    if (std::abs(out.compliances[j] - cbar) <= 1e-6 * cbar) {
      out.active_cases.push_back(j);
    }
  }
  const std::vector<double> coef = model.weight_coefficients();
  double w = 0.0;
  for (int g = 0; g < model.n_vars(); ++g) {
    w += out.feasible_design[g] * coef[static_cast<size_t>(g)];
  }
  out.upper_bound_weight = w;
  return out;
}

BoxBounds box_bounds(const fem::FrameModel& model, double upper_bound_weight) {
  if (upper_bound_weight <= 0.0) {
    throw std::invalid_argument("upper-bound weight must be positive");
  }
  const std::vector<double> coef = model.weight_coefficients();
  BoxBounds out;
  out.upper.resize(model.n_vars());
  for (int g = 0; g < model.n_vars(); ++g) {
    out.upper[g] = upper_bound_weight / coef[static_cast<size_t>(g)];
  }
  return out;
}

Eigen::VectorXd ScaledModel::unscale(const Eigen::VectorXd& a_s) const {
  Eigen::VectorXd a(a_s.size());
  for (int g = 0; g < a_s.size(); ++g) {
    a[g] = substitution[static_cast<size_t>(g)].first * a_s[g] +
           substitution[static_cast<size_t>(g)].second;
  }
  return a;
}

Eigen::VectorXd ScaledModel::scale(const Eigen::VectorXd& areas) const {
  Eigen::VectorXd a_s(areas.size());
  for (int g = 0; g < areas.size(); ++g) {
    a_s[g] = (areas[g] - substitution[static_cast<size_t>(g)].second) /
             substitution[static_cast<size_t>(g)].first;
  }
  return a_s;
}

double ScaledModel::objective_at(const Eigen::VectorXd& a_s) const {
  return objective_constant + objective_linear.dot(a_s);
}

ScaledModel scale_model(const fem::FrameModel& model,
                        const fem::AssembledStiffness& assembled,
                        const BoxBounds& box) {
  if (box.upper.size() != model.n_vars() || box.upper.minCoeff() <= 0.0) {
    throw std::invalid_argument("box bounds must be positive, one per group");
  }
  ScaledModel out;
  out.u_bounds = box.upper;
  const std::vector<double> coef = model.weight_coefficients();
  out.objective_linear.resize(model.n_vars());
  out.objective_constant = 0.0;
  out.substitution.reserve(static_cast<size_t>(model.n_vars()));
  double w_bar = 0.0;
  for (int g = 0; g < model.n_vars(); ++g) {
    const double half = 0.5 * box.upper[g];
    out.substitution.emplace_back(half, half);
    out.objective_linear[g] = half * coef[static_cast<size_t>(g)];
    out.objective_constant += half * coef[static_cast<size_t>(g)];
    w_bar = std::max(w_bar, box.upper[g] * coef[static_cast<size_t>(g)]);
  }
  out.w_bar = w_bar;
  out.stiffness_scaled =
      assembled.as_matrix_polynomial().substitute_affine(out.substitution);
  return out;
}

}  // namespace framecert::bounds
