#include "certify.hpp"

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace framecert::certify {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

FlatnessResult flatness_check(const relax::MomentIndexMap& map,
                              const Eigen::VectorXd& y, int order,
                              double rank_tol) {
  auto numerical_rank = [rank_tol](const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const Eigen::VectorXd& s = svd.singularValues();
    if (s.size() == 0) return 0;
    const double cutoff = rank_tol * s[0];
    int rank = 0;
    for (int i = 0; i < s.size(); ++i) {
      if (s[i] > cutoff) ++rank;
    }
    return rank;
  };
  FlatnessResult out;
  out.rank = numerical_rank(relax::moment_matrix_values(map, order, y));
  out.rank_sub = order >= 2
                     ? numerical_rank(relax::moment_matrix_values(map, order - 1, y))
                     : 1;  // M_0 = [1]
  out.flat = out.rank == out.rank_sub;
  return out;
}

Eigen::VectorXd recover_ratios(const Eigen::VectorXd& first_order_moments,
                               const bounds::ScaledModel& scaled) {
  Eigen::VectorXd ratios(first_order_moments.size());
  for (int g = 0; g < first_order_moments.size(); ++g) {
    const double a = 0.5 * (first_order_moments[g] + 1.0) * scaled.u_bounds[g];
    ratios[g] = std::clamp(a, 0.0, scaled.u_bounds[g]);
  }
  return ratios;
}

Extraction extract_minimizer(const relax::MomentIndexMap& map,
                             const Eigen::VectorXd& y,
                             const FlatnessResult& flatness,
                             const bounds::ScaledModel& scaled,
                             const fem::FrameModel& model) {
  Extraction out;
  if (!flatness.flat || flatness.rank != 1) {
    out.status = Extraction::Status::unavailable;
    out.note = "moment matrix rank " + std::to_string(flatness.rank) +
               " (rank-one extraction only)";
    return out;
  }
  const int n = map.n_vars();
  Eigen::VectorXd point(n);
  for (int g = 0; g < n; ++g) {
    point[g] = y[map.y_index(poly::MultiIndex::unit(n, g))];
  }
  double residual = 0.0;
  for (int g = 0; g < n; ++g) {
    for (int h = g; h < n; ++h) {
      const poly::MultiIndex m =
          poly::MultiIndex::unit(n, g) + poly::MultiIndex::unit(n, h);
      residual = std::max(residual,
                          std::abs(y[map.y_index(m)] - point[g] * point[h]));
    }
  }
  out.status = Extraction::Status::extracted;
  out.moment_residual = residual;
  out.design = recover_ratios(point, scaled);
  out.weight = fem::weight(model, out.design);
  return out;
}

double epsilon_gap(const Certificate& cert, const bounds::ScaledModel& scaled) {
  const double n_g = static_cast<double>(cert.first_order_moments.size());
  return (cert.delta_star - 1.0) * 0.5 * scaled.w_bar *
         (n_g + cert.first_order_moments.sum());
}

ScaledProblem prepare_scaled_problem(const fem::FrameModel& model,
                                     bool reduce_lmi, double bisect_tol) {
  ScaledProblem sp;
  sp.assembled = fem::assemble(model);
  const Eigen::VectorXd unit = Eigen::VectorXd::Ones(model.n_vars());

  for (int j = 0; j < sp.assembled.n_load_cases(); ++j) {
    sp.partitions.push_back(analysis::partition(sp.assembled, j, unit));
  }

  sp.unit_scaling = bounds::scale_bisect(model, sp.assembled, unit, bisect_tol);
  sp.box = bounds::box_bounds(model, sp.unit_scaling.upper_bound_weight);
  sp.scaled = bounds::scale_model(model, sp.assembled, sp.box);

  int max_degree = 1;
  for (int j = 0; j < sp.assembled.n_load_cases(); ++j) {
    poly::MatrixPolynomial lmi =
        analysis::compliance_lmi(sp.assembled, j, sp.partitions[static_cast<size_t>(j)],
                                 reduce_lmi);
    max_degree = std::max(max_degree, lmi.degree());
    sp.compliance_blocks.push_back(lmi.substitute_affine(sp.scaled.substitution));
  }
  sp.min_order = (max_degree + 1) / 2;
  return sp;
}

relax::SdpProblem build_order(const ScaledProblem& sp, int order) {
  relax::Objective obj;
  obj.constant = sp.scaled.objective_constant;
  obj.linear = sp.scaled.objective_linear;
  return relax::build_relaxation(obj, sp.compliance_blocks,
                                 static_cast<int>(sp.scaled.u_bounds.size()), order);
}

HierarchyReport run_hierarchy(const fem::FrameModel& model,
                              const HierarchyOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  HierarchyReport report;
  report.n_vars = model.n_vars();

  ScaledProblem sp = prepare_scaled_problem(model, options.reduce_lmi,
                                            options.bisect_tol);
  report.w_bar = sp.unit_scaling.upper_bound_weight;
  report.delta0 = sp.unit_scaling.delta_star;
  report.box_upper = sp.box.upper;
  report.infimum_compliance.resize(sp.assembled.n_load_cases());
  for (int j = 0; j < sp.assembled.n_load_cases(); ++j) {
    report.infimum_compliance[j] =
        analysis::compliance_infimum(sp.partitions[static_cast<size_t>(j)]);
  }

  const double eps_target = options.eps_target >= 0.0
                                ? options.eps_target
                                : 1e-3 * report.w_bar;
  report.termination = "r_max";

  for (int r = sp.min_order; r <= options.r_max; ++r) {
    const auto t_stage = std::chrono::steady_clock::now();
    Certificate cert;
    cert.order = r;

    const relax::SdpProblem problem = build_order(sp, r);
    cert.y_dim = problem.y_dim;
    for (const auto& b : problem.blocks) cert.block_sizes.emplace_back(b.label, b.side);

    sdp::SolveOptions sopt;
    sopt.tol = options.solver_tol;
    sopt.threads = options.threads;
    sopt.verbose = options.verbose;
    const auto t_solve = std::chrono::steady_clock::now();
    const sdp::SdpSolution sol = sdp::solve(problem, sopt);
    cert.solve_seconds = seconds_since(t_solve);
    cert.solver_status = sol.status;
    cert.solver_iterations = sol.iterations;
    cert.solver_gap = sol.duality_gap;
    cert.solver_loosened = sol.tolerance_loosened;
    if (sol.status != sdp::SolveStatus::optimal &&
        sol.status != sdp::SolveStatus::optimal_loosened) {
      cert.stage_seconds = seconds_since(t_stage);
      report.stages.push_back(std::move(cert));
      report.termination = "error: relaxation solve " + sdp::to_string(sol.status);
      break;
    }

    cert.lower_bound = sol.objective;
    const relax::MomentIndexMap map(model.n_vars(), r);
    cert.first_order_moments.resize(model.n_vars());
    for (int g = 0; g < model.n_vars(); ++g) {
      cert.first_order_moments[g] =
          sol.y[map.y_index(poly::MultiIndex::unit(model.n_vars(), g))];
    }

    // Feasible upper bound from this stage's first-order moments.
    cert.ratios = recover_ratios(cert.first_order_moments, sp.scaled);
    analysis::compliance(sp.assembled, 0, cert.ratios);  // range re-verification
    const bounds::ScalingResult ub = bounds::scale_bisect(
        model, sp.assembled, cert.ratios, options.bisect_tol);
    cert.delta_star = ub.delta_star;
    cert.upper_bound = ub.upper_bound_weight;
    cert.design = ub.feasible_design;
    cert.compliances = ub.compliances;
    cert.gap = cert.upper_bound - cert.lower_bound;
    cert.gap_identity_residual =
        std::abs(cert.gap - epsilon_gap(cert, sp.scaled));

    cert.flatness = flatness_check(map, sol.y, r, options.rank_tol);
    cert.extraction = extract_minimizer(map, sol.y, cert.flatness, sp.scaled, model);

    cert.stage_seconds = seconds_since(t_stage);
    report.stages.push_back(cert);

    if (options.verbose) {
      std::fprintf(stderr, "order %d: LB %.6f UB %.6f gap %.3e flat=%d rank=%d\n",
                   r, cert.lower_bound, cert.upper_bound, cert.gap,
                   cert.flatness.flat ? 1 : 0, cert.flatness.rank);
    }

    if (cert.gap <= eps_target) {
      report.termination = "gap";
      break;
    }
    if (cert.flatness.flat) {
      report.termination = "flat";
      break;
    }
  }

  // Final design: the best feasible upper bound observed.
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : report.stages) {
    if (c.design.size() > 0 && c.upper_bound < best) {
      best = c.upper_bound;
      report.final_design = c.design;
      report.final_weight = c.upper_bound;
    }
  }
  report.total_seconds = seconds_since(t_start);
  return report;
}

}  // namespace framecert::certify
