#include "framecert/framecert.h"

#include "analysis.hpp"
#include "bounds.hpp"
#include "certify.hpp"
#include "fem.hpp"
#include "model_io.hpp"
#include "relax.hpp"
#include "report_io.hpp"
#include "sdp.hpp"

#include <cstring>
#include <new>
#include <string>

using namespace framecert;

struct framecert_model {
  fem::FrameModel model;
  fem::AssembledStiffness assembled;
};

struct framecert_report {
  certify::HierarchyReport report;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
framecert_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const analysis::RangeError& e) {
    set_error(e.what());
    return FRAMECERT_ERROR_RANGE;
  } catch (const bounds::InfeasibleDirectionError& e) {
    set_error(e.what());
    return FRAMECERT_ERROR_INFEASIBLE;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return FRAMECERT_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return FRAMECERT_ERROR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

framecert_status load_model(const std::string& source, bool is_path,
                            framecert_model** out) {
  if (!out) {
    set_error("output handle is null");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&]() {
    fem::FrameModel model = is_path ? model_io::load_model_file(source)
                                    : model_io::load_model_string(source);
    fem::AssembledStiffness assembled = fem::assemble(model);
    *out = new framecert_model{std::move(model), std::move(assembled)};
    return FRAMECERT_OK;
  });
}

}  // namespace

extern "C" {

const char* framecert_version(void) { return "0.1.0"; }

const char* framecert_last_error(void) { return g_last_error.c_str(); }

framecert_status framecert_model_load_file(const char* path, framecert_model** out) {
  if (!path) {
    set_error("path is null");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  return load_model(path, true, out);
}

framecert_status framecert_model_load_string(const char* json_text,
                                             framecert_model** out) {
  if (!json_text) {
    set_error("json text is null");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  return load_model(json_text, false, out);
}

void framecert_model_free(framecert_model* model) { delete model; }

int framecert_model_num_groups(const framecert_model* model) {
  return model ? model->model.n_vars() : 0;
}

int framecert_model_num_elements(const framecert_model* model) {
  return model ? static_cast<int>(model->model.elements().size()) : 0;
}

int framecert_model_num_dofs(const framecert_model* model) {
  return model ? model->assembled.n_dof : 0;
}

int framecert_model_num_load_cases(const framecert_model* model) {
  return model ? model->assembled.n_load_cases() : 0;
}

framecert_status framecert_analyze(const framecert_model* model,
                                   const double* areas, int n_areas,
                                   double* compliances, double* weight,
                                   double* gradient) {
  if (!model || !areas) {
    set_error("model/areas is null");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  if (n_areas != model->model.n_vars()) {
    set_error("expected one area per design group");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  return guarded([&]() {
    const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(areas, n_areas);
    for (int j = 0; j < model->assembled.n_load_cases(); ++j) {
      const double c = analysis::compliance(model->assembled, j, a);
      if (compliances) compliances[j] = c;
      if (gradient) {
        const Eigen::VectorXd g = analysis::compliance_gradient(model->assembled, j, a);
        for (int k = 0; k < n_areas; ++k) gradient[j * n_areas + k] = g[k];
      }
    }
    if (weight) *weight = fem::weight(model->model, a);
    return FRAMECERT_OK;
  });
}

framecert_status framecert_scale_bisect(const framecert_model* model,
                                        const double* ratios, int n_ratios,
                                        double tolerance, double* delta_star,
                                        double* upper_bound_weight,
                                        double* compliances) {
  if (!model) {
    set_error("model is null");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  if (ratios && n_ratios != model->model.n_vars()) {
    set_error("expected one ratio per design group");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  return guarded([&]() {
    const Eigen::VectorXd r =
        ratios ? Eigen::Map<const Eigen::VectorXd>(ratios, n_ratios)
               : Eigen::VectorXd::Ones(model->model.n_vars()).eval();
    const double tol = tolerance > 0.0 ? tolerance : 1e-9;
    const bounds::ScalingResult res =
        bounds::scale_bisect(model->model, model->assembled, r, tol);
    if (delta_star) *delta_star = res.delta_star;
    if (upper_bound_weight) *upper_bound_weight = res.upper_bound_weight;
    if (compliances) {
      for (int j = 0; j < res.compliances.size(); ++j) {
        compliances[j] = res.compliances[j];
      }
    }
    return FRAMECERT_OK;
  });
}

framecert_status framecert_compliance_infimum(const framecert_model* model,
                                              double* infimum, int n_cases) {
  if (!model || !infimum) {
    set_error("model/infimum is null");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  if (n_cases != model->assembled.n_load_cases()) {
    set_error("expected one slot per load case");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  return guarded([&]() {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(model->model.n_vars());
    for (int j = 0; j < n_cases; ++j) {
      infimum[j] = analysis::compliance_infimum(
          analysis::partition(model->assembled, j, ones));
    }
    return FRAMECERT_OK;
  });
}

framecert_status framecert_relaxation_sizes(const framecert_model* model, int order,
                                            int* moment_side, int* n_box_blocks,
                                            int* box_side, int* compliance_sides,
                                            int* n_moments) {
  if (!model) {
    set_error("model is null");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  return guarded([&]() {
    const certify::ScaledProblem sp = certify::prepare_scaled_problem(model->model);
    const relax::SdpProblem p = certify::build_order(sp, order);
    const int nv = model->model.n_vars();
    if (moment_side) *moment_side = p.blocks[0].side;
    if (n_box_blocks) *n_box_blocks = nv;
    if (box_side) *box_side = p.blocks[1].side;
    if (compliance_sides) {
      for (int j = 0; j < model->assembled.n_load_cases(); ++j) {
        compliance_sides[j] = p.blocks[static_cast<size_t>(1 + nv + j)].side;
      }
    }
    if (n_moments) *n_moments = p.y_dim;
    return FRAMECERT_OK;
  });
}

framecert_status framecert_export_sdpa(const framecert_model* model, int order,
                                       const char* path) {
  if (!model || !path) {
    set_error("model/path is null");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  return guarded([&]() {
    const certify::ScaledProblem sp = certify::prepare_scaled_problem(model->model);
    sdp::export_sdpa(certify::build_order(sp, order), path);
    return FRAMECERT_OK;
  });
}

void framecert_hierarchy_options_init(framecert_hierarchy_options* opt) {
  if (!opt) return;
  opt->r_max = 2;
  opt->eps_target = -1.0;
  opt->solver_tol = 1e-8;
  opt->rank_tol = 1e-4;
  opt->reduce_lmi = 1;
  opt->threads = 0;
  opt->verbose = 0;
}

framecert_status framecert_run_hierarchy(const framecert_model* model,
                                         const framecert_hierarchy_options* options,
                                         framecert_report** out) {
  if (!model || !out) {
    set_error("model/report handle is null");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&]() {
    certify::HierarchyOptions opt;
    if (options) {
      opt.r_max = options->r_max;
      opt.eps_target = options->eps_target;
      opt.solver_tol = options->solver_tol;
      opt.rank_tol = options->rank_tol;
      opt.reduce_lmi = options->reduce_lmi != 0;
      opt.threads = options->threads;
      opt.verbose = options->verbose != 0;
    }
    certify::HierarchyReport report = certify::run_hierarchy(model->model, opt);
    const bool failed = report.termination.rfind("error", 0) == 0;
    *out = new framecert_report{std::move(report)};
    if (failed) {
      set_error((*out)->report.termination);
      return FRAMECERT_ERROR_SOLVER;
    }
    return FRAMECERT_OK;
  });
}

void framecert_report_free(framecert_report* report) { delete report; }

int framecert_report_num_stages(const framecert_report* report) {
  return report ? static_cast<int>(report->report.stages.size()) : 0;
}

framecert_status framecert_report_stage(const framecert_report* report, int stage,
                                        int* order, double* lower_bound,
                                        double* upper_bound, double* gap,
                                        int* flat) {
  if (!report || stage < 0 ||
      stage >= static_cast<int>(report->report.stages.size())) {
    set_error("stage index out of range");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  const certify::Certificate& c = report->report.stages[static_cast<size_t>(stage)];
  if (order) *order = c.order;
  if (lower_bound) *lower_bound = c.lower_bound;
  if (upper_bound) *upper_bound = c.upper_bound;
  if (gap) *gap = c.gap;
  if (flat) *flat = c.flatness.flat ? 1 : 0;
  return FRAMECERT_OK;
}

double framecert_report_final_weight(const framecert_report* report) {
  return report ? report->report.final_weight : 0.0;
}

framecert_status framecert_report_final_design(const framecert_report* report,
                                               double* design, int n_design) {
  if (!report || !design ||
      n_design != static_cast<int>(report->report.final_design.size())) {
    set_error("design buffer size mismatch");
    return FRAMECERT_ERROR_INVALID_ARGUMENT;
  }
  for (int g = 0; g < n_design; ++g) design[g] = report->report.final_design[g];
  return FRAMECERT_OK;
}

const char* framecert_report_termination(const framecert_report* report) {
  return report ? report->report.termination.c_str() : "";
}

char* framecert_report_to_json(const framecert_report* report) {
  if (!report) return nullptr;
  return dup_string(report_io::report_json(report->report));
}

char* framecert_report_to_markdown(const framecert_report* report) {
  if (!report) return nullptr;
  return dup_string(report_io::report_markdown(report->report));
}

char* framecert_report_to_csv(const framecert_report* report) {
  if (!report) return nullptr;
  return dup_string(report_io::report_csv(report->report));
}

char* framecert_report_to_svg(const framecert_report* report) {
  if (!report) return nullptr;
  return dup_string(report_io::convergence_svg(report->report));
}

void framecert_string_free(char* text) { delete[] text; }

}  // extern "C"
