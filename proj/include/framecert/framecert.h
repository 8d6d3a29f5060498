#ifndef FRAMECERT_H
#define FRAMECERT_H

/* C interface of the framecert library.
 *
 * The library computes certified globally optimal cross-section areas of 2D
 * frame structures under compliance constraints.  All functionality is
 * reachable through the opaque handles below; every function returns a
 * status code and the last error message is kept per thread.
 *
 * Typical use:
 *
 *   framecert_model* model = NULL;
 *   if (framecert_model_load_file("frame24.json", &model) != FRAMECERT_OK) ...
 *   framecert_hierarchy_options opt;
 *   framecert_hierarchy_options_init(&opt);
 *   framecert_report* report = NULL;
 *   framecert_run_hierarchy(model, &opt, &report);
 *   ...
 *   framecert_report_free(report);
 *   framecert_model_free(model);
 */

#include <stddef.h>

#if defined(_WIN32)
#define FRAMECERT_API __declspec(dllexport)
#else
#define FRAMECERT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum framecert_status {
  FRAMECERT_OK = 0,
  FRAMECERT_ERROR_INVALID_ARGUMENT = 1,
  FRAMECERT_ERROR_IO = 2,
  FRAMECERT_ERROR_RANGE = 3,        /* load leaves the stiffness range */
  FRAMECERT_ERROR_INFEASIBLE = 4,   /* direction or problem infeasible */
  FRAMECERT_ERROR_SOLVER = 5,
  FRAMECERT_ERROR_INTERNAL = 6
} framecert_status;

typedef struct framecert_model framecert_model;
typedef struct framecert_report framecert_report;

FRAMECERT_API const char* framecert_version(void);

/* Message describing the most recent failure on this thread. */
FRAMECERT_API const char* framecert_last_error(void);

/* ---- model ------------------------------------------------------------ */

FRAMECERT_API framecert_status framecert_model_load_file(const char* path,
                                                         framecert_model** out);
FRAMECERT_API framecert_status framecert_model_load_string(const char* json_text,
                                                           framecert_model** out);
FRAMECERT_API void framecert_model_free(framecert_model* model);

FRAMECERT_API int framecert_model_num_groups(const framecert_model* model);
FRAMECERT_API int framecert_model_num_elements(const framecert_model* model);
FRAMECERT_API int framecert_model_num_dofs(const framecert_model* model);
FRAMECERT_API int framecert_model_num_load_cases(const framecert_model* model);

/* ---- analysis ---------------------------------------------------------- */

/* Compliance per load case, structural weight and compliance gradient at a
 * design.  areas has num_groups entries; compliances has num_load_cases
 * entries; gradient is num_groups x num_load_cases stored case-major, i.e.
 * gradient[j*num_groups + g].  Any output pointer may be NULL. */
FRAMECERT_API framecert_status framecert_analyze(const framecert_model* model,
                                                 const double* areas, int n_areas,
                                                 double* compliances,
                                                 double* weight,
                                                 double* gradient);

/* Optimal uniform scaling of a direction of cross-section ratios (NULL for
 * the unit direction): the smallest delta with every compliance within its
 * bound.  Outputs may be NULL. */
FRAMECERT_API framecert_status framecert_scale_bisect(const framecert_model* model,
                                                      const double* ratios,
                                                      int n_ratios,
                                                      double tolerance,
                                                      double* delta_star,
                                                      double* upper_bound_weight,
                                                      double* compliances);

/* Compliance infimum per load case along the unit direction. */
FRAMECERT_API framecert_status framecert_compliance_infimum(
    const framecert_model* model, double* infimum, int n_cases);

/* ---- relaxation -------------------------------------------------------- */

/* Block accounting of the order-r relaxation: moment matrix side, the count
 * and side of the box localizers, sides of the compliance blocks (array of
 * num_load_cases) and the number of moment variables. */
FRAMECERT_API framecert_status framecert_relaxation_sizes(
    const framecert_model* model, int order, int* moment_side,
    int* n_box_blocks, int* box_side, int* compliance_sides, int* n_moments);

/* Writes the order-r relaxation in sparse SDPA format (".dat-s"). */
FRAMECERT_API framecert_status framecert_export_sdpa(const framecert_model* model,
                                                     int order, const char* path);

/* ---- hierarchy --------------------------------------------------------- */

typedef struct framecert_hierarchy_options {
  int r_max;            /* highest relaxation order, default 2 */
  double eps_target;    /* absolute gap target; < 0 selects 1e-3 * wbar */
  double solver_tol;    /* SDP duality-gap tolerance, default 1e-8 */
  double rank_tol;      /* flatness rank threshold, default 1e-4 */
  int reduce_lmi;       /* Schur pre-reduction of constant rows, default 1 */
  int threads;          /* 0: hardware concurrency */
  int verbose;          /* iteration log to stderr */
} framecert_hierarchy_options;

FRAMECERT_API void framecert_hierarchy_options_init(framecert_hierarchy_options* opt);

FRAMECERT_API framecert_status framecert_run_hierarchy(
    const framecert_model* model, const framecert_hierarchy_options* options,
    framecert_report** out);

FRAMECERT_API void framecert_report_free(framecert_report* report);

FRAMECERT_API int framecert_report_num_stages(const framecert_report* report);
FRAMECERT_API framecert_status framecert_report_stage(const framecert_report* report,
                                                      int stage, int* order,
                                                      double* lower_bound,
                                                      double* upper_bound,
                                                      double* gap, int* flat);
FRAMECERT_API double framecert_report_final_weight(const framecert_report* report);
FRAMECERT_API framecert_status framecert_report_final_design(
    const framecert_report* report, double* design, int n_design);
/* Termination reason: "gap", "flat", "r_max" or "error: ...". */
FRAMECERT_API const char* framecert_report_termination(const framecert_report* report);

/* Serialized forms; free the returned buffer with framecert_string_free. */
FRAMECERT_API char* framecert_report_to_json(const framecert_report* report);
FRAMECERT_API char* framecert_report_to_markdown(const framecert_report* report);
FRAMECERT_API char* framecert_report_to_csv(const framecert_report* report);
FRAMECERT_API char* framecert_report_to_svg(const framecert_report* report);
FRAMECERT_API void framecert_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* FRAMECERT_H */
