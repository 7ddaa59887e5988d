/* C interface of the functional quantization engine. */
#pragma once

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(FQ_BUILDING_LIBRARY)
#define FQ_API __attribute__((visibility("default")))
#else
#define FQ_API
#endif

/* Values match fq::ErrorCode. */
typedef enum fq_status {
    FQ_OK = 0,
    FQ_ERR_INVALID_ARGUMENT = 1,
    FQ_ERR_DIMENSION_MISMATCH = 2,
    FQ_ERR_CONFIG = 3,
    FQ_ERR_SIMULATION = 4,
    FQ_ERR_OPTIMIZATION = 5,
    FQ_ERR_NUMERICAL = 6,
    FQ_ERR_IO = 7,
    FQ_ERR_NO_ORACLE = 8,
    FQ_ERR_INTERNAL = 9
} fq_status;

typedef struct fq_space fq_space;
typedef struct fq_sample fq_sample;
typedef struct fq_codebook fq_codebook;
typedef struct fq_config fq_config;

/* Message of the last failed call on this thread ("" if none). */
FQ_API const char* fq_last_error(void);
FQ_API const char* fq_status_name(fq_status status);
FQ_API const char* fq_version(void);
/* Frees strings returned through char** out-parameters. */
FQ_API void fq_string_free(char* s);

/* ---- path space ---- */
FQ_API fq_status fq_space_trapezoid(double t_start, double t_end, size_t m, double p, size_t d,
                                    fq_space** out);
FQ_API fq_status fq_space_exponential(double t_start, double t_end, size_t m, double b, double p,
                                      size_t d, fq_space** out);
FQ_API void fq_space_free(fq_space* space);
FQ_API size_t fq_space_m(const fq_space* space);
FQ_API size_t fq_space_d(const fq_space* space);
FQ_API double fq_space_p(const fq_space* space);
FQ_API double fq_space_total_mass(const fq_space* space);
FQ_API fq_status fq_lp_norm(const fq_space* space, const double* values, double* out);

/* ---- samples ---- */
/* process_json: {"kind": "fbm", "hurst": 0.75, ...} with the [process] config keys. */
FQ_API fq_status fq_sample_simulate(const fq_space* space, const char* process_json, size_t n_paths,
                                    uint64_t seed, fq_sample** out);
/* data: n_paths * d * m doubles, path-major, then coordinate, then node. */
FQ_API fq_status fq_sample_from_data(size_t d, size_t m, size_t n_paths, const double* data,
                                     uint64_t seed, fq_sample** out);
FQ_API void fq_sample_free(fq_sample* sample);
FQ_API size_t fq_sample_size(const fq_sample* sample);
FQ_API const double* fq_sample_data(const fq_sample* sample);
FQ_API fq_status fq_sample_save(const fq_sample* sample, const char* path);
FQ_API fq_status fq_sample_load(const char* path, fq_sample** out);

/* ---- codebooks ---- */
FQ_API fq_status fq_codebook_from_data(const fq_space* space, size_t n, const double* data,
                                       fq_codebook** out);
FQ_API void fq_codebook_free(fq_codebook* codebook);
FQ_API size_t fq_codebook_size(const fq_codebook* codebook);
/* Copies n * d * m values into out (capacity in doubles). */
FQ_API fq_status fq_codebook_copy(const fq_codebook* codebook, double* out, size_t capacity);
FQ_API fq_status fq_codebook_save(const fq_codebook* codebook, const char* path);
FQ_API fq_status fq_codebook_load(const fq_space* space, const char* path, fq_codebook** out);

/* ---- quantization ---- */
/* cells: one entry per sample path; sup_norm != 0 uses the grid sup norm. */
FQ_API fq_status fq_assign(const fq_codebook* codebook, const fq_sample* sample, int sup_norm,
                           uint32_t* cells);
FQ_API fq_status fq_distortion(const fq_codebook* codebook, const fq_sample* sample, double r,
                               int sup_norm, double* value, double* std_error);
FQ_API fq_status fq_distortion_report(const fq_codebook* codebook, const fq_sample* sample,
                                      double r, int sup_norm, char** report_json);

/* options_json: OptimizerConfig keys (method, max_iters, tol, sgd_c0, sgd_decay,
 * sgd_eval_interval, empty_cell_policy, seed); NULL or "{}" for defaults. */
FQ_API fq_status fq_optimize(const fq_codebook* init, const fq_sample* sample, double r,
                             const char* options_json, fq_codebook** out, char** trace_json);
FQ_API fq_status fq_splitting(const fq_space* space, const fq_sample* sample, size_t n, double r,
                              uint64_t seed, fq_codebook** out);

/* ---- diagnostics ---- */
FQ_API fq_status fq_stationarity(const fq_codebook* codebook, const fq_sample* sample, double r,
                                 char** report_json);
FQ_API fq_status fq_holder_fit(const fq_codebook* codebook, size_t lag_min, size_t lag_max,
                               char** report_json);

/* ---- experiments ---- */
FQ_API fq_status fq_config_load(const char* path, fq_config** out);
FQ_API fq_status fq_config_parse(const char* text, fq_config** out);
FQ_API void fq_config_free(fq_config* config);
FQ_API fq_status fq_config_set_seed(fq_config* config, uint64_t seed);
FQ_API fq_status fq_config_set_output_dir(fq_config* config, const char* dir);
FQ_API fq_status fq_config_output_dir(const fq_config* config, char** dir);
FQ_API fq_status fq_config_hash(const fq_config* config, char** hash);
FQ_API fq_status fq_config_canonical(const fq_config* config, char** text);
FQ_API fq_status fq_config_schema(char** text);

/* Each run writes into the config's output directory (none if out_dir is "")
 * and returns a JSON summary. */
FQ_API fq_status fq_run_quantize(const fq_config* config, char** summary_json);
FQ_API fq_status fq_run_bounds(const fq_config* config, char** report_json);
FQ_API fq_status fq_run_diagnose(const fq_config* config, char** report_json);
/* selection: comma-separated subset of c0,l1,sharp2,supnorm,closed_form.
 * sharp_m = 0 sweeps m = 2..10. */
FQ_API fq_status fq_run_oracles(const char* selection, size_t sharp_m, const char* out_dir,
                                char** manifest_json);

#ifdef __cplusplus
}
#endif
