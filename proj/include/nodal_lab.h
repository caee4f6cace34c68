/* nodal_lab: C interface to the nodal-set laboratory.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return NLAB_OK on success; on failure, nlab_last_error() holds a
 * thread-local description of the most recent error.
 */
#ifndef NODAL_LAB_H
#define NODAL_LAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NLAB_API __declspec(dllexport)
#else
#define NLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nlab_status {
    NLAB_OK = 0,
    NLAB_EINVAL = 1,   /* bad arguments or configuration */
    NLAB_ENUMERIC = 2, /* numerical failure (underflow, nonfinite samples) */
    NLAB_EIO = 3,      /* file system problems */
    NLAB_EFAILED = 4,  /* command ran but a release-blocking check failed */
    NLAB_EUNKNOWN = 5
} nlab_status;

typedef struct nlab_config nlab_config;
typedef struct nlab_eigenfunction nlab_eigenfunction;
typedef struct nlab_nodal_set nlab_nodal_set;

NLAB_API const char* nlab_version(void);
NLAB_API const char* nlab_last_error(void);
NLAB_API void nlab_string_free(char* s);

/* -------- configuration -------- */
NLAB_API nlab_status nlab_config_create(nlab_config** out);
NLAB_API nlab_status nlab_config_load(const char* path, nlab_config** out);
/* key is "section.key" (bare keys default to the experiment section) */
NLAB_API nlab_status nlab_config_set(nlab_config* cfg, const char* key, const char* value);
/* applies the NODAL_LAB_SEED environment override */
NLAB_API nlab_status nlab_config_apply_env(nlab_config* cfg);
NLAB_API nlab_status nlab_config_dump(const nlab_config* cfg, char** out);
NLAB_API void nlab_config_destroy(nlab_config* cfg);

/* -------- experiment commands --------
 * command: sweep | cascade | doubling | nodal | verify | fit | report.
 * summary receives a JSON document (free with nlab_string_free);
 * exit_code receives the process exit code (nonzero when a release-blocking
 * invariant failed). */
NLAB_API nlab_status nlab_run(const nlab_config* cfg, const char* command, char** summary,
                              int* exit_code);

/* -------- eigenfunctions -------- */
NLAB_API nlab_status nlab_synth_random(const char* manifold, double lambda, uint64_t seed,
                                       nlab_eigenfunction** out);
/* closed-form families: "product:n,m" (torus2), "axis:k" (torus3),
 * "sectoral:l" (sphere2) */
NLAB_API nlab_status nlab_make_named(const char* spec, nlab_eigenfunction** out);
NLAB_API nlab_status nlab_eigen_lambda(const nlab_eigenfunction* u, double* lambda);
/* chart: 0 flat/north cap, 1 south cap */
NLAB_API nlab_status nlab_eigen_eval(const nlab_eigenfunction* u, const double* point, int chart,
                                     double* value);
NLAB_API void nlab_eigenfunction_destroy(nlab_eigenfunction* u);

/* eigenvalues <= lambda_max with multiplicities; returns the total count in
 * *count and fills at most capacity entries */
NLAB_API nlab_status nlab_eigenvalue_list(const char* manifold, double lambda_max,
                                          double* lambdas, int* multiplicities, size_t capacity,
                                          size_t* count);

/* -------- nodal sets -------- */
NLAB_API nlab_status nlab_extract_nodal(const nlab_eigenfunction* u, int resolution,
                                        nlab_nodal_set** out);
NLAB_API nlab_status nlab_nodal_measure(const nlab_nodal_set* set, double* measure);
NLAB_API nlab_status nlab_nodal_elements(const nlab_nodal_set* set, size_t* elements);
/* plain-text export, one element per line */
NLAB_API nlab_status nlab_nodal_write(const nlab_nodal_set* set, const char* path);
NLAB_API void nlab_nodal_set_destroy(nlab_nodal_set* set);

/* -------- direct measurements -------- */
NLAB_API nlab_status nlab_doubling_index(const nlab_eigenfunction* u, const double* center,
                                         double half_side, int lifted, double* N);
NLAB_API nlab_status nlab_density_radius(const nlab_eigenfunction* u, int samples, uint64_t seed,
                                         double* radius);

#ifdef __cplusplus
}
#endif

#endif /* NODAL_LAB_H */
