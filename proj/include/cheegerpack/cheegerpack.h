/* cheegerpack C API: alpha-Cheeger sets/clusters by phase-field relaxation,
 * an exact convex-polygon Cheeger oracle, and ball-packing refinement.
 *
 * All entry points return chp_status; chp_last_error() describes the most
 * recent failure on the calling thread. Handles are opaque and must be
 * released with the matching *_destroy call. Strings returned through
 * out-parameters stay owned by the handle and live until the next call on
 * that handle or its destruction.
 */
#ifndef CHEEGERPACK_H
#define CHEEGERPACK_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum chp_status {
  CHP_OK = 0,
  CHP_ERROR_INVALID_ARGUMENT = 1,
  CHP_ERROR_BAD_CONFIG = 2,
  CHP_ERROR_INIT_FAILURE = 3,
  CHP_ERROR_EXTRACTION = 4,
  CHP_ERROR_IO = 5,
  CHP_ERROR_INTERNAL = 6
} chp_status;

typedef enum chp_pack_objective {
  CHP_PACK_MAXIMIN = 0,
  CHP_PACK_PRODUCT = 1
} chp_pack_objective;

typedef struct chp_run chp_run;
typedef struct chp_oracle chp_oracle;
typedef struct chp_packing chp_packing;

const char* chp_version(void);
const char* chp_last_error(void);

/* ---- phase-field pipeline runs ---- */

/* config_json: a JSON object with the RunConfig keys (see README). */
chp_status chp_run_create(const char* config_json, chp_run** out);
void chp_run_destroy(chp_run* run);

chp_status chp_run_result_json(chp_run* run, const char** json_out);
chp_status chp_run_write_outputs(chp_run* run, const char* out_dir);
int chp_run_phase_count(const chp_run* run);
chp_status chp_run_grid(const chp_run* run, unsigned* dim, unsigned* m);
/* copies phase values (length m^dim, x fastest) into buf */
chp_status chp_run_field(const chp_run* run, int phase, double* buf, size_t len);
chp_status chp_run_sharp(const chp_run* run, int phase, double* area, double* perimeter,
                         double* h_alpha);
chp_status chp_run_final_energy(const chp_run* run, double* value);

/* ---- exact Cheeger oracle for convex polygons ---- */

/* xy: n_vertices (x,y) pairs, counterclockwise, strictly convex */
chp_status chp_oracle_create(const double* xy, size_t n_vertices, chp_oracle** out);
void chp_oracle_destroy(chp_oracle* oracle);
chp_status chp_oracle_h(const chp_oracle* oracle, double* h);
chp_status chp_oracle_t_star(const chp_oracle* oracle, double* t_star);
chp_status chp_oracle_json(chp_oracle* oracle, const char** json_out);
chp_status chp_oracle_boundary_csv(chp_oracle* oracle, const char* path, int samples_per_arc);

/* relative Cheeger-constant error of a k=1 run against the oracle */
chp_status chp_compare(const chp_run* run, const chp_oracle* oracle, double* relative_error);

/* h_alpha of a ball, valid for alpha > (dim-1)/dim */
chp_status chp_ball_h_alpha(unsigned dim, double radius, double alpha, double* out);

/* ---- packing post-treatment ---- */

/* extracts 0.5-level barycenters from the run and refines locally */
chp_status chp_pack_refine(const chp_run* run, chp_pack_objective objective, chp_packing** out);
/* domain_json: a shape object, e.g. {"type":"square"}; centers: k*dim doubles */
chp_status chp_pack_refine_centers(const char* domain_json, unsigned dim, const double* centers,
                                   size_t k, chp_pack_objective objective, chp_packing** out);
void chp_packing_destroy(chp_packing* packing);
chp_status chp_packing_json(chp_packing* packing, const char** json_out);
chp_status chp_packing_value(const chp_packing* packing, double* value);
chp_status chp_packing_radii(const chp_packing* packing, double* radii, size_t k);
/* writes packing.json and packing.svg into out_dir */
chp_status chp_packing_write(chp_packing* packing, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* CHEEGERPACK_H */
