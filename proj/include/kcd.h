/* C interface to the kcd library: causal discovery with bounded-size
 * conditioning sets. Handles are opaque; functions return a status code and
 * leave a message for kcd_last_error() on failure. Strings returned through
 * out-parameters are owned by the caller and released with kcd_text_free().
 */
#ifndef KCD_H
#define KCD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct kcd_graph kcd_graph;
typedef struct kcd_dataset kcd_dataset;

typedef enum kcd_status {
    KCD_OK = 0,
    KCD_ERR_ARG = 1,    /* invalid argument or precondition */
    KCD_ERR_FORMAT = 2, /* unparsable input or file problem */
    KCD_ERR_LIMIT = 3,  /* size cap exceeded */
    KCD_ERR_INTERNAL = 4
} kcd_status;

const char* kcd_version(void);

/* Message for the most recent failure on this thread. */
const char* kcd_last_error(void);

void kcd_text_free(char* text);
void kcd_graph_free(kcd_graph* g);
void kcd_dataset_free(kcd_dataset* d);

/* ---- graphs (text format: "nodes:" line plus "edge:" lines) ---- */

kcd_status kcd_graph_parse(const char* text, kcd_graph** out);
kcd_status kcd_graph_read_file(const char* path, kcd_graph** out);
kcd_status kcd_graph_format(const kcd_graph* g, char** text_out);
kcd_status kcd_graph_write_file(const kcd_graph* g, const char* path);
kcd_status kcd_graph_to_dot(const kcd_graph* g, char** text_out);
int kcd_graph_vertex_count(const kcd_graph* g);
int kcd_graph_edge_count(const kcd_graph* g);

/* ---- closures and equivalence ---- */

kcd_status kcd_closure(const kcd_graph* dag, int k, kcd_graph** out);

/* valid_out: 1/0. reason_out (optional) receives a diagnostic such as
 * "BidirectedSeparable(c,d; {u1,u2})"; "Valid" when valid. */
kcd_status kcd_validate_closure(const kcd_graph* g, int k, int* valid_out, char** reason_out);

kcd_status kcd_k_markov_equivalent(const kcd_graph* dag1, const kcd_graph* dag2, int k, int* equivalent_out);

/* ---- enumeration oracles ---- */

/* max_vertices <= 0 picks the default cap. */
kcd_status kcd_k_essential(const kcd_graph* dag, int k, int max_vertices, kcd_graph** out);

/* Input must be a maximal ancestral graph. max_edges <= 0 picks the default
 * orientation sweep budget. */
kcd_status kcd_pag(const kcd_graph* mag, int max_edges, kcd_graph** out);

/* ---- learning ---- */

typedef struct kcd_learn_options {
    double alpha;            /* significance level for data backends */
    int ci_backend;          /* KCD_CI_* */
    int scope;               /* KCD_SCOPE_* */
    int step5;               /* KCD_STEP5_* */
    int collider_overwrite;  /* 0: first orientation wins */
} kcd_learn_options;

enum { KCD_CI_ORACLE = 0, KCD_CI_GSQ = 1, KCD_CI_FISHERZ = 2 };
enum { KCD_SCOPE_ALL = 0, KCD_SCOPE_NEIGHBORS = 1 };
enum { KCD_STEP5_SINGLE = 0, KCD_STEP5_FIXPOINT = 1, KCD_STEP5_OFF = 2 };

kcd_learn_options kcd_learn_options_default(void);

/* Oracle-backed run against a ground-truth DAG. trace_out (optional)
 * receives the applied orientations as JSON lines. */
kcd_status kcd_learn_oracle(const kcd_graph* truth_dag, int k, const kcd_learn_options* options,
                            kcd_graph** out, char** trace_out);

kcd_status kcd_learn_data(const kcd_dataset* data, int k, const kcd_learn_options* options,
                          kcd_graph** out, char** trace_out);

/* ---- datasets ---- */

kcd_status kcd_dataset_read_csv(const char* path, kcd_dataset** out);
int kcd_dataset_rows(const kcd_dataset* d);
int kcd_dataset_columns(const kcd_dataset* d);
/* 1 for integer-coded data, 0 for continuous. */
int kcd_dataset_is_discrete(const kcd_dataset* d);

/* ---- simulation and benchmarking ---- */

typedef struct kcd_simulate_options {
    int model;       /* KCD_MODEL_* */
    int states;      /* discrete cardinality */
    double coef_lo;  /* linear model coefficient range */
    double coef_hi;
    int rows;
    uint64_t seed;
} kcd_simulate_options;

enum { KCD_MODEL_CPT = 0, KCD_MODEL_LINEAR = 1 };

kcd_simulate_options kcd_simulate_options_default(void);

/* Draws random parameters for the DAG under the seed, forward-samples, and
 * writes CSV to path. */
kcd_status kcd_simulate(const kcd_graph* dag, const kcd_simulate_options* options, const char* csv_path);

/* Runs the experiment described by a key=value config file and writes one
 * CSV row per (instance, dataset, learner, N). */
kcd_status kcd_run_experiment(const char* config_path, const char* csv_path, int threads);

#ifdef __cplusplus
}
#endif

#endif /* KCD_H */
