/* C interface to the iHall verification engine.
 *
 * All functions return an ihall_status code; results are read back through
 * the engine handle. Handles are opaque and must be released with
 * ihall_engine_destroy. The last error message for a handle is available
 * through ihall_last_error; string pointers stay valid until the next call
 * on the same handle.
 */
#ifndef IHALL_H
#define IHALL_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ihall_engine ihall_engine_t;

typedef enum ihall_status {
    IHALL_OK = 0,
    IHALL_ERR_INVALID = 1,     /* bad configuration or arguments */
    IHALL_ERR_UNSUPPORTED = 2, /* instance outside the supported sectors */
    IHALL_ERR_INTERNAL = 3     /* internal consistency failure */
} ihall_status_t;

/* Create an engine from flat key=value configuration text (see the README
 * for the key list). */
ihall_status_t ihall_engine_create(const char* config_text, ihall_engine_t** out);
ihall_status_t ihall_engine_create_from_file(const char* path, ihall_engine_t** out);
void ihall_engine_destroy(ihall_engine_t* e);

const char* ihall_last_error(const ihall_engine_t* e);

/* Run a suite ("relations", "relations:star", "relations:tube", "lemmas",
 * "theorem-b", "oracles", "associativity", "negative-control", "all").
 * On success *failures receives the number of failing instances and the
 * report text is available via ihall_report. */
ihall_status_t ihall_run_suite(ihall_engine_t* e, const char* suite, int* failures);
const char* ihall_report(const ihall_engine_t* e);
ihall_status_t ihall_report_to_file(ihall_engine_t* e, const char* path);

/* Deterministic dump of one generator element; vertex is "*" or "i,j",
 * kind is "B", "Theta" or "H". Result via ihall_dump_text. */
ihall_status_t ihall_dump_generator(ihall_engine_t* e, const char* vertex, const char* kind,
                                    long index);
const char* ihall_dump_text(const ihall_engine_t* e);

#ifdef __cplusplus
}
#endif

#endif /* IHALL_H */
