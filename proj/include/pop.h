#ifndef POP_H
#define POP_H

/* C interface to the portfolio-of-portfolios engine.
 *
 * Every function returns a pop_status. On failure pop_last_error() gives a
 * message for the calling thread. Strings handed out through char** are
 * owned by the caller and released with pop_string_free(). Numbers that
 * cross the boundary as text use exact decimals ("0.65") or fractions
 * ("7/20"). */

#include <stddef.h>

#if defined(_WIN32)
#define POP_API __declspec(dllexport)
#else
#define POP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pop_status {
  POP_OK = 0,
  POP_INVALID_ARGUMENT = 1,
  POP_VALIDATION = 2, /* instance diagnostics contain errors */
  POP_INFEASIBLE = 3, /* no non-empty portfolio satisfies the constraints */
  POP_IO = 4,
  POP_STATE = 5, /* session operation not allowed in the current status */
  POP_NOT_FOUND = 6,
  POP_INTERNAL = 7
} pop_status;

typedef enum pop_format { POP_FORMAT_TEXT = 0, POP_FORMAT_CSV = 1, POP_FORMAT_JSON = 2 } pop_format;

typedef struct pop_instance pop_instance;
typedef struct pop_session pop_session;

POP_API const char* pop_version(void);
POP_API const char* pop_last_error(void);
POP_API const char* pop_status_name(pop_status status);
POP_API void pop_string_free(char* text);

/* ---- instances ---------------------------------------------------------- */

POP_API pop_status pop_instance_load_file(const char* path, pop_instance** out);
POP_API pop_status pop_instance_load_json(const char* json, pop_instance** out);
POP_API void pop_instance_free(pop_instance* instance);

/* Diagnostics as a JSON array; POP_VALIDATION when any is an error. */
POP_API pop_status pop_validate_file(const char* path, char** diagnostics_json);
POP_API pop_status pop_validate_json(const char* json, char** diagnostics_json);

/* {"name","variant","instance_hash","phi_set":[...], counts} */
POP_API pop_status pop_instance_info(const pop_instance* instance, char** info_json);
POP_API pop_status pop_instance_json(const pop_instance* instance, char** json);

/* Qualification table as text; phi is required for stochastic instances
 * and must be NULL otherwise. */
POP_API pop_status pop_qualification_text(const pop_instance* instance, const char* phi, char** text);
POP_API pop_status pop_rho_text(const pop_instance* instance, const char* criterion, char** text);
POP_API pop_status pop_emit_lp(const pop_instance* instance, const char* phi, char** text);

/* Non-dominated non-empty portfolios. The rendering is produced even when
 * the status is POP_INFEASIBLE. */
POP_API pop_status pop_front(const pop_instance* instance, const char* phi, pop_format format, char** text);

/* ---- sessions ----------------------------------------------------------- */

/* options_json may be NULL: {"phis":["0.4","0.65"],"mode":"quantities"|"front",
 * "converge_at":2} */
POP_API pop_status pop_session_create(const pop_instance* instance, const char* options_json, pop_session** out);
POP_API void pop_session_free(pop_session* session);

/* Candidate-returning calls yield {"status","iteration","candidates":[...]}. */
POP_API pop_status pop_session_generate(pop_session* session, char** candidates_json);
/* labels_json: {"c1":"good","c2":"other",...} or one "final". */
POP_API pop_status pop_session_classify(pop_session* session, const char* labels_json, char** rules_json);
/* rule_ids: one id or several separated by commas. */
POP_API pop_status pop_session_accept(pop_session* session, const char* rule_ids, char** candidates_json);
POP_API pop_status pop_session_relax(pop_session* session, char** candidates_json);
POP_API pop_status pop_session_finalize(pop_session* session, const char* candidate_id);
POP_API pop_status pop_session_state(const pop_session* session, char** state_json);
POP_API pop_status pop_session_status(const pop_session* session, char** status);

/* Versioned session file; path may be NULL to only return the text. */
POP_API pop_status pop_session_save(const pop_session* session, const char* path, char** json);
/* Loading replays the recorded actions and verifies every candidate set. */
POP_API pop_status pop_session_load_file(const char* path, pop_session** out);
POP_API pop_status pop_session_load_json(const char* json, pop_session** out);

/* Runs the simulated decision maker to convergence. fraction may be NULL
 * (0.9). report receives a text transcript, result_json the final state. */
POP_API pop_status pop_session_simulate(pop_session* session, const char* fraction, char** report,
                                        char** result_json);

/* ---- service ------------------------------------------------------------ */

/* Blocks until the server stops. cors_origins is comma separated or NULL;
 * session_dir may be NULL. */
POP_API pop_status pop_serve(const char* addr, int port, const char* cors_origins, const char* session_dir);

#ifdef __cplusplus
}
#endif

#endif /* POP_H */
