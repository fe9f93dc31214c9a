#ifndef UFUFORGE_UFU_FORGE_H
#define UFUFORGE_UFU_FORGE_H

/*
 * ufu-forge C API.
 *
 * A C++ core implements an unrestricted-file-upload (UFU) scanner together
 * with an embedded lab of 15 vulnerable upload scenarios. This header is the
 * stable shared-library surface: opaque handles, integer status codes, and
 * caller-freed strings. Results that carry structure (findings, evaluation
 * matrices) are returned as JSON-lines text so they survive any FFI.
 */

#if defined(_WIN32)
#define UFU_API __declspec(dllexport)
#else
#define UFU_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ufu_status {
  UFU_OK = 0,
  UFU_ERR_INVALID_ARGUMENT = 1,
  UFU_ERR_BIND = 2,
  UFU_ERR_CONNECTION = 3,
  UFU_ERR_TIMEOUT = 4,
  UFU_ERR_MALFORMED = 5,
  UFU_ERR_UNREACHABLE = 6,
  UFU_ERR_LAB_STARTUP = 7,
  UFU_ERR_INTERNAL = 8
} ufu_status;

/* Human-readable name for a status code. Static storage, do not free. */
UFU_API const char* ufu_status_name(ufu_status status);

/* Library version as "major.minor.patch". Static storage, do not free. */
UFU_API const char* ufu_version(void);

/* Frees any string returned through a char** out-parameter. */
UFU_API void ufu_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Embedded lab                                                        */
/* ------------------------------------------------------------------ */

typedef struct ufu_lab ufu_lab;

typedef struct ufu_lab_options {
  const char* host;       /* NULL -> "127.0.0.1" */
  int base_port;          /* 0 -> ephemeral port */
  int per_port_listeners; /* nonzero: additionally bind base_port+N per scenario */
  int response_delay_ms;  /* artificial delay added to every response (test hook) */
} ufu_lab_options;

/* Starts the lab HTTP server. Scenarios are mounted at /s1/ .. /s15/ and a
 * hardened control scenario at /s0/. On success *out_lab owns the server. */
UFU_API ufu_status ufu_lab_start(const ufu_lab_options* options, ufu_lab** out_lab);

/* Port of the path-prefix listener (useful when base_port was 0). */
UFU_API int ufu_lab_port(const ufu_lab* lab);

/* Restores one scenario (1..15, or 0 for the hardened control) to its seed
 * state: virtual filesystem, interpreter overrides, access log. */
UFU_API ufu_status ufu_lab_reset(ufu_lab* lab, int scenario_id);

UFU_API void ufu_lab_stop(ufu_lab* lab);

/* ------------------------------------------------------------------ */
/* Scanner                                                             */
/* ------------------------------------------------------------------ */

typedef struct ufu_scan_options {
  const char* url;          /* upload endpoint, e.g. http://127.0.0.1:10000/s1/upload */
  const char* field;        /* file input name; NULL -> "fileToUpload" */
  const char* uploads_hint; /* storage path hint; NULL -> "/uploads/" */
  double timeout_seconds;   /* per-scan budget; <=0 -> 300 */
  int race_burst;           /* probes per race attempt; <0 -> 20, 0 disables racing */
  int race_spacing_ms;      /* gap between race probes; <=0 -> 25 */
  unsigned long long seed;  /* nonce seed, used when has_seed != 0 */
  int has_seed;             /* 0: honor UFU_FORGE_SEED env var, else random */
} ufu_scan_options;

/* Runs the full mutation scan against one upload endpoint. On success
 * *out_findings_jsonl holds one JSON object per line, one line per verified
 * finding (verdict iFUB/CE/XSS, technique, proof URL, hex-encoded evidence). */
UFU_API ufu_status ufu_scan_run(const ufu_scan_options* options, char** out_findings_jsonl);

/* ------------------------------------------------------------------ */
/* Evaluation (capability matrix over the 15 scenarios)                */
/* ------------------------------------------------------------------ */

typedef struct ufu_eval_options {
  const char* lab_url;      /* NULL: start an embedded lab for the run */
  double timeout_seconds;   /* per-scenario budget; <=0 -> 300 */
  int race_burst;           /* <0 -> 20, 0 disables the race engine */
  int race_spacing_ms;      /* <=0 -> 25 */
  unsigned long long seed;  /* nonce seed, used when has_seed != 0 */
  int has_seed;             /* 0: honor UFU_FORGE_SEED env var, else random */
} ufu_eval_options;

/* Scans scenarios S1..S15 consecutively (reset before each) and classifies
 * findings into the iFUB/CE/XSS capability matrix. *out_matrix_jsonl holds
 * exactly 45 JSON records, one per (aspect, scenario) cell. *out_matches is
 * nonzero when the matrix equals the reference pattern: everything found for
 * S1-S14 (CE not applicable for S13) and nothing found for S15. */
UFU_API ufu_status ufu_eval_run(const ufu_eval_options* options,
                                char** out_matrix_jsonl,
                                int* out_matches);

/* Renders a matrix (as produced by ufu_eval_run) into a display string.
 * format 0: aligned 3x15 text table with legend; format 1: JSON lines. */
UFU_API ufu_status ufu_render_matrix(const char* matrix_jsonl, int format, char** out_rendered);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* UFUFORGE_UFU_FORGE_H */
