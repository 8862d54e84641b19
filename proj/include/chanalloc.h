/*
 * chanalloc — C API for the 2.4 GHz interference simulator and dynamic
 * channel-allocation controller.
 *
 * All functions return ca_status (CA_OK on success). On failure a
 * human-readable detail message is available from ca_last_error() until the
 * next call on the same thread. Strings returned through char** out
 * parameters are heap-allocated; release them with ca_string_free().
 */

#ifndef CHANALLOC_H_
#define CHANALLOC_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ca_status {
    CA_OK = 0,
    CA_ERR_INVALID_ARGUMENT = 1,
    CA_ERR_DOMAIN = 2,
    CA_ERR_PARSE = 3,
    CA_ERR_INSUFFICIENT_DATA = 4,
    CA_ERR_IO = 5,
    CA_ERR_BIND = 6,
    CA_ERR_STATE = 7,
    CA_ERR_INTERNAL = 8,
} ca_status;

/* Opaque handles. */
typedef struct ca_report ca_report;
typedef struct ca_server ca_server;

const char* ca_version(void);
const char* ca_status_name(ca_status status);

/* Thread-local detail message of the last failed call. Never NULL. */
const char* ca_last_error(void);

void ca_string_free(char* s);

/* --- core utilities ------------------------------------------------------ */

/* Fitted AP-count model (year - 2000)^4.54 + 3450; year must be > 2000. */
ca_status ca_growth_model(int year, double* out);

/* Quality band of a level in dBm; *label_out points at a static string
 * ("Unacceptable", "Bad", "Acceptable", "Very good", "Excellent"). */
ca_status ca_classify_quality(double level_dbm, const char** label_out);

/* Crossing coefficient between two channels (1..13): 1, 3/4, 1/2, 1/4 or 0
 * by channel distance. */
ca_status ca_crossing_coefficient(int channel, int other, double* out);

/* --- simulation ---------------------------------------------------------- */

/* Run the in-process simulation for `rounds` collection windows.
 * has_seed_override != 0 replaces the scenario seed with `seed`. */
ca_status ca_simulate(const char* scenario_path, int rounds, int has_seed_override,
                      uint64_t seed, ca_report** out);

/* Render a run report. format is "structured" (JSON) or "table" (CSV). */
ca_status ca_report_render(const ca_report* report, const char* format, char** text_out);

/* Human-readable summary (levels rounded to two digits). */
ca_status ca_report_summary(const ca_report* report, char** text_out);

ca_status ca_report_write(const ca_report* report, const char* path, const char* format);

/* Final channel of one AP, for scripting. */
ca_status ca_report_final_channel(const ca_report* report, const char* ap_id, int* channel_out);

void ca_report_free(ca_report* report);

/* --- controller service --------------------------------------------------- */

/* Create and bind the controller service. listen_addr is "HOST:PORT";
 * port 0 picks a free port (query it with ca_server_port). */
ca_status ca_server_create(const char* scenario_path, const char* listen_addr,
                           ca_server** out);

ca_status ca_server_port(const ca_server* server, int* port_out);

/* Blocking control loop. max_rounds 0 runs until ca_server_request_stop().
 * print_status != 0 writes one line per round to stdout. */
ca_status ca_server_run(ca_server* server, int max_rounds, int print_status);

/* Async-signal-safe stop request. */
void ca_server_request_stop(ca_server* server);

ca_status ca_server_status(ca_server* server, char** text_out);

/* Snapshot of the run so far as a report handle. */
ca_status ca_server_report(ca_server* server, ca_report** out);

void ca_server_free(ca_server* server);

/* --- sensor emitter -------------------------------------------------------- */

/* Connect to a controller and replay `rounds` windows of reports for one
 * scenario-declared sensor device. */
ca_status ca_emit_reports(const char* scenario_path, const char* device_id,
                          const char* connect_addr, int rounds, int has_seed_override,
                          uint64_t seed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CHANALLOC_H_ */
