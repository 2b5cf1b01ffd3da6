/* temcodec: time-encoding-machine codec for bandlimited signals.
 *
 * C API over the shared library. All handles are opaque; every function
 * returns a temcodec_status, with outputs through pointers. On failure the
 * thread-local message from temcodec_last_error() describes the problem.
 * Strings and buffers returned by the library are released with the matching
 * temcodec_*_free function.
 */
#ifndef TEMCODEC_H
#define TEMCODEC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum temcodec_status {
  TEMCODEC_OK = 0,
  TEMCODEC_INVALID_ARGUMENT = 1,
  TEMCODEC_FORMAT_ERROR = 2,
  TEMCODEC_INFEASIBLE = 3,
  TEMCODEC_DEGENERATE_SYSTEM = 4,
  TEMCODEC_INTERNAL_ERROR = 5
} temcodec_status;

typedef enum temcodec_scheme {
  TEMCODEC_SCHEME_CONV = 0, /* constant bias */
  TEMCODEC_SCHEME_VB = 1,   /* per-interval constant bias */
  TEMCODEC_SCHEME_LB = 2    /* affine per-interval bias */
} temcodec_scheme;

/* Encoder parameters plus the signal-class constants they were designed
 * against. Unused fields per scheme: conv ignores mu; vb ignores mu and
 * bias; lb ignores bias. */
typedef struct temcodec_params {
  temcodec_scheme scheme;
  double omega0;    /* angular bandwidth, rad/s */
  double amp_bound; /* amplitude bound c */
  double delta;     /* firing threshold (delta_c / delta_v / delta_l) */
  double mu;        /* lb bias shift */
  double bias;      /* conv constant bias b */
} temcodec_params;

typedef struct temcodec_signal temcodec_signal;
typedef struct temcodec_record temcodec_record;
typedef struct temcodec_codebook temcodec_codebook;
typedef struct temcodec_measurements temcodec_measurements;

const char* temcodec_status_name(temcodec_status status);
/* Message for the most recent failure on this thread; empty if none. */
const char* temcodec_last_error(void);

void temcodec_string_free(char* text);
void temcodec_bytes_free(uint8_t* bytes);
void temcodec_indices_free(uint32_t* indices);

/* --- signals ------------------------------------------------------------ */

temcodec_status temcodec_signal_generate(double omega0, double amp_bound,
                                         double t_start, double t_end,
                                         uint64_t seed, temcodec_signal** out);
temcodec_status temcodec_signal_from_json(const char* json, temcodec_signal** out);
temcodec_status temcodec_signal_to_json(const temcodec_signal* signal, char** out);
temcodec_status temcodec_signal_evaluate(const temcodec_signal* signal, double t,
                                         double* out);
temcodec_status temcodec_signal_integrate(const temcodec_signal* signal, double t1,
                                          double t2, double* out);
temcodec_status temcodec_signal_peak(const temcodec_signal* signal, double* out);
void temcodec_signal_free(temcodec_signal* signal);

/* --- encoder parameters and interval bounds ----------------------------- */

/* Designs lb thresholds so firing intervals land in
 * [alpha, beta] * nyquist period; 0 < alpha < beta <= 1. */
temcodec_status temcodec_lb_design(double alpha, double beta, double omega0,
                                   double amp_bound, temcodec_params* out);
temcodec_status temcodec_interval_bounds(const temcodec_params* params,
                                         double* t_min, double* t_max);

/* --- encoding ------------------------------------------------------------ */

temcodec_status temcodec_encode(const temcodec_signal* signal,
                                const temcodec_params* params, double t_start,
                                double t_end, double resolution,
                                temcodec_record** out);
size_t temcodec_record_count(const temcodec_record* record);
double temcodec_record_t_first(const temcodec_record* record);
/* Copies all intervals; cap is the buffer capacity in elements. */
temcodec_status temcodec_record_intervals(const temcodec_record* record,
                                          double* buffer, size_t cap);
temcodec_status temcodec_record_to_json(const temcodec_record* record, char** out);
temcodec_status temcodec_record_from_json(const char* json, temcodec_record** out);
void temcodec_record_free(temcodec_record* record);

/* --- quantization -------------------------------------------------------- */

temcodec_status temcodec_codebook_uniform(double t_min, double t_max, int bits,
                                          temcodec_codebook** out);
temcodec_status temcodec_codebook_lloyd_max(const double* samples, size_t count,
                                            int bits, double tol, int max_iter,
                                            temcodec_codebook** out);
/* exponents may be NULL to use the default grid {0.25,0.5,1,2,3,4}. */
temcodec_status temcodec_codebook_compander(const double* samples, size_t count,
                                            int bits, const double* exponents,
                                            size_t exponent_count,
                                            temcodec_codebook** out);
temcodec_status temcodec_codebook_to_json(const temcodec_codebook* cb, char** out);
temcodec_status temcodec_codebook_from_json(const char* json,
                                            temcodec_codebook** out);
temcodec_status temcodec_quantize(const temcodec_codebook* cb,
                                  const double* intervals, size_t count,
                                  uint32_t* indices_out, size_t* clamped_out);
temcodec_status temcodec_dequantize(const temcodec_codebook* cb,
                                    const uint32_t* indices, size_t count,
                                    double* intervals_out);
void temcodec_codebook_free(temcodec_codebook* cb);

/* --- bitstream ------------------------------------------------------------ */

temcodec_status temcodec_pack(const temcodec_record* record,
                              const temcodec_codebook* cb,
                              const temcodec_params* params, uint8_t** bytes_out,
                              size_t* length_out);
/* Exact inverse of temcodec_pack. Outputs may individually be NULL. */
temcodec_status temcodec_unpack(const uint8_t* bytes, size_t length,
                                temcodec_params* params_out, double* t_first_out,
                                temcodec_codebook** codebook_out,
                                uint32_t** indices_out, size_t* count_out);

/* --- decoding and reconstruction ----------------------------------------- */

temcodec_status temcodec_decode_measurements(double t_first,
                                             const double* intervals,
                                             size_t count,
                                             const temcodec_params* params,
                                             temcodec_measurements** out);
/* Number of measurement values (= interval count; there is one more time). */
size_t temcodec_measurements_count(const temcodec_measurements* m);
temcodec_status temcodec_measurements_times(const temcodec_measurements* m,
                                            double* buffer, size_t cap);
temcodec_status temcodec_measurements_values(const temcodec_measurements* m,
                                             double* buffer, size_t cap);
void temcodec_measurements_free(temcodec_measurements* m);

/* Truncated-SVD least squares on a Nyquist basis covering the firing span. */
temcodec_status temcodec_reconstruct(const temcodec_measurements* m,
                                     double omega0, double svd_cutoff,
                                     temcodec_signal** out);
temcodec_status temcodec_nmse_db(const temcodec_signal* reference,
                                 const temcodec_signal* estimate, double guard,
                                 double* out_db);

/* --- experiment harness --------------------------------------------------- */

/* command is one of "bounds" | "counts" | "density" | "rd"; config_json may
 * be NULL or "{}" for the defaults. The CSV is returned as a string. */
temcodec_status temcodec_experiment_csv(const char* config_json,
                                        const char* command, char** csv_out);
/* Single-signal encode -> pack -> unpack -> replay -> reconstruct demo.
 * Returns the bitstream and a metrics JSON. */
temcodec_status temcodec_roundtrip(const char* config_json,
                                   const char* signal_json, uint8_t** stream_out,
                                   size_t* stream_length_out,
                                   char** metrics_json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TEMCODEC_H */
