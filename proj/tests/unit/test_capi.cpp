// Exercises the extern-C shared-library surface end to end.
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "temcodec/temcodec.h"

namespace {

constexpr double kOmega0 = 314.15926535897932;

temcodec_params lb_params() {
  temcodec_params p{};
  p.scheme = TEMCODEC_SCHEME_LB;
  p.omega0 = kOmega0;
  p.amp_bound = 1.0;
  p.delta = 0.0314159;
  p.mu = 3.14159;
  return p;
}

}  // namespace

TEST_CASE("C API: full encode -> pack -> unpack -> replay -> reconstruct chain") {
  temcodec_signal* signal = nullptr;
  REQUIRE(temcodec_signal_generate(kOmega0, 1.0, -0.45, 0.45, 321, &signal) ==
          TEMCODEC_OK);

  double peak = 0.0;
  CHECK(temcodec_signal_peak(signal, &peak) == TEMCODEC_OK);
  CHECK(std::fabs(peak - 1.0) <= 1e-9);

  const temcodec_params params = lb_params();
  double t_min = 0.0, t_max = 0.0;
  REQUIRE(temcodec_interval_bounds(&params, &t_min, &t_max) == TEMCODEC_OK);
  CHECK(std::fabs(t_max - 0.01) <= 1e-6);

  temcodec_record* record = nullptr;
  REQUIRE(temcodec_encode(signal, &params, -0.45, 0.45, 1e-9, &record) ==
          TEMCODEC_OK);
  const size_t count = temcodec_record_count(record);
  CHECK(count > 100);
  CHECK(temcodec_record_t_first(record) == -0.45);

  std::vector<double> intervals(count);
  REQUIRE(temcodec_record_intervals(record, intervals.data(), count) ==
          TEMCODEC_OK);
  for (const double d : intervals) {
    CHECK(d > 0.0);
    CHECK(d <= t_max + 1e-9);
  }

  temcodec_codebook* cb = nullptr;
  REQUIRE(temcodec_codebook_uniform(t_min, t_max, 10, &cb) == TEMCODEC_OK);

  uint8_t* stream = nullptr;
  size_t stream_len = 0;
  REQUIRE(temcodec_pack(record, cb, &params, &stream, &stream_len) == TEMCODEC_OK);
  CHECK(stream_len > 0);

  temcodec_params params_back{};
  double t_first = 0.0;
  temcodec_codebook* cb_back = nullptr;
  uint32_t* indices = nullptr;
  size_t n_indices = 0;
  REQUIRE(temcodec_unpack(stream, stream_len, &params_back, &t_first, &cb_back,
                          &indices, &n_indices) == TEMCODEC_OK);
  CHECK(n_indices == count);
  CHECK(t_first == -0.45);
  CHECK(params_back.scheme == TEMCODEC_SCHEME_LB);
  CHECK(params_back.delta == params.delta);

  std::vector<double> decoded(n_indices);
  REQUIRE(temcodec_dequantize(cb_back, indices, n_indices, decoded.data()) ==
          TEMCODEC_OK);

  temcodec_measurements* m = nullptr;
  REQUIRE(temcodec_decode_measurements(t_first, decoded.data(), decoded.size(),
                                       &params_back, &m) == TEMCODEC_OK);
  CHECK(temcodec_measurements_count(m) == count);

  temcodec_signal* estimate = nullptr;
  REQUIRE(temcodec_reconstruct(m, kOmega0, 1e-10, &estimate) == TEMCODEC_OK);
  double score = 0.0;
  REQUIRE(temcodec_nmse_db(signal, estimate, 0.05, &score) == TEMCODEC_OK);
  CHECK(score <= -20.0);

  temcodec_signal_free(estimate);
  temcodec_measurements_free(m);
  temcodec_indices_free(indices);
  temcodec_codebook_free(cb_back);
  temcodec_bytes_free(stream);
  temcodec_codebook_free(cb);
  temcodec_record_free(record);
  temcodec_signal_free(signal);
}

TEST_CASE("C API: JSON round-trips") {
  temcodec_signal* signal = nullptr;
  REQUIRE(temcodec_signal_generate(kOmega0, 1.0, -0.45, 0.45, 5, &signal) ==
          TEMCODEC_OK);
  char* json = nullptr;
  REQUIRE(temcodec_signal_to_json(signal, &json) == TEMCODEC_OK);
  temcodec_signal* copy = nullptr;
  REQUIRE(temcodec_signal_from_json(json, &copy) == TEMCODEC_OK);
  double a = 0.0, b = 0.0;
  CHECK(temcodec_signal_evaluate(signal, 0.123, &a) == TEMCODEC_OK);
  CHECK(temcodec_signal_evaluate(copy, 0.123, &b) == TEMCODEC_OK);
  CHECK(a == b);
  temcodec_string_free(json);
  temcodec_signal_free(copy);
  temcodec_signal_free(signal);
}

TEST_CASE("C API: error codes and messages") {
  CHECK(temcodec_signal_generate(kOmega0, 1.0, -0.45, 0.45, 1, nullptr) ==
        TEMCODEC_INVALID_ARGUMENT);

  temcodec_signal* signal = nullptr;
  CHECK(temcodec_signal_from_json("definitely not json", &signal) ==
        TEMCODEC_INVALID_ARGUMENT);
  CHECK(std::strlen(temcodec_last_error()) > 0);

  temcodec_params bad = lb_params();
  bad.delta = -1.0;
  double lo = 0.0, hi = 0.0;
  CHECK(temcodec_interval_bounds(&bad, &lo, &hi) == TEMCODEC_INVALID_ARGUMENT);

  const uint8_t garbage[] = {'N', 'O', 'P', 'E', 0, 0};
  temcodec_params params_out{};
  CHECK(temcodec_unpack(garbage, sizeof(garbage), &params_out, nullptr, nullptr,
                        nullptr, nullptr) == TEMCODEC_FORMAT_ERROR);
  CHECK(std::string(temcodec_last_error()).find("offset") != std::string::npos);

  CHECK(std::string(temcodec_status_name(TEMCODEC_FORMAT_ERROR)) ==
        "format error");
}

TEST_CASE("C API: experiment CSV and roundtrip entry points") {
  const char* config =
      R"({"train_size": 2, "eval_size": 2, "bits": [1], "schemes": ["lb"]})";
  char* csv = nullptr;
  REQUIRE(temcodec_experiment_csv(config, "counts", &csv) == TEMCODEC_OK);
  CHECK(std::string(csv).find("scheme,mean_firings") != std::string::npos);
  temcodec_string_free(csv);

  CHECK(temcodec_experiment_csv(config, "nope", &csv) ==
        TEMCODEC_INVALID_ARGUMENT);
  CHECK(temcodec_experiment_csv(R"({"bogus": 1})", "counts", &csv) ==
        TEMCODEC_INVALID_ARGUMENT);

  temcodec_signal* signal = nullptr;
  REQUIRE(temcodec_signal_generate(kOmega0, 1.0, -0.45, 0.45, 9, &signal) ==
          TEMCODEC_OK);
  char* signal_json = nullptr;
  REQUIRE(temcodec_signal_to_json(signal, &signal_json) == TEMCODEC_OK);

  uint8_t* stream = nullptr;
  size_t stream_len = 0;
  char* metrics = nullptr;
  REQUIRE(temcodec_roundtrip(config, signal_json, &stream, &stream_len,
                             &metrics) == TEMCODEC_OK);
  CHECK(stream_len > 0);
  CHECK(std::string(metrics).find("nmse_db") != std::string::npos);

  temcodec_string_free(metrics);
  temcodec_bytes_free(stream);
  temcodec_string_free(signal_json);
  temcodec_signal_free(signal);
}
