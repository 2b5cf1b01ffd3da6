#include "temcodec/temcodec.h"

#include <cstring>
#include <new>
#include <string>

#include "bitstream.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "quantizer.hpp"
#include "reconstruct.hpp"
#include "signal.hpp"
#include "tem.hpp"

struct temcodec_signal {
  temcodec::BandlimitedSignal impl;
};
struct temcodec_record {
  temcodec::FiringRecord impl;
};
struct temcodec_codebook {
  temcodec::Codebook impl;
};
struct temcodec_measurements {
  temcodec::Measurements impl;
};

namespace {

thread_local std::string g_last_error;

temcodec_status fail(temcodec_status status, const char* what) {
  g_last_error = what;
  return status;
}

template <typename Fn>
temcodec_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return TEMCODEC_OK;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return TEMCODEC_INVALID_ARGUMENT;
  } catch (const temcodec::FormatError& e) {
    g_last_error = e.what();
    if (e.offset() != temcodec::FormatError::npos)
      g_last_error += " (offset " + std::to_string(e.offset()) + ")";
    return TEMCODEC_FORMAT_ERROR;
  } catch (const temcodec::InfeasibleError& e) {
    g_last_error = e.what();
    g_last_error += " (t = " + std::to_string(e.time()) + ")";
    return TEMCODEC_INFEASIBLE;
  } catch (const temcodec::DegenerateSystemError& e) {
    g_last_error = e.what();
    return TEMCODEC_DEGENERATE_SYSTEM;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TEMCODEC_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown error";
    return TEMCODEC_INTERNAL_ERROR;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

temcodec::CodecParams to_codec_params(const temcodec_params& p) {
  temcodec::SchemeParams scheme;
  switch (p.scheme) {
    case TEMCODEC_SCHEME_CONV:
      scheme = temcodec::ConstantBiasParams{p.delta, p.bias, p.amp_bound};
      break;
    case TEMCODEC_SCHEME_VB:
      scheme = temcodec::VariableBiasParams{
          p.delta, temcodec::slope_bound(p.omega0, p.amp_bound)};
      break;
    case TEMCODEC_SCHEME_LB:
      scheme = temcodec::LinearBiasParams::from_thresholds(p.delta, p.mu,
                                                           p.omega0, p.amp_bound);
      break;
    default:
      throw std::invalid_argument("unknown scheme tag");
  }
  temcodec::CodecParams params{scheme, p.omega0, p.amp_bound};
  params.validate();
  return params;
}

temcodec_params from_codec_params(const temcodec::CodecParams& cp) {
  temcodec_params p{};
  p.scheme = static_cast<temcodec_scheme>(temcodec::scheme_of(cp.scheme));
  p.omega0 = cp.omega0;
  p.amp_bound = cp.amp_bound;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, temcodec::ConstantBiasParams>) {
          p.delta = v.delta_c;
          p.bias = v.bias;
        } else if constexpr (std::is_same_v<T, temcodec::VariableBiasParams>) {
          p.delta = v.delta_v;
        } else {
          p.delta = v.delta;
          p.mu = v.mu;
        }
      },
      cp.scheme);
  return p;
}

}  // namespace

extern "C" {

const char* temcodec_status_name(temcodec_status status) {
  switch (status) {
    case TEMCODEC_OK: return "ok";
    case TEMCODEC_INVALID_ARGUMENT: return "invalid argument";
    case TEMCODEC_FORMAT_ERROR: return "format error";
    case TEMCODEC_INFEASIBLE: return "infeasible bias";
    case TEMCODEC_DEGENERATE_SYSTEM: return "degenerate system";
    case TEMCODEC_INTERNAL_ERROR: return "internal error";
  }
  return "unknown";
}

const char* temcodec_last_error(void) { return g_last_error.c_str(); }

void temcodec_string_free(char* text) { delete[] text; }
void temcodec_bytes_free(uint8_t* bytes) { delete[] bytes; }
void temcodec_indices_free(uint32_t* indices) { delete[] indices; }

temcodec_status temcodec_signal_generate(double omega0, double amp_bound,
                                         double t_start, double t_end,
                                         uint64_t seed, temcodec_signal** out) {
  if (out == nullptr) return fail(TEMCODEC_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    temcodec::SignalSpec spec{omega0, amp_bound, t_start, t_end, seed};
    *out = new temcodec_signal{temcodec::generate(spec)};
  });
}

temcodec_status temcodec_signal_from_json(const char* json, temcodec_signal** out) {
  if (json == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new temcodec_signal{temcodec::BandlimitedSignal::from_json(json)};
  });
}

temcodec_status temcodec_signal_to_json(const temcodec_signal* signal, char** out) {
  if (signal == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup_string(signal->impl.to_json()); });
}

temcodec_status temcodec_signal_evaluate(const temcodec_signal* signal, double t,
                                         double* out) {
  if (signal == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = signal->impl.evaluate(t); });
}

temcodec_status temcodec_signal_integrate(const temcodec_signal* signal, double t1,
                                          double t2, double* out) {
  if (signal == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = signal->impl.integrate(t1, t2); });
}

temcodec_status temcodec_signal_peak(const temcodec_signal* signal, double* out) {
  if (signal == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = signal->impl.peak(); });
}

void temcodec_signal_free(temcodec_signal* signal) { delete signal; }

temcodec_status temcodec_lb_design(double alpha, double beta, double omega0,
                                   double amp_bound, temcodec_params* out) {
  if (out == nullptr) return fail(TEMCODEC_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    const auto p = temcodec::lb_design(alpha, beta, omega0, amp_bound);
    *out = from_codec_params(temcodec::CodecParams{p, omega0, amp_bound});
  });
}

temcodec_status temcodec_interval_bounds(const temcodec_params* params,
                                         double* t_min, double* t_max) {
  if (params == nullptr || t_min == nullptr || t_max == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto cp = to_codec_params(*params);
    const auto b = temcodec::interval_bounds(cp.scheme);
    *t_min = b.t_min;
    *t_max = b.t_max;
  });
}

temcodec_status temcodec_encode(const temcodec_signal* signal,
                                const temcodec_params* params, double t_start,
                                double t_end, double resolution,
                                temcodec_record** out) {
  if (signal == nullptr || params == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto cp = to_codec_params(*params);
    *out = new temcodec_record{
        temcodec::encode(signal->impl, cp.scheme, t_start, t_end, resolution)};
  });
}

size_t temcodec_record_count(const temcodec_record* record) {
  return record == nullptr ? 0 : record->impl.intervals.size();
}

double temcodec_record_t_first(const temcodec_record* record) {
  return record == nullptr ? 0.0 : record->impl.t_first;
}

temcodec_status temcodec_record_intervals(const temcodec_record* record,
                                          double* buffer, size_t cap) {
  if (record == nullptr || buffer == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  if (cap < record->impl.intervals.size())
    return fail(TEMCODEC_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buffer, record->impl.intervals.data(),
              record->impl.intervals.size() * sizeof(double));
  return TEMCODEC_OK;
}

temcodec_status temcodec_record_to_json(const temcodec_record* record, char** out) {
  if (record == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup_string(record->impl.to_json()); });
}

temcodec_status temcodec_record_from_json(const char* json, temcodec_record** out) {
  if (json == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new temcodec_record{temcodec::FiringRecord::from_json(json)};
  });
}

void temcodec_record_free(temcodec_record* record) { delete record; }

temcodec_status temcodec_codebook_uniform(double t_min, double t_max, int bits,
                                          temcodec_codebook** out) {
  if (out == nullptr) return fail(TEMCODEC_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    *out = new temcodec_codebook{temcodec::uq_design(t_min, t_max, bits)};
  });
}

temcodec_status temcodec_codebook_lloyd_max(const double* samples, size_t count,
                                            int bits, double tol, int max_iter,
                                            temcodec_codebook** out) {
  if (samples == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    temcodec::IntervalSamples s;
    s.values.assign(samples, samples + count);
    *out = new temcodec_codebook{temcodec::lloyd_max_design(s, bits, tol, max_iter)};
  });
}

temcodec_status temcodec_codebook_compander(const double* samples, size_t count,
                                            int bits, const double* exponents,
                                            size_t exponent_count,
                                            temcodec_codebook** out) {
  if (samples == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    temcodec::IntervalSamples s;
    s.values.assign(samples, samples + count);
    if (exponents == nullptr) {
      *out = new temcodec_codebook{temcodec::compander_design(s, bits)};
    } else {
      *out = new temcodec_codebook{temcodec::compander_design(
          s, bits, std::span<const double>(exponents, exponent_count))};
    }
  });
}

temcodec_status temcodec_codebook_to_json(const temcodec_codebook* cb, char** out) {
  if (cb == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup_string(cb->impl.to_json()); });
}

temcodec_status temcodec_codebook_from_json(const char* json,
                                            temcodec_codebook** out) {
  if (json == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new temcodec_codebook{temcodec::Codebook::from_json(json)};
  });
}

temcodec_status temcodec_quantize(const temcodec_codebook* cb,
                                  const double* intervals, size_t count,
                                  uint32_t* indices_out, size_t* clamped_out) {
  if (cb == nullptr || intervals == nullptr || indices_out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto q = temcodec::quantize(
        std::span<const double>(intervals, count), cb->impl);
    std::memcpy(indices_out, q.indices.data(), count * sizeof(uint32_t));
    if (clamped_out != nullptr) *clamped_out = q.clamped;
  });
}

temcodec_status temcodec_dequantize(const temcodec_codebook* cb,
                                    const uint32_t* indices, size_t count,
                                    double* intervals_out) {
  if (cb == nullptr || indices == nullptr || intervals_out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto values = temcodec::dequantize(
        std::span<const uint32_t>(indices, count), cb->impl);
    std::memcpy(intervals_out, values.data(), count * sizeof(double));
  });
}

void temcodec_codebook_free(temcodec_codebook* cb) { delete cb; }

temcodec_status temcodec_pack(const temcodec_record* record,
                              const temcodec_codebook* cb,
                              const temcodec_params* params, uint8_t** bytes_out,
                              size_t* length_out) {
  if (record == nullptr || cb == nullptr || params == nullptr ||
      bytes_out == nullptr || length_out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto stream =
        temcodec::pack(record->impl, cb->impl, to_codec_params(*params));
    auto* bytes = new uint8_t[stream.size()];
    std::memcpy(bytes, stream.data(), stream.size());
    *bytes_out = bytes;
    *length_out = stream.size();
  });
}

temcodec_status temcodec_unpack(const uint8_t* bytes, size_t length,
                                temcodec_params* params_out, double* t_first_out,
                                temcodec_codebook** codebook_out,
                                uint32_t** indices_out, size_t* count_out) {
  if (bytes == nullptr) return fail(TEMCODEC_INVALID_ARGUMENT, "null stream");
  return guarded([&] {
    auto u = temcodec::unpack(std::span<const uint8_t>(bytes, length));
    if (params_out != nullptr) *params_out = from_codec_params(u.params);
    if (t_first_out != nullptr) *t_first_out = u.t_first;
    if (codebook_out != nullptr)
      *codebook_out = new temcodec_codebook{std::move(u.codebook)};
    if (indices_out != nullptr) {
      auto* idx = new uint32_t[u.indices.size()];
      std::memcpy(idx, u.indices.data(), u.indices.size() * sizeof(uint32_t));
      *indices_out = idx;
    }
    if (count_out != nullptr) *count_out = u.indices.size();
  });
}

temcodec_status temcodec_decode_measurements(double t_first,
                                             const double* intervals,
                                             size_t count,
                                             const temcodec_params* params,
                                             temcodec_measurements** out) {
  if (intervals == nullptr || params == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new temcodec_measurements{temcodec::decoder_replay(
        t_first, std::span<const double>(intervals, count),
        to_codec_params(*params))};
  });
}

size_t temcodec_measurements_count(const temcodec_measurements* m) {
  return m == nullptr ? 0 : m->impl.values.size();
}

temcodec_status temcodec_measurements_times(const temcodec_measurements* m,
                                            double* buffer, size_t cap) {
  if (m == nullptr || buffer == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  if (cap < m->impl.times.size())
    return fail(TEMCODEC_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buffer, m->impl.times.data(), m->impl.times.size() * sizeof(double));
  return TEMCODEC_OK;
}

temcodec_status temcodec_measurements_values(const temcodec_measurements* m,
                                             double* buffer, size_t cap) {
  if (m == nullptr || buffer == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  if (cap < m->impl.values.size())
    return fail(TEMCODEC_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buffer, m->impl.values.data(),
              m->impl.values.size() * sizeof(double));
  return TEMCODEC_OK;
}

void temcodec_measurements_free(temcodec_measurements* m) { delete m; }

temcodec_status temcodec_reconstruct(const temcodec_measurements* m,
                                     double omega0, double svd_cutoff,
                                     temcodec_signal** out) {
  if (m == nullptr || out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto cfg = temcodec::ReconConfig::for_times(omega0, m->impl.times.front(),
                                                m->impl.times.back());
    if (svd_cutoff > 0.0) cfg.svd_cutoff = svd_cutoff;
    auto result = temcodec::reconstruct(m->impl, cfg);
    *out = new temcodec_signal{std::move(result.estimate)};
  });
}

temcodec_status temcodec_nmse_db(const temcodec_signal* reference,
                                 const temcodec_signal* estimate, double guard,
                                 double* out_db) {
  if (reference == nullptr || estimate == nullptr || out_db == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out_db = temcodec::nmse_db(reference->impl, estimate->impl, guard);
  });
}

temcodec_status temcodec_experiment_csv(const char* config_json,
                                        const char* command, char** csv_out) {
  if (command == nullptr || csv_out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string text =
        config_json == nullptr || config_json[0] == '\0' ? "{}" : config_json;
    const auto cfg = temcodec::ExperimentConfig::from_json(text);
    const std::string cmd = command;
    std::string csv;
    if (cmd == "bounds") csv = temcodec::run_bounds_csv(cfg);
    else if (cmd == "counts") csv = temcodec::run_counts_csv(cfg);
    else if (cmd == "density") csv = temcodec::run_density_csv(cfg);
    else if (cmd == "rd") csv = temcodec::run_rate_distortion_csv(cfg);
    else throw std::invalid_argument("unknown experiment command: " + cmd);
    *csv_out = dup_string(csv);
  });
}

temcodec_status temcodec_roundtrip(const char* config_json,
                                   const char* signal_json, uint8_t** stream_out,
                                   size_t* stream_length_out,
                                   char** metrics_json_out) {
  if (signal_json == nullptr || stream_out == nullptr ||
      stream_length_out == nullptr || metrics_json_out == nullptr)
    return fail(TEMCODEC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string text =
        config_json == nullptr || config_json[0] == '\0' ? "{}" : config_json;
    const auto cfg = temcodec::ExperimentConfig::from_json(text);
    const auto signal = temcodec::BandlimitedSignal::from_json(signal_json);
    auto result = temcodec::run_roundtrip(cfg, signal);
    auto* bytes = new uint8_t[result.stream.size()];
    std::memcpy(bytes, result.stream.data(), result.stream.size());
    *stream_out = bytes;
    *stream_length_out = result.stream.size();
    *metrics_json_out = dup_string(result.metrics_json);
  });
}

}  // extern "C"
