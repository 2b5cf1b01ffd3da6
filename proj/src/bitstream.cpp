#include "bitstream.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "errors.hpp"

namespace temcodec {

namespace {

constexpr std::uint8_t kMagic[4] = {'T', 'E', 'M', '1'};
constexpr int kMaxStreamBits = 20;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

struct Reader {
  std::span<const std::uint8_t> bytes;
  std::size_t off = 0;

  void need(std::size_t n, const char* field) {
    if (off + n > bytes.size()) {
      throw FormatError("truncated stream: need " + std::to_string(n) +
                            " bytes for " + field + " at offset " +
                            std::to_string(off) + ", have " +
                            std::to_string(bytes.size() - off),
                        off);
    }
  }

  std::uint8_t u8(const char* field) {
    need(1, field);
    return bytes[off++];
  }

  std::uint32_t u32(const char* field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(bytes[off + static_cast<std::size_t>(i)]) << (8 * i);
    off += 4;
    return v;
  }

  double f64(const char* field) {
    need(8, field);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(bytes[off + static_cast<std::size_t>(i)]) << (8 * i);
    off += 8;
    return std::bit_cast<double>(v);
  }
};

}  // namespace

void CodecParams::validate() const {
  temcodec::validate(scheme);
  if (!(omega0 > 0.0)) throw std::invalid_argument("CodecParams: omega0 must be positive");
  if (!(amp_bound >= 0.0))
    throw std::invalid_argument("CodecParams: amp_bound must be non-negative");
  if (const auto* conv = std::get_if<ConstantBiasParams>(&scheme)) {
    if (std::fabs(conv->amp_bound - amp_bound) > 1e-12 * std::max(1.0, amp_bound))
      throw std::invalid_argument("CodecParams: amp_bound disagrees with scheme params");
  }
}

std::vector<std::uint8_t> pack(const FiringRecord& record, const Codebook& cb,
                               const CodecParams& params) {
  params.validate();
  cb.validate();
  if (scheme_of(params.scheme) != record.scheme)
    throw std::invalid_argument("pack: record/params scheme mismatch");
  if (record.intervals.size() > 0xffffffffull)
    throw std::invalid_argument("pack: too many intervals");

  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(static_cast<std::uint8_t>(record.scheme));
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConstantBiasParams>) {
          put_f64(out, p.delta_c);
          put_f64(out, p.bias);
        } else if constexpr (std::is_same_v<T, VariableBiasParams>) {
          put_f64(out, p.delta_v);
        } else {
          put_f64(out, p.delta);
          put_f64(out, p.mu);
        }
      },
      params.scheme);
  put_f64(out, params.omega0);
  put_f64(out, params.amp_bound);
  put_f64(out, record.t_first);
  out.push_back(static_cast<std::uint8_t>(cb.bits));
  put_u32(out, static_cast<std::uint32_t>(record.intervals.size()));

  const std::string cb_json = cb.to_json();
  put_u32(out, static_cast<std::uint32_t>(cb_json.size()));
  out.insert(out.end(), cb_json.begin(), cb_json.end());

  const auto q = quantize(record.intervals, cb);
  std::uint64_t acc = 0;
  int nbits = 0;
  for (const std::uint32_t index : q.indices) {
    acc = (acc << cb.bits) | index;
    nbits += cb.bits;
    while (nbits >= 8) {
      out.push_back(static_cast<std::uint8_t>((acc >> (nbits - 8)) & 0xff));
      nbits -= 8;
    }
  }
  if (nbits > 0)
    out.push_back(static_cast<std::uint8_t>((acc << (8 - nbits)) & 0xff));
  return out;
}

Unpacked unpack(std::span<const std::uint8_t> bytes) {
  Reader r{bytes};
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("bad magic, expected \"TEM1\"", 0);
  r.off = 4;

  const std::uint8_t scheme_tag = r.u8("scheme tag");
  if (scheme_tag > 2)
    throw FormatError("unknown scheme tag " + std::to_string(scheme_tag), 4);
  const auto scheme = static_cast<Scheme>(scheme_tag);

  const std::size_t params_off = r.off;
  double p0 = r.f64("scheme params");
  double p1 = 0.0;
  if (scheme != Scheme::variable_bias) p1 = r.f64("scheme params");
  const double omega0 = r.f64("omega0");
  const double amp_bound = r.f64("amp_bound");
  const double t_first = r.f64("t_first");

  const std::size_t bits_off = r.off;
  const int bits = r.u8("bits per interval");
  if (bits < 1 || bits > kMaxStreamBits)
    throw FormatError("bits per interval out of range: " + std::to_string(bits),
                      bits_off);
  const std::uint32_t count = r.u32("interval count");

  const std::size_t cb_len_off = r.off;
  const std::uint32_t cb_len = r.u32("codebook length");
  r.need(cb_len, "codebook JSON");
  const std::string cb_json(reinterpret_cast<const char*>(bytes.data()) + r.off,
                            cb_len);
  const std::size_t cb_off = r.off;
  r.off += cb_len;

  Unpacked result;
  try {
    result.codebook = Codebook::from_json(cb_json);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("embedded codebook: ") + e.what(), cb_off);
  }
  if (result.codebook.bits != bits)
    throw FormatError("codebook bits disagree with header", cb_len_off);

  const std::uint64_t index_bits = static_cast<std::uint64_t>(count) * bits;
  const std::size_t index_bytes = static_cast<std::size_t>((index_bits + 7) / 8);
  if (bytes.size() - r.off != index_bytes) {
    throw FormatError("index section: expected " + std::to_string(index_bits) +
                          " bits (" + std::to_string(index_bytes) +
                          " bytes), found " +
                          std::to_string(bytes.size() - r.off) + " bytes",
                      r.off);
  }

  result.indices.reserve(count);
  std::uint64_t acc = 0;
  int nbits = 0;
  std::size_t pos = r.off;
  for (std::uint32_t i = 0; i < count; ++i) {
    while (nbits < bits) {
      acc = (acc << 8) | bytes[pos++];
      nbits += 8;
    }
    result.indices.push_back(
        static_cast<std::uint32_t>((acc >> (nbits - bits)) & ((1u << bits) - 1u)));
    nbits -= bits;
  }
  if (nbits > 0 && (acc & ((std::uint64_t{1} << nbits) - 1)) != 0)
    throw FormatError("nonzero padding bits in index section", pos - 1);

  try {
    SchemeParams sp;
    switch (scheme) {
      case Scheme::constant_bias:
        sp = ConstantBiasParams{p0, p1, amp_bound};
        break;
      case Scheme::variable_bias:
        sp = VariableBiasParams{p0, slope_bound(omega0, amp_bound)};
        break;
      case Scheme::linear_bias:
        sp = LinearBiasParams::from_thresholds(p0, p1, omega0, amp_bound);
        break;
    }
    result.params = CodecParams{sp, omega0, amp_bound};
    result.params.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("header params: ") + e.what(), params_off);
  }
  result.t_first = t_first;
  return result;
}

namespace {

Measurements replay_core(double t_first, std::span<const double> intervals,
                         const CodecParams& params, double extra_offset) {
  params.validate();
  const double delta = threshold_of(params.scheme);
  Measurements m;
  m.times.reserve(intervals.size() + 1);
  m.values.reserve(intervals.size());
  m.times.push_back(t_first);

  BiasSegment bias = initial_bias(params.scheme, params.amp_bound);
  for (std::size_t n = 0; n < intervals.size(); ++n) {
    const double duration = intervals[n];
    if (!(duration > 0.0))
      throw FormatError("replay: non-positive interval at position " +
                        std::to_string(n));
    const double bias_int = bias.integral(duration);
    m.values.push_back(delta - bias_int);
    m.times.push_back(m.times.back() + duration);
    const BiasState state{running_average(delta, duration, bias_int), duration};
    bias = next_bias(params.scheme, state);
    bias.offset += extra_offset;
  }
  return m;
}

}  // namespace

Measurements decoder_replay(double t_first, std::span<const double> intervals,
                            const CodecParams& params) {
  return replay_core(t_first, intervals, params, 0.0);
}

Measurements decoder_replay_matched(double t_first,
                                    std::span<const double> quantized_intervals,
                                    const CodecParams& params, const Codebook& cb) {
  const double inflation = 0.5 * params.epsilon() * cb.max_cell_width();
  return replay_core(t_first, quantized_intervals, params, inflation);
}

FiringRecord encode_matched(const BandlimitedSignal& f, const CodecParams& params,
                            double t_start, double t_end, const Codebook& cb,
                            double resolution) {
  params.validate();
  cb.validate();
  const IntervalBounds bounds = interval_bounds(params.scheme);
  const double delta = threshold_of(params.scheme);
  const double step = bounds.t_min / 8.0;
  const double inflation = 0.5 * params.epsilon() * cb.max_cell_width();

  FiringRecord record;
  record.scheme = scheme_of(params.scheme);
  record.t_first = t_start;

  double t_n = t_start;
  BiasSegment bias = initial_bias(params.scheme, f.amp_bound());
  for (;;) {
    RunningIntegral integral(f, t_n);
    const auto outcome = detail::solve_firing(
        [&](double t) { return integral(t); },
        [&](double t) { return f.evaluate(t); }, bias, t_n, delta, step,
        bounds.t_max, t_end, resolution);
    if (outcome.status == detail::FiringOutcome::Status::past_window) break;
    if (outcome.status == detail::FiringOutcome::Status::infeasible)
      throw InfeasibleError("encode_matched: integrand non-positive over a full span",
                            outcome.time);
    const double duration = outcome.time - t_n;
    record.intervals.push_back(duration);
    record.bias_trace.push_back(bias);

    // State recursion runs on the quantized interval, as the decoder will.
    const auto q = quantize(std::span<const double>(&duration, 1), cb);
    const double quantized = dequantize(q.indices, cb).front();
    const BiasState state{
        running_average(delta, quantized, bias.integral(quantized)), quantized};
    bias = next_bias(params.scheme, state);
    bias.offset += inflation;
    t_n = outcome.time;
  }
  return record;
}

}  // namespace temcodec
