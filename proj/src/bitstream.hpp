#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "quantizer.hpp"
#include "tem.hpp"

namespace temcodec {

// Header unit shared by encoder and decoder: the scheme thresholds plus the
// signal-class constants (omega0, amp_bound) they were designed against.
struct CodecParams {
  SchemeParams scheme;
  double omega0 = 0.0;
  double amp_bound = 0.0;

  void validate() const;
  double epsilon() const { return slope_bound(omega0, amp_bound); }
};

// Firing times recovered by the decoder and the signal integrals over the
// gaps between them: values[n] = integral of f over [times[n], times[n+1]].
struct Measurements {
  std::vector<double> times;   // strictly increasing, size n + 1
  std::vector<double> values;  // size n
};

// .tem1 byte layout (normative, little-endian IEEE-754 doubles):
//   "TEM1" | scheme u8 (0=conv, 1=vb, 2=lb)
//   | scheme params f64...: conv: delta_c, b; vb: delta_v; lb: delta, mu
//   | omega0 f64 | amp_bound f64 | t_first f64
//   | R u8 | count u32 | codebook_json_len u32 | codebook_json bytes
//   | packed indices, R bits each, MSB-first, zero-padded to a byte.
std::vector<std::uint8_t> pack(const FiringRecord& record, const Codebook& cb,
                               const CodecParams& params);

struct Unpacked {
  std::vector<std::uint32_t> indices;
  Codebook codebook;
  CodecParams params;
  double t_first = 0.0;
};

// Exact inverse of pack. Throws FormatError (with the byte offset) on bad
// magic, truncation, length mismatches, or inconsistent header fields.
Unpacked unpack(std::span<const std::uint8_t> bytes);

// Replays the encoder's bias recursion from (t_first, intervals) alone and
// emits the implied signal integrals. With exact intervals this reproduces
// the encoder state exactly; with quantized intervals the state mismatch
// propagates and is what the rate-distortion experiments measure.
// Throws FormatError on a non-positive interval.
Measurements decoder_replay(double t_first, std::span<const double> intervals,
                            const CodecParams& params);

// Matched quantization-state mode: the bias recursion (encoder- and
// decoder-side) is driven by quantized intervals, with the bias offset
// inflated by epsilon * q / 2 (q = largest codebook cell) so feasibility
// survives the state error. decoder_replay_matched mirrors encode_matched.
FiringRecord encode_matched(const BandlimitedSignal& f, const CodecParams& params,
                            double t_start, double t_end, const Codebook& cb,
                            double resolution = 1e-9);
Measurements decoder_replay_matched(double t_first,
                                    std::span<const double> quantized_intervals,
                                    const CodecParams& params, const Codebook& cb);

}  // namespace temcodec
