#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tem.hpp"

namespace temcodec {

enum class CodebookKind { uniform, lloyd_max, compander };

const char* codebook_kind_name(CodebookKind k);
CodebookKind codebook_kind_from_name(const std::string& name);

// Scalar interval quantizer: 2^bits strictly increasing reproduction levels
// and 2^bits - 1 decision boundaries interleaving them. Cell membership is
// decided by the boundaries; inputs exactly on a boundary take the lower
// index (fixed codec-wide tie-break).
struct Codebook {
  CodebookKind kind = CodebookKind::uniform;
  int bits = 0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::vector<double> levels;
  std::vector<double> boundaries;
  std::optional<double> exponent;  // compander power p

  std::size_t size() const { return levels.size(); }
  // Largest cell width, cells delimited by [t_min, boundaries..., t_max].
  double max_cell_width() const;
  void validate() const;

  // Canonical JSON (sorted keys, shortest round-trip doubles):
  // {"bits", "boundaries", "kind", "levels", "p"?, "range"}.
  std::string to_json() const;
  static Codebook from_json(const std::string& text);

  bool operator==(const Codebook&) const = default;
};

// Pooled firing intervals from a training ensemble.
struct IntervalSamples {
  std::vector<double> values;
  Scheme source = Scheme::constant_bias;
  int ensemble_size = 0;
};

// Equal-width cells over [t_min, t_max], levels at cell midpoints.
Codebook uq_design(double t_min, double t_max, int bits);

// Alternating nearest-level partition / cell-centroid updates until the
// relative distortion change drops below tol. Empty cells are re-seeded by
// splitting the cell with the largest distortion. When distortion_trace is
// given it receives the per-iteration mean squared distortion.
Codebook lloyd_max_design(const IntervalSamples& samples, int bits,
                          double tol = 1e-9, int max_iter = 500,
                          std::vector<double>* distortion_trace = nullptr);

inline constexpr double kDefaultCompanderExponents[] = {0.25, 0.5, 1.0,
                                                        2.0,  3.0, 4.0};

// Power-law compander over the sample extrema: maps through
// ((x - t_min) / (t_max - t_min))^p, quantizes uniformly in the mapped
// domain, and keeps the exponent with the lowest distortion on the samples.
Codebook compander_design(const IntervalSamples& samples, int bits,
                          std::span<const double> exponents =
                              kDefaultCompanderExponents);

struct QuantizeResult {
  std::vector<std::uint32_t> indices;
  std::size_t clamped = 0;  // inputs outside [t_min, t_max]
};

QuantizeResult quantize(std::span<const double> intervals, const Codebook& cb);

std::vector<double> dequantize(std::span<const std::uint32_t> indices,
                               const Codebook& cb);

// Mean squared reproduction error of the codebook on the samples.
double quantizer_distortion(std::span<const double> samples, const Codebook& cb);

struct NuqSelection {
  Codebook codebook;
  double lloyd_max_nmse_db = 0.0;
  double compander_nmse_db = 0.0;
};

// Trains both non-uniform designs on the pooled training intervals and keeps
// the one with lower validation score (ties go to Lloyd-Max). The callback
// runs the full encode -> quantize -> decode -> reconstruct pipeline on the
// validation ensemble and returns its mean NMSE in dB.
NuqSelection select_best_nuq(
    const IntervalSamples& training, int bits,
    const std::function<double(const Codebook&)>& validation_nmse_db);

}  // namespace temcodec
