#include "quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace temcodec {

namespace {

constexpr int kMaxBits = 20;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

std::size_t level_count(int bits) {
  require(bits >= 1 && bits <= kMaxBits, "codebook bits out of range");
  return std::size_t{1} << bits;
}

std::vector<double> midpoint_boundaries(const std::vector<double>& levels) {
  std::vector<double> b(levels.size() - 1);
  for (std::size_t i = 0; i + 1 < levels.size(); ++i)
    b[i] = 0.5 * (levels[i] + levels[i + 1]);
  return b;
}

// Cell index: number of boundaries strictly below x; inputs exactly on a
// boundary take the lower cell.
std::size_t cell_index(const std::vector<double>& boundaries, double x) {
  return static_cast<std::size_t>(
      std::lower_bound(boundaries.begin(), boundaries.end(), x) -
      boundaries.begin());
}

double mean_of(const std::vector<double>& xs, std::size_t lo, std::size_t hi) {
  return std::accumulate(xs.begin() + static_cast<std::ptrdiff_t>(lo),
                         xs.begin() + static_cast<std::ptrdiff_t>(hi), 0.0) /
         static_cast<double>(hi - lo);
}

// Strictly increasing levels for a sample set with at most 2^bits distinct
// values: the values themselves padded upward by a vanishing step. Exact
// reproduction, zero distortion.
Codebook exact_codebook(CodebookKind kind, int bits,
                        const std::vector<double>& uniques) {
  const std::size_t n = level_count(bits);
  Codebook cb;
  cb.kind = kind;
  cb.bits = bits;
  cb.levels = uniques;
  const double top = uniques.back();
  const double pad = std::max(std::fabs(top), 1.0) * 1e-12;
  for (std::size_t i = uniques.size(); i < n; ++i)
    cb.levels.push_back(top + pad * static_cast<double>(i - uniques.size() + 1));
  cb.boundaries = midpoint_boundaries(cb.levels);
  cb.t_min = uniques.front();
  cb.t_max = std::max(top, cb.levels.back());
  if (kind == CodebookKind::compander) cb.exponent = 1.0;
  return cb;
}

}  // namespace

const char* codebook_kind_name(CodebookKind k) {
  switch (k) {
    case CodebookKind::uniform: return "uniform";
    case CodebookKind::lloyd_max: return "lloyd-max";
    case CodebookKind::compander: return "compander";
  }
  throw std::invalid_argument("codebook_kind_name: unknown kind");
}

CodebookKind codebook_kind_from_name(const std::string& name) {
  if (name == "uniform") return CodebookKind::uniform;
  if (name == "lloyd-max") return CodebookKind::lloyd_max;
  if (name == "compander") return CodebookKind::compander;
  throw std::invalid_argument("unknown codebook kind: " + name);
}

double Codebook::max_cell_width() const {
  double widest = 0.0;
  double lo = t_min;
  for (std::size_t i = 0; i <= boundaries.size(); ++i) {
    const double hi = i < boundaries.size() ? boundaries[i] : t_max;
    widest = std::max(widest, hi - lo);
    lo = hi;
  }
  return widest;
}

void Codebook::validate() const {
  const std::size_t n = level_count(bits);
  require(levels.size() == n, "Codebook: wrong level count");
  require(boundaries.size() == n - 1, "Codebook: wrong boundary count");
  require(t_min < t_max, "Codebook: invalid range");
  const double tol = 1e-12 * std::max(1.0, t_max - t_min);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    require(levels[i] < levels[i + 1], "Codebook: levels not strictly increasing");
    require(boundaries[i] > levels[i] && boundaries[i] < levels[i + 1],
            "Codebook: boundary outside its level pair");
  }
  require(levels.front() >= t_min - tol && levels.back() <= t_max + tol,
          "Codebook: level outside range");
  require((kind == CodebookKind::compander) == exponent.has_value(),
          "Codebook: exponent present iff compander");
}

std::string Codebook::to_json() const {
  nlohmann::json j;
  j["kind"] = codebook_kind_name(kind);
  j["R"] = bits;
  j["range"] = {t_min, t_max};
  j["levels"] = levels;
  j["boundaries"] = boundaries;
  if (exponent) j["p"] = *exponent;
  return j.dump();
}

Codebook Codebook::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded(), "codebook JSON: parse error");
  require(j.is_object() && j.contains("kind") && j.contains("R") &&
              j.contains("range") && j.contains("levels") &&
              j.contains("boundaries"),
          "codebook JSON: missing field");
  Codebook cb;
  cb.kind = codebook_kind_from_name(j["kind"].get<std::string>());
  cb.bits = j["R"].get<int>();
  const auto range = j["range"].get<std::vector<double>>();
  require(range.size() == 2, "codebook JSON: range must have two entries");
  cb.t_min = range[0];
  cb.t_max = range[1];
  cb.levels = j["levels"].get<std::vector<double>>();
  cb.boundaries = j["boundaries"].get<std::vector<double>>();
  if (j.contains("p")) cb.exponent = j["p"].get<double>();
  cb.validate();
  return cb;
}

Codebook uq_design(double t_min, double t_max, int bits) {
  const std::size_t n = level_count(bits);
  require(t_min < t_max, "uq_design: need t_min < t_max");
  Codebook cb;
  cb.kind = CodebookKind::uniform;
  cb.bits = bits;
  cb.t_min = t_min;
  cb.t_max = t_max;
  const double w = (t_max - t_min) / static_cast<double>(n);
  cb.levels.resize(n);
  cb.boundaries.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    cb.levels[i] = t_min + (static_cast<double>(i) + 0.5) * w;
  for (std::size_t i = 0; i + 1 < n; ++i)
    cb.boundaries[i] = t_min + static_cast<double>(i + 1) * w;
  return cb;
}

namespace {

// Partition of sorted samples by boundaries: cell c holds indices
// [starts[c], starts[c+1]). Samples equal to a boundary stay in the lower
// cell, matching cell_index.
std::vector<std::size_t> partition_starts(const std::vector<double>& xs,
                                          const std::vector<double>& boundaries) {
  std::vector<std::size_t> starts(boundaries.size() + 2, 0);
  for (std::size_t c = 0; c < boundaries.size(); ++c) {
    starts[c + 1] = static_cast<std::size_t>(
        std::upper_bound(xs.begin(), xs.end(), boundaries[c]) - xs.begin());
  }
  starts.back() = xs.size();
  return starts;
}

double cell_sse(const std::vector<double>& xs, std::size_t lo, std::size_t hi,
                double level) {
  double sse = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double e = xs[i] - level;
    sse += e * e;
  }
  return sse;
}

// Splits the occupied cell with the largest squared error into its lower and
// upper halves (means are distinct by construction) and drops the level of
// the empty cell `c`. Keeps the level count and strict ordering.
void reseed_empty_cell(const std::vector<double>& xs,
                       std::vector<double>& levels,
                       const std::vector<std::size_t>& starts, std::size_t c) {
  const std::size_t n = levels.size();
  std::size_t donor = n;
  double worst = -1.0;
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t lo = starts[d], hi = starts[d + 1];
    if (hi <= lo || xs[lo] == xs[hi - 1]) continue;  // needs 2 distinct values
    const double sse = cell_sse(xs, lo, hi, levels[d]);
    if (sse > worst) {
      worst = sse;
      donor = d;
    }
  }
  if (donor == n) throw std::invalid_argument("lloyd_max_design: no splittable cell");

  const std::size_t lo = starts[donor], hi = starts[donor + 1];
  std::size_t split = lo + (hi - lo) / 2;
  double lower = mean_of(xs, lo, split);
  double upper = mean_of(xs, split, hi);
  if (!(lower < upper)) {
    // Halves shared one value; split at the first change point instead.
    split = lo + 1;
    while (split < hi && xs[split] == xs[lo]) ++split;
    lower = mean_of(xs, lo, split);
    upper = mean_of(xs, split, hi);
  }
  std::vector<double> next;
  next.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == c) continue;  // drop the empty cell's level
    if (i == donor) {
      next.push_back(lower);
      next.push_back(upper);
    } else {
      next.push_back(levels[i]);
    }
  }
  std::sort(next.begin(), next.end());
  levels = std::move(next);
}

}  // namespace

Codebook lloyd_max_design(const IntervalSamples& samples, int bits, double tol,
                          int max_iter, std::vector<double>* distortion_trace) {
  const std::size_t n = level_count(bits);
  require(samples.values.size() >= n, "lloyd_max_design: too few samples");
  require(tol >= 0.0 && max_iter >= 1, "lloyd_max_design: bad tol/max_iter");

  std::vector<double> xs = samples.values;
  for (double x : xs) require(std::isfinite(x), "lloyd_max_design: non-finite sample");
  std::sort(xs.begin(), xs.end());
  std::vector<double> uniques = xs;
  uniques.erase(std::unique(uniques.begin(), uniques.end()), uniques.end());
  if (uniques.size() <= n) {
    auto cb = exact_codebook(CodebookKind::lloyd_max, bits, uniques);
    if (distortion_trace) distortion_trace->push_back(0.0);
    return cb;
  }

  // Quantile initialization, density-aware and deterministic.
  std::vector<double> levels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(
        static_cast<double>(2 * i + 1) / static_cast<double>(2 * n) *
        static_cast<double>(xs.size()));
    levels[i] = xs[std::min(idx, xs.size() - 1)];
  }
  if (std::adjacent_find(levels.begin(), levels.end()) != levels.end()) {
    // Heavy duplicate mass; spread over distinct values instead.
    for (std::size_t i = 0; i < n; ++i)
      levels[i] = uniques[(2 * i + 1) * uniques.size() / (2 * n)];
    require(std::adjacent_find(levels.begin(), levels.end()) == levels.end(),
            "lloyd_max_design: failed to build distinct initial levels");
  }

  double prev_d = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    auto boundaries = midpoint_boundaries(levels);
    auto starts = partition_starts(xs, boundaries);

    bool any_empty = true;
    for (std::size_t guard = 0; guard <= 2 * n && any_empty; ++guard) {
      std::size_t empty = n;
      for (std::size_t c = 0; c < n; ++c) {
        if (starts[c + 1] == starts[c]) {
          empty = c;
          break;
        }
      }
      any_empty = empty != n;
      if (!any_empty) break;
      reseed_empty_cell(xs, levels, starts, empty);
      boundaries = midpoint_boundaries(levels);
      starts = partition_starts(xs, boundaries);
    }
    if (any_empty)
      throw std::runtime_error("lloyd_max_design: could not fill empty cells");

    for (std::size_t c = 0; c < n; ++c)
      levels[c] = mean_of(xs, starts[c], starts[c + 1]);
    boundaries = midpoint_boundaries(levels);

    double sse = 0.0;
    for (std::size_t c = 0; c < n; ++c)
      sse += cell_sse(xs, starts[c], starts[c + 1], levels[c]);
    const double d = sse / static_cast<double>(xs.size());
    if (distortion_trace) distortion_trace->push_back(d);
    if (d == 0.0 || (std::isfinite(prev_d) && prev_d - d <= tol * prev_d)) break;
    prev_d = d;
  }

  Codebook cb;
  cb.kind = CodebookKind::lloyd_max;
  cb.bits = bits;
  cb.t_min = xs.front();
  cb.t_max = xs.back();
  cb.levels = std::move(levels);
  cb.boundaries = midpoint_boundaries(cb.levels);
  cb.validate();
  return cb;
}

Codebook compander_design(const IntervalSamples& samples, int bits,
                          std::span<const double> exponents) {
  const std::size_t n = level_count(bits);
  require(!samples.values.empty(), "compander_design: empty samples");
  require(!exponents.empty(), "compander_design: empty exponent grid");
  for (double p : exponents)
    require(p > 0.0, "compander_design: exponents must be positive");

  std::vector<double> xs = samples.values;
  for (double x : xs) require(std::isfinite(x), "compander_design: non-finite sample");
  std::sort(xs.begin(), xs.end());
  const double lo = xs.front(), hi = xs.back();
  if (lo == hi) return exact_codebook(CodebookKind::compander, bits, {lo});

  Codebook best;
  double best_d = std::numeric_limits<double>::infinity();
  const double range = hi - lo;
  for (const double p : exponents) {
    Codebook cb;
    cb.kind = CodebookKind::compander;
    cb.bits = bits;
    cb.t_min = lo;
    cb.t_max = hi;
    cb.exponent = p;
    cb.levels.resize(n);
    cb.boundaries.resize(n - 1);
    const double inv_p = 1.0 / p;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      cb.levels[i] = lo + range * std::pow(m, inv_p);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double m = static_cast<double>(i + 1) / static_cast<double>(n);
      cb.boundaries[i] = lo + range * std::pow(m, inv_p);
    }
    double sse = 0.0;
    for (double x : xs) {
      const double e = x - cb.levels[cell_index(cb.boundaries, x)];
      sse += e * e;
    }
    const double d = sse / static_cast<double>(xs.size());
    if (d < best_d) {
      best_d = d;
      best = std::move(cb);
    }
  }
  best.validate();
  return best;
}

QuantizeResult quantize(std::span<const double> intervals, const Codebook& cb) {
  QuantizeResult out;
  out.indices.reserve(intervals.size());
  for (const double x : intervals) {
    out.indices.push_back(static_cast<std::uint32_t>(cell_index(cb.boundaries, x)));
    if (x < cb.t_min || x > cb.t_max) ++out.clamped;
  }
  return out;
}

std::vector<double> dequantize(std::span<const std::uint32_t> indices,
                               const Codebook& cb) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (const std::uint32_t i : indices) {
    require(i < cb.levels.size(), "dequantize: index out of range");
    out.push_back(cb.levels[i]);
  }
  return out;
}

double quantizer_distortion(std::span<const double> samples, const Codebook& cb) {
  require(!samples.empty(), "quantizer_distortion: empty samples");
  double sse = 0.0;
  for (const double x : samples) {
    const double e = x - cb.levels[cell_index(cb.boundaries, x)];
    sse += e * e;
  }
  return sse / static_cast<double>(samples.size());
}

NuqSelection select_best_nuq(
    const IntervalSamples& training, int bits,
    const std::function<double(const Codebook&)>& validation_nmse_db) {
  require(static_cast<bool>(validation_nmse_db),
          "select_best_nuq: missing validation callback");
  Codebook lloyd = lloyd_max_design(training, bits);
  Codebook comp = compander_design(training, bits);
  NuqSelection sel;
  sel.lloyd_max_nmse_db = validation_nmse_db(lloyd);
  sel.compander_nmse_db = validation_nmse_db(comp);
  sel.codebook = sel.lloyd_max_nmse_db <= sel.compander_nmse_db
                     ? std::move(lloyd)
                     : std::move(comp);
  return sel;
}

}  // namespace temcodec
