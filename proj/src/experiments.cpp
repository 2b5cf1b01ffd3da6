#include "experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "parallel.hpp"

namespace temcodec {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void ExperimentConfig::validate() const {
  require(train_size >= 1 && eval_size >= 1, "config: ensemble sizes must be >= 1");
  require(omega0 > 0.0 && amp_bound > 0.0, "config: invalid signal class");
  require(t_start < t_end, "config: invalid support");
  require(!bits.empty(), "config: empty bit budget list");
  for (int r : bits) require(r >= 1 && r <= 20, "config: bits out of range");
  require(roundtrip_bits >= 1 && roundtrip_bits <= 20,
          "config: roundtrip bits out of range");
  require(!schemes.empty(), "config: empty scheme list");
  for (const auto& s : schemes) scheme_from_name(s);
  scheme_from_name(roundtrip_scheme);
  require(guard >= 0.0, "config: guard must be non-negative");
  require(svd_cutoff > 0.0 && svd_cutoff < 1.0, "config: cutoff in (0,1)");
  require(resolution > 0.0, "config: resolution must be positive");
  for (const auto& name : schemes) params_for(scheme_from_name(name)).validate();
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded(), "config JSON: parse error");
  require(j.is_object(), "config JSON: not an object");

  static const char* known[] = {"seed",   "train_size", "eval_size", "signal",
                                "lb",     "vb",         "conv",      "bits",
                                "schemes", "roundtrip",  "out_dir"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
          return key == k;
        }) == std::end(known)) {
      throw std::invalid_argument("config JSON: unknown key \"" + key + "\"");
    }
  }

  ExperimentConfig cfg;
  if (j.contains("seed")) cfg.base_seed = j["seed"].get<std::uint64_t>();
  if (j.contains("train_size")) cfg.train_size = j["train_size"].get<int>();
  if (j.contains("eval_size")) cfg.eval_size = j["eval_size"].get<int>();
  if (j.contains("signal")) {
    const auto& s = j["signal"];
    if (s.contains("omega0")) cfg.omega0 = s["omega0"].get<double>();
    if (s.contains("c")) cfg.amp_bound = s["c"].get<double>();
    if (s.contains("t_start")) cfg.t_start = s["t_start"].get<double>();
    if (s.contains("t_end")) cfg.t_end = s["t_end"].get<double>();
  }
  if (j.contains("lb")) {
    if (j["lb"].contains("delta")) cfg.lb_delta = j["lb"]["delta"].get<double>();
    if (j["lb"].contains("mu")) cfg.lb_mu = j["lb"]["mu"].get<double>();
  }
  if (j.contains("vb") && j["vb"].contains("delta_v"))
    cfg.vb_delta = j["vb"]["delta_v"].get<double>();
  if (j.contains("conv")) {
    if (j["conv"].contains("delta_c")) cfg.conv_delta = j["conv"]["delta_c"].get<double>();
    if (j["conv"].contains("b")) cfg.conv_bias = j["conv"]["b"].get<double>();
  }
  if (j.contains("bits")) cfg.bits = j["bits"].get<std::vector<int>>();
  if (j.contains("schemes")) cfg.schemes = j["schemes"].get<std::vector<std::string>>();
  if (j.contains("roundtrip")) {
    if (j["roundtrip"].contains("scheme"))
      cfg.roundtrip_scheme = j["roundtrip"]["scheme"].get<std::string>();
    if (j["roundtrip"].contains("bits"))
      cfg.roundtrip_bits = j["roundtrip"]["bits"].get<int>();
  }
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  cfg.validate();
  return cfg;
}

std::string ExperimentConfig::to_canonical_json() const {
  nlohmann::json j;
  j["seed"] = base_seed;
  j["train_size"] = train_size;
  j["eval_size"] = eval_size;
  j["signal"] = {{"omega0", omega0}, {"c", amp_bound},
                 {"t_start", t_start}, {"t_end", t_end}};
  j["lb"] = {{"delta", lb_delta}, {"mu", lb_mu}};
  j["vb"] = {{"delta_v", vb_delta}};
  j["conv"] = {{"delta_c", conv_delta}, {"b", conv_bias}};
  j["bits"] = bits;
  j["schemes"] = schemes;
  j["roundtrip"] = {{"scheme", roundtrip_scheme}, {"bits", roundtrip_bits}};
  j["out_dir"] = out_dir;
  return j.dump();
}

std::uint64_t ExperimentConfig::hash() const {
  const std::string text = to_canonical_json();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

SignalSpec ExperimentConfig::train_spec(int i) const {
  return {omega0, amp_bound, t_start, t_end,
          base_seed + static_cast<std::uint64_t>(i)};
}

SignalSpec ExperimentConfig::eval_spec(int i) const {
  return {omega0, amp_bound, t_start, t_end,
          base_seed + static_cast<std::uint64_t>(train_size) +
              static_cast<std::uint64_t>(i)};
}

CodecParams ExperimentConfig::params_for(Scheme scheme) const {
  switch (scheme) {
    case Scheme::constant_bias:
      return {ConstantBiasParams{conv_delta, conv_bias, amp_bound}, omega0,
              amp_bound};
    case Scheme::variable_bias:
      return {VariableBiasParams{vb_delta, slope_bound(omega0, amp_bound)},
              omega0, amp_bound};
    case Scheme::linear_bias:
      return {LinearBiasParams::from_thresholds(lb_delta, lb_mu, omega0, amp_bound),
              omega0, amp_bound};
  }
  throw std::invalid_argument("params_for: unknown scheme");
}

int ExperimentConfig::nyquist_count() const {
  return static_cast<int>(
      std::llround((t_end - t_start) / nyquist_period(omega0)));
}

std::vector<BandlimitedSignal> make_ensemble(const ExperimentConfig& cfg,
                                             bool train) {
  const int n = train ? cfg.train_size : cfg.eval_size;
  std::vector<BandlimitedSignal> out(
      static_cast<std::size_t>(n), BandlimitedSignal(1.0, 0.0, 0.0, {0.0}));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const auto spec = train ? cfg.train_spec(static_cast<int>(i))
                            : cfg.eval_spec(static_cast<int>(i));
    out[i] = generate(spec);
  });
  return out;
}

std::vector<FiringRecord> encode_ensemble(const ExperimentConfig& cfg,
                                          const std::vector<BandlimitedSignal>& sigs,
                                          Scheme scheme) {
  const CodecParams params = cfg.params_for(scheme);
  std::vector<FiringRecord> out(sigs.size());
  parallel_for(sigs.size(), [&](std::size_t i) {
    out[i] = encode(sigs[i], params.scheme, cfg.t_start, cfg.t_end, cfg.resolution);
  });
  return out;
}

double pipeline_nmse_db(const ExperimentConfig& cfg, const BandlimitedSignal& ref,
                        const FiringRecord& record, const CodecParams& params,
                        const Codebook* codebook) {
  std::vector<double> intervals;
  if (codebook != nullptr) {
    const auto q = quantize(record.intervals, *codebook);
    intervals = dequantize(q.indices, *codebook);
  } else {
    intervals = record.intervals;
  }
  const Measurements m = decoder_replay(record.t_first, intervals, params);
  ReconConfig rc = ReconConfig::for_times(cfg.omega0, m.times.front(), m.times.back());
  rc.svd_cutoff = cfg.svd_cutoff;
  rc.guard = cfg.guard;
  const ReconResult res = reconstruct(m, rc);
  return nmse_db(ref, res.estimate, cfg.guard);
}

namespace {

std::string csv_preamble(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# config_hash=" << std::hex << cfg.hash() << std::dec
     << " seed=" << cfg.base_seed << "\n";
  return os.str();
}

std::vector<double> steady_intervals(const FiringRecord& r, Scheme scheme) {
  // The first interval of the state-recursion schemes uses the bootstrap
  // bias, so bound statistics skip it.
  const bool skip_first = scheme != Scheme::constant_bias && r.intervals.size() > 1;
  return {r.intervals.begin() + (skip_first ? 1 : 0), r.intervals.end()};
}

}  // namespace

std::string run_bounds_csv(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto sigs = make_ensemble(cfg, /*train=*/false);
  std::ostringstream os;
  os << csv_preamble(cfg)
     << "scheme,analytic_t_min_s,analytic_t_max_s,analytic_t_range_s,"
        "empirical_min_s,empirical_max_s,contained\n";
  for (const auto& name : cfg.schemes) {
    const Scheme scheme = scheme_from_name(name);
    const CodecParams params = cfg.params_for(scheme);
    const IntervalBounds b = interval_bounds(params.scheme);
    const auto records = encode_ensemble(cfg, sigs, scheme);
    double emp_min = std::numeric_limits<double>::infinity();
    double emp_max = -emp_min;
    for (const auto& r : records) {
      for (const double t : steady_intervals(r, scheme)) {
        emp_min = std::min(emp_min, t);
        emp_max = std::max(emp_max, t);
      }
    }
    const bool contained = emp_min >= b.t_min - 1e-9 && emp_max <= b.t_max + 1e-9;
    os << name << ',' << format_double(b.t_min) << ',' << format_double(b.t_max)
       << ',' << format_double(b.range()) << ',' << format_double(emp_min) << ','
       << format_double(emp_max) << ',' << (contained ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string run_counts_csv(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto sigs = make_ensemble(cfg, /*train=*/false);
  std::ostringstream os;
  os << csv_preamble(cfg)
     << "scheme,mean_firings,std_firings,nyquist_count,mean_oversampling\n";
  const int nyq = cfg.nyquist_count();
  for (const auto& name : cfg.schemes) {
    const Scheme scheme = scheme_from_name(name);
    const auto records = encode_ensemble(cfg, sigs, scheme);
    std::vector<double> counts;
    counts.reserve(records.size());
    for (const auto& r : records)
      counts.push_back(static_cast<double>(r.intervals.size()));
    const double mean = mean_of(counts);
    os << name << ',' << format_double(mean) << ','
       << format_double(stddev_of(counts)) << ',' << nyq << ','
       << format_double(mean / static_cast<double>(nyq)) << "\n";
  }
  return os.str();
}

std::string run_density_csv(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto sigs = make_ensemble(cfg, /*train=*/false);
  std::ostringstream os;
  os << csv_preamble(cfg) << "scheme,signal,spread_hz,rate_min_hz,rate_max_hz\n";
  for (const auto& name : cfg.schemes) {
    const Scheme scheme = scheme_from_name(name);
    const auto records = encode_ensemble(cfg, sigs, scheme);
    std::vector<double> spreads, mins, maxs;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const DensityStats d = firing_density(records[i]);
      spreads.push_back(d.spread);
      mins.push_back(d.min);
      maxs.push_back(d.max);
      os << name << ',' << i << ',' << format_double(d.spread) << ','
         << format_double(d.min) << ',' << format_double(d.max) << "\n";
    }
    os << name << ",mean," << format_double(mean_of(spreads)) << ','
       << format_double(mean_of(mins)) << ',' << format_double(mean_of(maxs))
       << "\n";
  }
  return os.str();
}

std::vector<RdRow> rate_distortion_table(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto train_sigs = make_ensemble(cfg, /*train=*/true);
  const auto eval_sigs = make_ensemble(cfg, /*train=*/false);

  std::vector<RdRow> rows;
  for (const auto& name : cfg.schemes) {
    const Scheme scheme = scheme_from_name(name);
    const CodecParams params = cfg.params_for(scheme);
    const IntervalBounds bounds = interval_bounds(params.scheme);
    const auto train_records = encode_ensemble(cfg, train_sigs, scheme);
    const auto eval_records = encode_ensemble(cfg, eval_sigs, scheme);

    IntervalSamples pool;
    pool.source = scheme;
    pool.ensemble_size = cfg.train_size;
    for (const auto& r : train_records)
      pool.values.insert(pool.values.end(), r.intervals.begin(), r.intervals.end());

    double mean_firings = 0.0;
    for (const auto& r : eval_records)
      mean_firings += static_cast<double>(r.intervals.size());
    mean_firings /= static_cast<double>(eval_records.size());

    const auto evaluate = [&](const Codebook* cb) {
      std::vector<double> scores(eval_sigs.size());
      parallel_for(eval_sigs.size(), [&](std::size_t i) {
        scores[i] = pipeline_nmse_db(cfg, eval_sigs[i], eval_records[i], params, cb);
      });
      return scores;
    };

    const auto unq = evaluate(nullptr);
    rows.push_back({name, "unquantized", 0, mean_of(unq), stddev_of(unq),
                    mean_firings, ""});

    for (const int r : cfg.bits) {
      const Codebook uq = uq_design(bounds.t_min, bounds.t_max, r);
      const auto uq_scores = evaluate(&uq);
      rows.push_back({name, "uq", r, mean_of(uq_scores), stddev_of(uq_scores),
                      mean_firings, ""});

      const NuqSelection sel = select_best_nuq(
          pool, r, [&](const Codebook& cb) { return mean_of(evaluate(&cb)); });
      const auto nuq_scores = evaluate(&sel.codebook);
      rows.push_back({name, "nuq", r, mean_of(nuq_scores),
                      stddev_of(nuq_scores), mean_firings,
                      codebook_kind_name(sel.codebook.kind)});
    }
  }
  return rows;
}

std::string run_rate_distortion_csv(const ExperimentConfig& cfg) {
  const auto rows = rate_distortion_table(cfg);
  std::ostringstream os;
  os << csv_preamble(cfg)
     << "scheme,quantizer,bits,mean_nmse_db,std_nmse_db,mean_firings,nuq_kind\n";
  for (const auto& row : rows) {
    os << row.scheme << ',' << row.quantizer << ',' << row.bits << ','
       << format_double(row.mean_nmse_db) << ',' << format_double(row.std_nmse_db)
       << ',' << format_double(row.mean_firings) << ',' << row.nuq_kind << "\n";
  }
  return os.str();
}

RoundtripResult run_roundtrip(const ExperimentConfig& cfg,
                              const BandlimitedSignal& signal) {
  cfg.validate();
  require(std::fabs(signal.omega0() - cfg.omega0) <=
              1e-9 * std::max(1.0, cfg.omega0),
          "roundtrip: signal bandwidth disagrees with config");

  const Scheme scheme = scheme_from_name(cfg.roundtrip_scheme);
  const CodecParams params = cfg.params_for(scheme);
  const IntervalBounds bounds = interval_bounds(params.scheme);
  const auto [sup_lo, sup_hi] = signal.nominal_support();
  const double t0 = std::max(sup_lo, cfg.t_start);
  const double t1 = std::min(sup_hi, cfg.t_end);

  const FiringRecord record = encode(signal, params.scheme, t0, t1, cfg.resolution);
  const Codebook cb = uq_design(bounds.t_min, bounds.t_max, cfg.roundtrip_bits);
  const auto q = quantize(record.intervals, cb);

  RoundtripResult out;
  out.stream = pack(record, cb, params);

  const Unpacked u = unpack(out.stream);
  const auto intervals = dequantize(u.indices, u.codebook);
  const Measurements m = decoder_replay(u.t_first, intervals, u.params);
  ReconConfig rc = ReconConfig::for_times(cfg.omega0, m.times.front(), m.times.back());
  rc.svd_cutoff = cfg.svd_cutoff;
  rc.guard = cfg.guard;
  const ReconResult res = reconstruct(m, rc);

  double score;
  try {
    score = nmse_db(signal, res.estimate, cfg.guard);
  } catch (const std::invalid_argument&) {
    score = -200.0;  // zero-energy reference: report the clamp floor
  }

  nlohmann::json metrics;
  metrics["nmse_db"] = score;
  metrics["n_firings"] = record.intervals.size();
  metrics["residual"] = res.residual;
  metrics["solver"] = res.solver;
  metrics["iterations"] = res.iterations;
  metrics["scheme"] = cfg.roundtrip_scheme;
  metrics["bits_per_interval"] = cfg.roundtrip_bits;
  metrics["stream_bytes"] = out.stream.size();
  metrics["clamped"] = q.clamped;
  metrics["quantizer"] = codebook_kind_name(cb.kind);
  out.metrics_json = metrics.dump();
  return out;
}

}  // namespace temcodec
