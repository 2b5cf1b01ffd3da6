#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bitstream.hpp"
#include "quantizer.hpp"
#include "reconstruct.hpp"
#include "signal.hpp"
#include "tem.hpp"

namespace temcodec {

// Experiment manifest. Training and evaluation ensembles are disjoint by
// construction: signal i of the training set uses seed base_seed + i, signal
// j of the evaluation set uses seed base_seed + train_size + j.
struct ExperimentConfig {
  std::uint64_t base_seed = 1;
  int train_size = 100;
  int eval_size = 100;

  double omega0 = 314.15926535897932;  // 100 pi
  double amp_bound = 1.0;
  double t_start = -0.45;
  double t_end = 0.45;

  double lb_delta = 0.0314159;
  double lb_mu = 3.14159;
  double vb_delta = 0.0157;
  double conv_delta = 0.005;
  double conv_bias = 1.5;

  std::vector<int> bits = {1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<std::string> schemes = {"conv", "vb", "lb"};

  std::string roundtrip_scheme = "lb";
  int roundtrip_bits = 8;

  double guard = 0.05;
  double svd_cutoff = 1e-10;
  double resolution = 1e-9;
  std::string out_dir = ".";

  void validate() const;
  static ExperimentConfig from_json(const std::string& text);
  std::string to_canonical_json() const;
  std::uint64_t hash() const;  // FNV-1a over the canonical JSON

  SignalSpec train_spec(int i) const;
  SignalSpec eval_spec(int i) const;
  CodecParams params_for(Scheme scheme) const;
  int nyquist_count() const;  // samples at the Nyquist rate over the support
};

std::vector<BandlimitedSignal> make_ensemble(const ExperimentConfig& cfg,
                                             bool train);
std::vector<FiringRecord> encode_ensemble(const ExperimentConfig& cfg,
                                          const std::vector<BandlimitedSignal>& sigs,
                                          Scheme scheme);

// Quantize (codebook null = keep exact intervals), replay, reconstruct with
// the direct solver, and score against the reference.
double pipeline_nmse_db(const ExperimentConfig& cfg, const BandlimitedSignal& ref,
                        const FiringRecord& record, const CodecParams& params,
                        const Codebook* codebook);

struct RdRow {
  std::string scheme;
  std::string quantizer;  // "unquantized" | "uq" | "nuq"
  int bits = 0;           // 0 for the unquantized reference
  double mean_nmse_db = 0.0;
  double std_nmse_db = 0.0;
  double mean_firings = 0.0;
  std::string nuq_kind;  // winning design for nuq rows
};

// Trains codebooks on the training ensemble and scores the full pipeline on
// the evaluation ensemble for every (scheme, quantizer, bits) combination.
std::vector<RdRow> rate_distortion_table(const ExperimentConfig& cfg);

// CSV generators for the CLI commands. Every CSV starts with a comment line
// carrying the config hash and seed, then a header row.
std::string run_bounds_csv(const ExperimentConfig& cfg);
std::string run_counts_csv(const ExperimentConfig& cfg);
std::string run_density_csv(const ExperimentConfig& cfg);
std::string run_rate_distortion_csv(const ExperimentConfig& cfg);

struct RoundtripResult {
  std::vector<std::uint8_t> stream;
  std::string metrics_json;
};

// Single-signal encode -> pack -> unpack -> replay -> reconstruct demo with a
// uniform codebook over the scheme's analytic interval bounds.
RoundtripResult run_roundtrip(const ExperimentConfig& cfg,
                              const BandlimitedSignal& signal);

// Shortest round-trip decimal rendering (locale-independent).
std::string format_double(double v);

}  // namespace temcodec
