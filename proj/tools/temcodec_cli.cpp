// Command-line front end over the temcodec C API.
//
// Subcommands: bounds | counts | density | rd | roundtrip.
// Exit codes: 0 success, 2 configuration error, 3 pipeline error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "temcodec/temcodec.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitPipeline = 3;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> schemes;
  std::string bits;  // comma list for rd, single value for roundtrip
  std::string signal_path;
  bool has_seed = false;
  std::uint64_t seed = 0;
};

int config_error(const std::string& message) {
  std::cerr << "error: config: " << message << "\n";
  return kExitConfig;
}

int pipeline_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return kExitPipeline;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::string& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  return static_cast<bool>(out);
}

// Loads the config file (if any) and applies flag overrides; returns the
// JSON text handed to the library. Exits with code 2 on any config problem.
int build_config(const Options& opt, const std::string& command,
                 std::string& json_out, std::string& out_dir) {
  nlohmann::json cfg = nlohmann::json::object();
  if (!opt.config_path.empty()) {
    std::string text;
    if (!read_file(opt.config_path, text))
      return config_error("cannot read " + opt.config_path);
    cfg = nlohmann::json::parse(text, nullptr, false);
    if (cfg.is_discarded() || !cfg.is_object())
      return config_error("not a JSON object: " + opt.config_path);
  }
  if (opt.has_seed) cfg["seed"] = opt.seed;
  if (!opt.schemes.empty()) cfg["schemes"] = opt.schemes;
  if (!opt.bits.empty()) {
    std::vector<int> bits;
    std::stringstream ss(opt.bits);
    std::string part;
    while (std::getline(ss, part, ',')) {
      try {
        bits.push_back(std::stoi(part));
      } catch (const std::exception&) {
        return config_error("bad --bits value: " + part);
      }
    }
    if (bits.empty()) return config_error("empty --bits list");
    if (command == "roundtrip") {
      if (bits.size() != 1) return config_error("roundtrip takes a single --bits value");
      cfg["roundtrip"]["bits"] = bits.front();
    } else {
      cfg["bits"] = bits;
    }
  }
  if (command == "roundtrip" && !opt.schemes.empty()) {
    if (opt.schemes.size() != 1)
      return config_error("roundtrip takes a single --scheme");
    cfg["roundtrip"]["scheme"] = opt.schemes.front();
  }

  out_dir = ".";
  if (cfg.contains("out_dir")) {
    if (!cfg["out_dir"].is_string()) return config_error("out_dir must be a string");
    out_dir = cfg["out_dir"].get<std::string>();
  }
  if (!opt.out_dir.empty()) out_dir = opt.out_dir;
  cfg["out_dir"] = out_dir;
  json_out = cfg.dump();
  return 0;
}

int run_csv_command(const Options& opt, const std::string& command) {
  std::string cfg_json, out_dir;
  if (const int rc = build_config(opt, command, cfg_json, out_dir); rc != 0)
    return rc;

  char* csv = nullptr;
  const temcodec_status st =
      temcodec_experiment_csv(cfg_json.c_str(), command.c_str(), &csv);
  if (st != TEMCODEC_OK) {
    const std::string message = temcodec_last_error();
    return st == TEMCODEC_INVALID_ARGUMENT ? config_error(message)
                                           : pipeline_error(message);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::string path = out_dir + "/" + command + ".csv";
  const bool ok = write_file(path, csv, std::string(csv).size());
  temcodec_string_free(csv);
  if (!ok) return pipeline_error("cannot write " + path);
  std::cout << path << "\n";
  return 0;
}

// Convenience: writes a generated signal JSON so roundtrip has an input.
int run_generate(const Options& opt) {
  std::string cfg_json, out_dir;
  if (const int rc = build_config(opt, "generate", cfg_json, out_dir); rc != 0)
    return rc;
  const nlohmann::json cfg = nlohmann::json::parse(cfg_json);
  const double omega0 =
      cfg.contains("signal") && cfg["signal"].contains("omega0")
          ? cfg["signal"]["omega0"].get<double>()
          : 314.15926535897932;
  const double amp = cfg.contains("signal") && cfg["signal"].contains("c")
                         ? cfg["signal"]["c"].get<double>()
                         : 1.0;
  const double t0 = cfg.contains("signal") && cfg["signal"].contains("t_start")
                        ? cfg["signal"]["t_start"].get<double>()
                        : -0.45;
  const double t1 = cfg.contains("signal") && cfg["signal"].contains("t_end")
                        ? cfg["signal"]["t_end"].get<double>()
                        : 0.45;
  const std::uint64_t seed = opt.has_seed ? opt.seed : 1;

  temcodec_signal* signal = nullptr;
  if (temcodec_signal_generate(omega0, amp, t0, t1, seed, &signal) != TEMCODEC_OK)
    return pipeline_error(temcodec_last_error());
  char* json = nullptr;
  if (temcodec_signal_to_json(signal, &json) != TEMCODEC_OK) {
    temcodec_signal_free(signal);
    return pipeline_error(temcodec_last_error());
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::string path = out_dir + "/signal_" + std::to_string(seed) + ".json";
  const bool ok = write_file(path, json, std::string(json).size());
  temcodec_string_free(json);
  temcodec_signal_free(signal);
  if (!ok) return pipeline_error("cannot write " + path);
  std::cout << path << "\n";
  return 0;
}

int run_roundtrip(const Options& opt) {
  std::string cfg_json, out_dir;
  if (const int rc = build_config(opt, "roundtrip", cfg_json, out_dir); rc != 0)
    return rc;
  std::string signal_json;
  if (!read_file(opt.signal_path, signal_json))
    return config_error("cannot read signal file " + opt.signal_path);

  uint8_t* stream = nullptr;
  size_t stream_len = 0;
  char* metrics = nullptr;
  const temcodec_status st = temcodec_roundtrip(
      cfg_json.c_str(), signal_json.c_str(), &stream, &stream_len, &metrics);
  if (st != TEMCODEC_OK) {
    const std::string message = temcodec_last_error();
    return st == TEMCODEC_INVALID_ARGUMENT ? config_error(message)
                                           : pipeline_error(message);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::string stem =
      std::filesystem::path(opt.signal_path).stem().string();
  const std::string tem_path = out_dir + "/" + stem + ".tem1";
  const std::string metrics_path = out_dir + "/" + stem + "_metrics.json";
  const bool ok_stream = write_file(tem_path, stream, stream_len);
  const bool ok_metrics =
      write_file(metrics_path, metrics, std::string(metrics).size());
  temcodec_bytes_free(stream);
  temcodec_string_free(metrics);
  if (!ok_stream || !ok_metrics) return pipeline_error("cannot write outputs");
  std::cout << tem_path << "\n" << metrics_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-encoding-machine codec experiments"};
  app.require_subcommand(1);
  app.fallthrough();  // accept global flags after the subcommand

  Options opt;
  app.add_option("--config", opt.config_path, "experiment config JSON file");
  app.add_option("--out", opt.out_dir, "output directory (overrides config)");
  app.add_option("--seed", opt.seed, "base seed (overrides config)")
      ->each([&](const std::string&) { opt.has_seed = true; });
  app.add_option("--scheme", opt.schemes,
                 "restrict to a scheme (conv|vb|lb); repeatable");
  app.add_option("--bits", opt.bits,
                 "bit budgets: comma list for rd, single value for roundtrip");

  auto* bounds = app.add_subcommand("bounds", "analytic vs empirical interval bounds");
  auto* counts = app.add_subcommand("counts", "firing counts and oversampling");
  auto* density = app.add_subcommand("density", "firing-rate spreads");
  auto* rd = app.add_subcommand("rd", "rate-distortion sweep (UQ vs NUQ)");
  auto* roundtrip =
      app.add_subcommand("roundtrip", "single-signal encode/pack/decode demo");
  roundtrip->add_option("signal", opt.signal_path, "signal JSON file")->required();
  auto* generate =
      app.add_subcommand("generate", "write a seeded random signal JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (bounds->parsed()) return run_csv_command(opt, "bounds");
  if (counts->parsed()) return run_csv_command(opt, "counts");
  if (density->parsed()) return run_csv_command(opt, "density");
  if (rd->parsed()) return run_csv_command(opt, "rd");
  if (roundtrip->parsed()) return run_roundtrip(opt);
  if (generate->parsed()) return run_generate(opt);
  return kExitConfig;
}
