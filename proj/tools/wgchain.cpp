// wgchain command-line tool: one subcommand per observable plus a batch runner.

#include "wgchain/errors.hpp"
#include "wgchain/io.hpp"
#include "wgchain/jobs.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>

namespace {

using wgchain::JobKind;

const std::map<std::string, std::string>& key_help() {
  static const std::map<std::string, std::string> help = {
      {"out", "output file (default: stdout)"},
      {"samples", "number of disorder realizations"},
      {"seed", "master seed"},
      {"gamma-prime", "non-guided decay rate, units of Gamma0"},
      {"sigma-ih", "std of inhomogeneous detunings, units of Gamma0"},
      {"mode", "occupancy sampling: fixed | bernoulli"},
      {"n-sites", "lattice sites N"},
      {"filling", "filling factor p in [0, 1]"},
      {"theta", "lattice phase k_a d, e.g. pi/2 or 0.95pi"},
      {"delta", "probe detuning, units of Gamma0"},
      {"drive-amp", "weak drive amplitude (Omega = drive-amp * Gamma0 / 2)"},
      {"eta", "retardation scale in k = k_a (1 + eta delta)"},
      {"delta-min", "first detuning"},
      {"delta-max", "last detuning"},
      {"delta-steps", "detuning grid points"},
      {"theta-min", "first lattice phase"},
      {"theta-max", "last lattice phase"},
      {"theta-steps", "lattice phase grid points"},
      {"filling-min", "first filling factor"},
      {"filling-max", "last filling factor"},
      {"filling-steps", "filling grid points"},
      {"mirror-sites", "sites per mirror"},
      {"theta0", "phase between the central atom and each mirror"},
      {"t-max", "last time, units of 1/Gamma0"},
      {"t-steps", "time grid points"},
      {"tau-max", "last delay, units of 1/Gamma0"},
      {"tau-steps", "delay grid points"},
      {"port", "transmitted | reflected"},
      {"average", "g2 (mean of g2) | ratio (mean G2 / mean I^2)"},
  };
  return help;
}

bool is_text_key(const std::string& key) {
  static const std::set<std::string> text = {"out",   "mode",      "port",      "average",
                                             "theta", "theta-min", "theta-max", "theta0"};
  return text.contains(key);
}

struct Sub {
  JobKind kind;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
};

nlohmann::json to_job_json(const Sub& sub) {
  nlohmann::json j;
  j["kind"] = wgchain::to_string(sub.kind);
  for (const auto& [key, value] : sub.values) {
    if (!sub.app->get_option("--" + key)->count()) continue;
    if (is_text_key(key)) {
      j[key] = value;
      continue;
    }
    try {
      j[key] = nlohmann::json::parse(value);
    } catch (const nlohmann::json::exception&) {
      throw wgchain::ConfigError(key + ": expected a number, got '" + value + "'");
    }
    if (!j[key].is_number()) {
      throw wgchain::ConfigError(key + ": expected a number, got '" + value + "'");
    }
  }
  return j;
}

std::function<void(int, int)> progress_printer(const std::string& label, bool quiet) {
  if (quiet) return {};
  return [label, last = -1](int done, int total) mutable {
    const int pct = static_cast<int>(100.0 * done / total);
    if (pct / 5 == last / 5 && done != total) return;
    last = pct;
    std::fprintf(stderr, "[%s] %d/%d realizations\n", label.c_str(), done, total);
  };
}

void write_output(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary);
  os << body;
  if (!os) throw wgchain::ConfigError("cannot write " + path);
}

int run_single(const Sub& sub, const std::string& format, int workers, bool quiet,
               bool timestamp) {
  const wgchain::JobConfig job = wgchain::parse_job(to_job_json(sub), sub.app->get_name());
  const auto fmt = wgchain::parse_format(format);
  if (job.kind == JobKind::G2) {
    if (const auto w = job.physical().weak_drive_warning()) std::cerr << "warning: " << *w << '\n';
  }
  const std::string started = wgchain::utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  wgchain::Table table =
      wgchain::run_job(job, {workers, progress_printer(sub.app->get_name(), quiet)});
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.3f s)", elapsed);
  if (timestamp) {
    table.set("wall_clock", started + buf);
  } else {
    table.set("wall_clock", "not recorded (use --timestamp)");
  }
  if (!quiet) std::cerr << "[" << sub.app->get_name() << "] done in" << buf << '\n';
  write_output(job.out, wgchain::render(table, fmt));
  return 0;
}

int run_config(const std::string& config_path, const std::string& out_dir,
               const std::string& format, int workers, bool quiet) {
  std::ifstream is(config_path);
  if (!is) throw wgchain::ConfigError("cannot open config " + config_path);
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw wgchain::ConfigError(config_path + ": " + e.what());
  }
  const auto result =
      wgchain::run_batch(config, out_dir, wgchain::parse_format(format),
                         {workers, progress_printer("run", quiet)});
  std::cerr << "wrote " << result.entries.size() << " job output(s) and "
            << result.manifest.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disordered atom chains coupled to a waveguide: spectra, optical depth, "
               "cavity dynamics and photon correlations."};
  app.set_version_flag("--version", std::string(WGCHAIN_VERSION));
  app.require_subcommand(1);

  std::string format = "text";
  int workers = 0;
  bool quiet = false;
  bool timestamp = false;

  std::vector<std::unique_ptr<Sub>> subs;
  const std::map<JobKind, std::string> descriptions = {
      {JobKind::Spectrum, "ensemble-averaged transmission and reflection spectra"},
      {JobKind::KdScan, "optical depth, T, R versus lattice phase"},
      {JobKind::FillingScan, "optical depth, T, R versus filling factor"},
      {JobKind::Rabi, "central-atom population between two atomic mirrors"},
      {JobKind::G2, "second-order correlation g2(tau) of an output port"},
      {JobKind::TmCompare, "Markovian solver against the retarded transfer-matrix oracle"},
  };
  for (const auto& [kind, text] : descriptions) {
    auto sub = std::make_unique<Sub>();
    sub->kind = kind;
    sub->app = app.add_subcommand(wgchain::to_string(kind), text);
    const wgchain::JobConfig defaults = wgchain::JobConfig::defaults(kind);
    for (const auto& key : defaults.keys()) {
      std::string& slot = sub->values[key];
      auto* opt = sub->app->add_option("--" + key, slot, key_help().at(key));
      if (key != "out") opt->default_str(defaults.value(key));
    }
    sub->app->add_option("--format", format, "text | structured")->capture_default_str();
    sub->app->add_option("--workers", workers, "worker threads (0: $WGCHAIN_WORKERS or all cores)");
    sub->app->add_flag("--quiet", quiet, "no progress on stderr");
    sub->app->add_flag("--timestamp", timestamp,
                       "write start time and duration into the header (outputs then differ "
                       "between runs)");
    subs.push_back(std::move(sub));
  }

  std::string config_path;
  std::string out_dir = ".";
  auto* run = app.add_subcommand("run", "run a batch of jobs from a JSON config file");
  run->add_option("--config", config_path, "JSON file: {\"jobs\": [{\"kind\": ..., ...}]}")
      ->required();
  run->add_option("--out-dir", out_dir, "directory for outputs and manifest.json")
      ->capture_default_str();
  run->add_option("--format", format, "text | structured")->capture_default_str();
  run->add_option("--workers", workers, "worker threads (0: $WGCHAIN_WORKERS or all cores)");
  run->add_flag("--quiet", quiet, "no progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return run_config(config_path, out_dir, format, workers, quiet);
    for (const auto& sub : subs) {
      if (sub->app->parsed()) return run_single(*sub, format, workers, quiet, timestamp);
    }
  } catch (const wgchain::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const wgchain::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
