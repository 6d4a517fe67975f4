#ifndef WGCHAIN_JOBS_HPP
#define WGCHAIN_JOBS_HPP

// Job descriptions shared by the command-line tool and the batch runner.
// Config-file keys are the CLI flag names without the leading dashes.

#include "wgchain/correlations.hpp"
#include "wgchain/ensemble.hpp"
#include "wgchain/io.hpp"
#include "wgchain/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace wgchain {

enum class JobKind { Spectrum, KdScan, FillingScan, Rabi, G2, TmCompare };

const char* to_string(JobKind kind);
JobKind parse_job_kind(std::string_view s);
FillingMode parse_filling_mode(std::string_view s);
const char* to_string(FillingMode mode);
Port parse_port(std::string_view s);
G2Average parse_g2_average(std::string_view s);
const char* to_string(G2Average mode);

struct JobConfig {
  JobKind kind = JobKind::Spectrum;
  std::string out;

  int n_sites = 100;
  double filling = 1.0;
  FillingMode mode = FillingMode::FixedCount;
  double theta = kPi / 2;
  double gamma_prime = 0.1;
  double sigma_ih = 0.0;
  double delta = 0.0;
  double drive_amp = 1e-4;
  double eta = 1e-6;

  double delta_min = -10.0;
  double delta_max = 10.0;
  int delta_steps = 2001;
  double theta_min = 0.01 * kPi;
  double theta_max = 1.99 * kPi;
  int theta_steps = 199;
  double filling_min = 0.0;
  double filling_max = 1.0;
  int filling_steps = 11;

  int mirror_sites = 50;
  double theta0 = 1.5 * kPi;
  double t_max = 20.0;
  int t_steps = 2000;

  double tau_max = 30.0;
  int tau_steps = 1500;
  Port port = Port::Transmitted;
  G2Average average = G2Average::NormalizedMean;

  int samples = 200;
  std::uint64_t seed = 1;

  /// Defaults for a kind (the lattice phase defaults to pi for rabi).
  static JobConfig defaults(JobKind kind);

  /// Throws ConfigError naming the offending key.
  void validate() const;

  PhysicalParams physical() const;
  LatticeSpec lattice() const;
  CavityGeometry cavity() const;

  /// Keys accepted for this kind, in header order.
  std::vector<std::string> keys() const;
  /// Resolved value of a key, formatted for the output header.
  std::string value(std::string_view key) const;
};

/// Reads one job object; error messages are prefixed with `path`.
JobConfig parse_job(const nlohmann::json& j, const std::string& path);

struct RunOptions {
  int workers = 0;
  std::function<void(int completed, int total)> progress;
};

/// Runs the ensemble and returns the output table. The wall_clock header
/// entry is left as "unrecorded" for the caller to fill.
Table run_job(const JobConfig& job, const RunOptions& options = {});

struct BatchEntry {
  JobConfig job;
  std::filesystem::path output;
  std::string sha256;
  std::string wall_clock;
};

struct BatchResult {
  std::vector<BatchEntry> entries;
  std::filesystem::path manifest;
  std::string manifest_hash;
};

/// Parses {"jobs": [...]} completely before running anything, then writes
/// one output per job and manifest.json into out_dir.
BatchResult run_batch(const nlohmann::json& config, const std::filesystem::path& out_dir,
                      OutputFormat format, const RunOptions& options = {});

std::string default_output_name(const JobConfig& job, std::size_t index, OutputFormat format);

/// UTC time, ISO 8601.
std::string utc_timestamp();

}  // namespace wgchain

#endif  // WGCHAIN_JOBS_HPP
