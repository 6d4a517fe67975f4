#include "wgchain/jobs.hpp"

#include "wgchain/curves.hpp"
#include "wgchain/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wgchain {

const char* to_string(JobKind kind) {
  switch (kind) {
    case JobKind::Spectrum: return "spectrum";
    case JobKind::KdScan: return "kd-scan";
    case JobKind::FillingScan: return "filling-scan";
    case JobKind::Rabi: return "rabi";
    case JobKind::G2: return "g2";
    case JobKind::TmCompare: return "tm-compare";
  }
  return "?";
}

JobKind parse_job_kind(std::string_view s) {
  for (JobKind k : {JobKind::Spectrum, JobKind::KdScan, JobKind::FillingScan, JobKind::Rabi,
                    JobKind::G2, JobKind::TmCompare}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown job kind '" + std::string(s) + "'");
}

FillingMode parse_filling_mode(std::string_view s) {
  if (s == "fixed") return FillingMode::FixedCount;
  if (s == "bernoulli") return FillingMode::Bernoulli;
  throw ConfigError("mode must be fixed or bernoulli, got '" + std::string(s) + "'");
}

const char* to_string(FillingMode mode) {
  return mode == FillingMode::FixedCount ? "fixed" : "bernoulli";
}

Port parse_port(std::string_view s) {
  if (s == "transmitted") return Port::Transmitted;
  if (s == "reflected") return Port::Reflected;
  throw ConfigError("port must be transmitted or reflected, got '" + std::string(s) + "'");
}

G2Average parse_g2_average(std::string_view s) {
  if (s == "g2") return G2Average::NormalizedMean;
  if (s == "ratio") return G2Average::RatioOfMeans;
  throw ConfigError("average must be g2 or ratio, got '" + std::string(s) + "'");
}

const char* to_string(G2Average mode) {
  return mode == G2Average::NormalizedMean ? "g2" : "ratio";
}

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

double read_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int read_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    fail(path, "integer out of range");
  }
  return static_cast<int>(v);
}

double read_angle(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) fail(path, "expected a number or a multiple of pi such as \"pi/2\"");
  try {
    return parse_theta(j.get<std::string>());
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

template <typename T, typename Parse>
T read_enum(const json& j, const std::string& path, Parse parse) {
  const std::string s = read_string(j, path);
  try {
    return parse(s);
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
}

struct KeyDef {
  std::function<void(JobConfig&, const json&, const std::string&)> read;
  std::function<std::string(const JobConfig&)> show;
};

template <double JobConfig::*M>
KeyDef real_key() {
  return {[](JobConfig& c, const json& j, const std::string& p) { c.*M = read_double(j, p); },
          [](const JobConfig& c) { return format_double(c.*M); }};
}

template <double JobConfig::*M>
KeyDef angle_key() {
  return {[](JobConfig& c, const json& j, const std::string& p) { c.*M = read_angle(j, p); },
          [](const JobConfig& c) { return format_double(c.*M); }};
}

template <int JobConfig::*M>
KeyDef int_key() {
  return {[](JobConfig& c, const json& j, const std::string& p) { c.*M = read_int(j, p); },
          [](const JobConfig& c) { return std::to_string(c.*M); }};
}

const std::map<std::string, KeyDef, std::less<>>& key_table() {
  static const std::map<std::string, KeyDef, std::less<>> table = {
      {"out",
       {[](JobConfig& c, const json& j, const std::string& p) { c.out = read_string(j, p); },
        [](const JobConfig& c) { return c.out.empty() ? std::string("-") : c.out; }}},
      {"n-sites", int_key<&JobConfig::n_sites>()},
      {"filling", real_key<&JobConfig::filling>()},
      {"mode",
       {[](JobConfig& c, const json& j, const std::string& p) {
          c.mode = read_enum<FillingMode>(j, p, parse_filling_mode);
        },
        [](const JobConfig& c) { return std::string(to_string(c.mode)); }}},
      {"theta", angle_key<&JobConfig::theta>()},
      {"gamma-prime", real_key<&JobConfig::gamma_prime>()},
      {"sigma-ih", real_key<&JobConfig::sigma_ih>()},
      {"delta", real_key<&JobConfig::delta>()},
      {"drive-amp", real_key<&JobConfig::drive_amp>()},
      {"eta", real_key<&JobConfig::eta>()},
      {"delta-min", real_key<&JobConfig::delta_min>()},
      {"delta-max", real_key<&JobConfig::delta_max>()},
      {"delta-steps", int_key<&JobConfig::delta_steps>()},
      {"theta-min", angle_key<&JobConfig::theta_min>()},
      {"theta-max", angle_key<&JobConfig::theta_max>()},
      {"theta-steps", int_key<&JobConfig::theta_steps>()},
      {"filling-min", real_key<&JobConfig::filling_min>()},
      {"filling-max", real_key<&JobConfig::filling_max>()},
      {"filling-steps", int_key<&JobConfig::filling_steps>()},
      {"mirror-sites", int_key<&JobConfig::mirror_sites>()},
      {"theta0", angle_key<&JobConfig::theta0>()},
      {"t-max", real_key<&JobConfig::t_max>()},
      {"t-steps", int_key<&JobConfig::t_steps>()},
      {"tau-max", real_key<&JobConfig::tau_max>()},
      {"tau-steps", int_key<&JobConfig::tau_steps>()},
      {"port",
       {[](JobConfig& c, const json& j, const std::string& p) {
          c.port = read_enum<Port>(j, p, parse_port);
        },
        [](const JobConfig& c) { return std::string(to_string(c.port)); }}},
      {"average",
       {[](JobConfig& c, const json& j, const std::string& p) {
          c.average = read_enum<G2Average>(j, p, parse_g2_average);
        },
        [](const JobConfig& c) { return std::string(to_string(c.average)); }}},
      {"samples", int_key<&JobConfig::samples>()},
      {"seed",
       {[](JobConfig& c, const json& j, const std::string& p) {
          if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
            fail(p, "expected a non-negative integer");
          }
          c.seed = j.get<std::uint64_t>();
        },
        [](const JobConfig& c) { return std::to_string(c.seed); }}},
  };
  return table;
}

void check(bool ok, const std::string& key, const std::string& msg) {
  if (!ok) throw ConfigError(key + ": " + msg);
}

void check_grid(double lo, double hi, int steps, const std::string& prefix) {
  check(std::isfinite(lo) && std::isfinite(hi), prefix + "-min/max", "must be finite");
  check(steps >= 1, prefix + "-steps", "must be at least 1");
  check(steps == 1 ? lo == hi : lo < hi, prefix + "-min/max",
        steps == 1 ? "must be equal for a single step" : "min must be below max");
}

}  // namespace

JobConfig JobConfig::defaults(JobKind kind) {
  JobConfig c;
  c.kind = kind;
  if (kind == JobKind::Rabi) {
    c.theta = kPi;
    c.filling = 1.0;
  }
  return c;
}

std::vector<std::string> JobConfig::keys() const {
  std::vector<std::string> k = {"out", "samples", "seed", "gamma-prime", "sigma-ih", "mode"};
  auto add = [&](std::initializer_list<const char*> more) { k.insert(k.end(), more.begin(), more.end()); };
  switch (kind) {
    case JobKind::Spectrum:
      add({"n-sites", "filling", "theta", "delta-min", "delta-max", "delta-steps"});
      break;
    case JobKind::KdScan:
      add({"n-sites", "filling", "delta", "theta-min", "theta-max", "theta-steps"});
      break;
    case JobKind::FillingScan:
      add({"n-sites", "theta", "delta", "filling-min", "filling-max", "filling-steps"});
      break;
    case JobKind::Rabi:
      add({"mirror-sites", "filling", "theta", "theta0", "t-max", "t-steps"});
      break;
    case JobKind::G2:
      add({"n-sites", "filling", "theta", "delta", "drive-amp", "tau-max", "tau-steps", "port",
           "average"});
      break;
    case JobKind::TmCompare:
      add({"n-sites", "filling", "theta", "eta", "delta-min", "delta-max", "delta-steps"});
      break;
  }
  return k;
}

std::string JobConfig::value(std::string_view key) const {
  const auto& table = key_table();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key " + std::string(key));
  return it->second.show(*this);
}

void JobConfig::validate() const {
  const bool lattice = kind != JobKind::Rabi;
  if (lattice) check(n_sites >= 1, "n-sites", "must be at least 1");
  check(filling >= 0.0 && filling <= 1.0, "filling", "must lie in [0, 1]");
  check(std::isfinite(theta), "theta", "must be finite");
  check(std::isfinite(gamma_prime) && gamma_prime >= 0.0, "gamma-prime", "must be >= 0");
  check(std::isfinite(sigma_ih) && sigma_ih >= 0.0, "sigma-ih", "must be >= 0");
  check(std::isfinite(delta), "delta", "must be finite");
  check(std::isfinite(drive_amp) && drive_amp > 0.0, "drive-amp", "must be > 0");
  check(std::isfinite(eta) && eta >= 0.0, "eta", "must be >= 0");
  check(samples >= 1, "samples", "must be at least 1");
  switch (kind) {
    case JobKind::Spectrum:
    case JobKind::TmCompare:
      check_grid(delta_min, delta_max, delta_steps, "delta");
      break;
    case JobKind::KdScan:
      check_grid(theta_min, theta_max, theta_steps, "theta");
      check(theta_min > 0.0 && theta_max < 2 * kPi, "theta-min/max", "must lie inside (0, 2pi)");
      break;
    case JobKind::FillingScan:
      check_grid(filling_min, filling_max, filling_steps, "filling");
      check(filling_min >= 0.0 && filling_max <= 1.0, "filling-min/max", "must lie in [0, 1]");
      break;
    case JobKind::Rabi:
      check(mirror_sites >= 1, "mirror-sites", "must be at least 1");
      check(std::isfinite(theta0), "theta0", "must be finite");
      check(std::isfinite(t_max) && t_max > 0.0, "t-max", "must be > 0");
      check(t_steps >= 2, "t-steps", "must be at least 2");
      break;
    case JobKind::G2:
      check(std::isfinite(tau_max) && tau_max > 0.0, "tau-max", "must be > 0");
      check(tau_steps >= 2, "tau-steps", "must be at least 2");
      break;
  }
}

PhysicalParams JobConfig::physical() const {
  PhysicalParams p;
  p.gamma_prime = gamma_prime;
  p.theta = theta;
  p.delta = delta;
  p.drive_amp = drive_amp;
  p.sigma_ih = sigma_ih;
  p.eta = kind == JobKind::TmCompare ? eta : 0.0;
  return p;
}

LatticeSpec JobConfig::lattice() const { return LatticeSpec{n_sites, filling, mode}; }

CavityGeometry JobConfig::cavity() const {
  CavityGeometry g;
  g.mirror_sites_left = mirror_sites;
  g.mirror_sites_right = mirror_sites;
  g.theta = theta;
  g.center_gap_phase = theta0;
  return g;
}

JobConfig parse_job(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (!j.contains("kind")) fail(path + ".kind", "missing");
  JobKind kind;
  try {
    kind = parse_job_kind(read_string(j.at("kind"), path + ".kind"));
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.starts_with(path)) throw;
    fail(path + ".kind", msg);
  }
  JobConfig c = JobConfig::defaults(kind);
  const auto allowed = c.keys();
  const auto& table = key_table();
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") continue;
    const std::string key_path = path + "." + key;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(key_path, table.contains(key) ? std::string("not used by ") + to_string(kind)
                                         : std::string("unknown key"));
    }
    table.find(key)->second.read(c, value, key_path);
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  return c;
}

namespace {

void add_mean_se(Table& t, const std::string& channel, const std::string& unit,
                 bool with_se = true) {
  t.add_column(channel + "_mean", unit);
  if (with_se) t.add_column(channel + "_se", unit);
}

void fill_rows(Table& t, const std::vector<double>& grid,
               const std::vector<Eigen::VectorXd>& columns) {
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> row{grid[g]};
    for (const auto& col : columns) row.push_back(col[static_cast<Eigen::Index>(g)]);
    t.rows.push_back(std::move(row));
  }
}

std::string index_list(const std::vector<std::uint64_t>& idx) {
  if (idx.empty()) return "none";
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(idx[i]);
  }
  return s;
}

void scan_table(Table& t, const EnsembleResult& r, const std::string& axis,
                const std::string& axis_unit) {
  t.add_column(axis, axis_unit);
  add_mean_se(t, "D", "1");
  add_mean_se(t, "T", "1");
  add_mean_se(t, "R", "1");
  add_mean_se(t, "sum", "1", false);
  fill_rows(t, r.grid,
            {r.mean("D"), r.std_error("D"), r.mean("T"), r.std_error("T"), r.mean("R"),
             r.std_error("R"), r.mean("sum")});
}

}  // namespace

Table run_job(const JobConfig& job, const RunOptions& options) {
  job.validate();
  Table t;
  t.set("version", WGCHAIN_VERSION);
  t.set("kind", to_string(job.kind));
  for (const auto& key : job.keys()) {
    // The output path is not part of the result; keeping it out of the header
    // lets the same job written to two places produce identical files.
    if (key != "seed" && key != "out") t.set(key, job.value(key));
  }
  t.set("master_seed", std::to_string(job.seed));

  EnsembleOptions eo;
  eo.samples = job.samples;
  eo.master_seed = job.seed;
  eo.workers = options.workers;
  eo.progress = options.progress;

  const PhysicalParams params = job.physical();
  const LatticeSpec lattice = job.lattice();
  EnsembleStats stats;

  switch (job.kind) {
    case JobKind::Spectrum: {
      const auto grid = linspace(job.delta_min, job.delta_max, job.delta_steps);
      const auto r = spectrum_ensemble(lattice, params, grid, eo);
      stats = r.stats;
      t.add_column("delta", "Gamma0");
      add_mean_se(t, "T", "1");
      add_mean_se(t, "R", "1");
      add_mean_se(t, "sum", "1", false);
      fill_rows(t, r.grid,
                {r.mean("T"), r.std_error("T"), r.mean("R"), r.std_error("R"), r.mean("sum")});
      break;
    }
    case JobKind::KdScan: {
      const auto grid = linspace(job.theta_min, job.theta_max, job.theta_steps);
      const auto r = kd_scan(lattice, params, grid, eo);
      stats = r.stats;
      scan_table(t, r, "theta", "rad");
      break;
    }
    case JobKind::FillingScan: {
      const auto grid = linspace(job.filling_min, job.filling_max, job.filling_steps);
      const auto r = filling_scan(lattice, params, grid, eo);
      stats = r.stats;
      scan_table(t, r, "filling", "1");
      break;
    }
    case JobKind::Rabi: {
      const auto grid = linspace(0.0, job.t_max, job.t_steps);
      const auto r = rabi_population(job.cavity(), params, job.filling, job.mode, grid, eo);
      stats = r.stats;
      if (job.filling == 0.0) {
        t.set("advisory", "empty mirrors; the central atom decays freely");
      }
      t.add_column("t", "1/Gamma0");
      add_mean_se(t, "pe", "1");
      fill_rows(t, r.grid, {r.mean("pe"), r.std_error("pe")});
      break;
    }
    case JobKind::G2: {
      if (const auto w = params.weak_drive_warning()) t.set("warning", *w);
      const auto grid = linspace(0.0, job.tau_max, job.tau_steps);
      const auto r = g2_ensemble(lattice, params, grid, job.port, job.average, eo);
      stats = r.raw.stats;
      t.set("divergent_realizations", std::to_string(r.divergent));
      t.add_column("tau", "1/Gamma0");
      t.add_column("g2_mean", "1");
      t.add_column("g2_se", "1");
      fill_rows(t, r.raw.grid, {r.g2, r.g2_se});
      break;
    }
    case JobKind::TmCompare: {
      const auto grid = linspace(job.delta_min, job.delta_max, job.delta_steps);
      const auto r = tm_compare_ensemble(lattice, params, grid, eo);
      stats = r.stats;
      const auto g = static_cast<Eigen::Index>(grid.size());
      Eigen::VectorXd dev_max = Eigen::VectorXd::Zero(g);
      for (const auto& rec : r.records) {
        if (!rec.ok) continue;
        dev_max = dev_max.cwiseMax(rec.values.segment(4 * g, g).cwiseMax(rec.values.segment(5 * g, g)));
      }
      t.set("max_deviation", format_double(dev_max.maxCoeff()));
      t.add_column("delta", "Gamma0");
      for (const char* c : {"T_markov", "R_markov", "T_tm", "R_tm"}) t.add_column(std::string(c) + "_mean", "1");
      t.add_column("dT_mean", "1");
      t.add_column("dR_mean", "1");
      t.add_column("deviation_max", "1");
      fill_rows(t, r.grid,
                {r.mean("T_H"), r.mean("R_H"), r.mean("T_TM"), r.mean("R_TM"), r.mean("abs_dT"),
                 r.mean("abs_dR"), dev_max});
      break;
    }
  }

  t.set("realizations_ok", std::to_string(stats.count));
  t.set("realizations_failed", std::to_string(stats.failures));
  t.set("failed_indices", index_list(stats.failed_indices));
  t.set("wall_clock", "unrecorded");
  return t;
}

std::string default_output_name(const JobConfig& job, std::size_t index, OutputFormat format) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "job%02zu-", index);
  return std::string(buf) + to_string(job.kind) +
         (format == OutputFormat::Text ? ".txt" : ".json");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

BatchResult run_batch(const json& config, const std::filesystem::path& out_dir,
                      OutputFormat format, const RunOptions& options) {
  if (!config.is_object()) throw ConfigError("config: expected an object");
  for (const auto& [key, value] : config.items()) {
    if (key != "jobs") throw ConfigError("config." + key + ": unknown key");
  }
  if (!config.contains("jobs")) throw ConfigError("jobs: missing");
  const json& jobs = config.at("jobs");
  if (!jobs.is_array()) throw ConfigError("jobs: expected an array");

  BatchResult result;
  std::map<std::string, std::size_t> names;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const std::string path = "jobs[" + std::to_string(i) + "]";
    BatchEntry e;
    e.job = parse_job(jobs[i], path);
    const std::string name = e.job.out.empty() ? default_output_name(e.job, i, format) : e.job.out;
    if (name == "manifest.json") throw ConfigError(path + ".out: reserved name");
    const auto [it, inserted] = names.emplace(name, i);
    if (!inserted) {
      throw ConfigError(path + ".out: same output as jobs[" + std::to_string(it->second) + "]");
    }
    e.output = out_dir / name;
    result.entries.push_back(std::move(e));
  }

  std::filesystem::create_directories(out_dir);
  json manifest;
  manifest["version"] = WGCHAIN_VERSION;
  manifest["format"] = format == OutputFormat::Text ? "text" : "structured";
  manifest["jobs"] = json::array();
  std::string digest_input;
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    auto& e = result.entries[i];
    e.wall_clock = utc_timestamp();
    const auto start = std::chrono::steady_clock::now();
    Table t = run_job(e.job, options);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    t.set("wall_clock", "see manifest.json");
    const std::string body = render(t, format);
    if (e.output.has_parent_path()) std::filesystem::create_directories(e.output.parent_path());
    std::ofstream os(e.output, std::ios::binary);
    os << body;
    if (!os) throw std::runtime_error("cannot write " + e.output.string());
    e.sha256 = sha256_hex(body);
    const std::string rel = e.output.lexically_relative(out_dir).generic_string();
    manifest["jobs"].push_back({{"index", i},
                                {"kind", to_string(e.job.kind)},
                                {"seed", e.job.seed},
                                {"samples", e.job.samples},
                                {"output", rel},
                                {"sha256", e.sha256},
                                {"started", e.wall_clock},
                                {"elapsed_s", elapsed}});
    digest_input += std::to_string(i) + '\t' + rel + '\t' + e.sha256 + '\n';
  }
  result.manifest_hash = sha256_hex(digest_input);
  manifest["manifest_hash"] = result.manifest_hash;
  result.manifest = out_dir / "manifest.json";
  std::ofstream os(result.manifest, std::ios::binary);
  os << manifest.dump(2) << '\n';
  if (!os) throw std::runtime_error("cannot write " + result.manifest.string());
  return result;
}

}  // namespace wgchain
