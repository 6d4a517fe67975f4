#include "wgchain/ensemble.hpp"

#include "wgchain/dynamics.hpp"
#include "wgchain/errors.hpp"
#include "wgchain/scattering.hpp"
#include "wgchain/transfer_matrix.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace wgchain {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WGCHAIN_WORKERS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<RealizationRecord> map_realizations(const EnsembleOptions& options,
                                                const RealizationFn& fn) {
  if (options.samples < 1) throw ConfigError("ensemble needs at least one sample");
  const int total = options.samples;
  std::vector<RealizationRecord> records(static_cast<std::size_t>(total));
  std::atomic<int> next{0};
  std::atomic<int> completed{0};
  std::mutex report_mutex;
  std::exception_ptr fatal;

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= total) return;
      auto& rec = records[static_cast<std::size_t>(i)];
      rec.index = static_cast<std::uint64_t>(i);
      try {
        rec.values = fn(SampleSeed{options.master_seed, rec.index});
      } catch (const NumericalError& e) {
        rec.ok = false;
        rec.error = e.what();
      } catch (...) {
        std::lock_guard lock(report_mutex);
        if (!fatal) fatal = std::current_exception();
        next.store(total);
        return;
      }
      const int done = completed.fetch_add(1) + 1;
      if (options.progress) {
        std::lock_guard lock(report_mutex);
        options.progress(done, total);
      }
    }
  };

  const int n_workers = std::min(resolve_workers(options.workers), total);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);
  return records;
}

EnsembleStats aggregate(std::span<const RealizationRecord> records, std::uint64_t master_seed) {
  EnsembleStats stats;
  stats.master_seed = master_seed;
  Eigen::Index width = -1;
  Eigen::VectorXd lo, hi;
  for (const auto& rec : records) {
    if (!rec.ok) {
      ++stats.failures;
      stats.failed_indices.push_back(rec.index);
      continue;
    }
    if (width < 0) {
      width = rec.values.size();
      stats.mean = Eigen::VectorXd::Zero(width);
      lo = hi = rec.values;
    } else if (rec.values.size() != width) {
      throw ConfigError("realization records differ in length");
    }
    stats.mean += rec.values;
    lo = lo.cwiseMin(rec.values);
    hi = hi.cwiseMax(rec.values);
    ++stats.count;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (stats.count == 0) {
    stats.mean.resize(0);
    stats.std_error.resize(0);
    return stats;
  }
  stats.mean /= static_cast<double>(stats.count);
  if (stats.count < 2) {
    stats.std_error = Eigen::VectorXd::Constant(width, nan);
    return stats;
  }
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(width);
  for (const auto& rec : records) {
    if (rec.ok) sq += (rec.values - stats.mean).cwiseAbs2();
  }
  const double m = static_cast<double>(stats.count);
  stats.std_error = (sq / (m - 1.0)).cwiseSqrt() / std::sqrt(m);
  // Identical samples: report the value itself and an exact zero error.
  for (Eigen::Index i = 0; i < width; ++i) {
    if (lo[i] == hi[i]) {
      stats.mean[i] = lo[i];
      stats.std_error[i] = 0.0;
    }
  }
  return stats;
}

Eigen::Index EnsembleResult::channel_offset(std::string_view channel) const {
  const auto it = std::find(channels.begin(), channels.end(), channel);
  if (it == channels.end()) throw ConfigError("unknown channel " + std::string(channel));
  return static_cast<Eigen::Index>(it - channels.begin()) *
         static_cast<Eigen::Index>(grid.size());
}

Eigen::VectorXd EnsembleResult::mean(std::string_view channel) const {
  return stats.mean.segment(channel_offset(channel), static_cast<Eigen::Index>(grid.size()));
}

Eigen::VectorXd EnsembleResult::std_error(std::string_view channel) const {
  return stats.std_error.segment(channel_offset(channel),
                                 static_cast<Eigen::Index>(grid.size()));
}

namespace {

EnsembleResult run(std::span<const double> grid, std::vector<std::string> channels,
                   const EnsembleOptions& options, const RealizationFn& fn) {
  EnsembleResult out;
  out.grid.assign(grid.begin(), grid.end());
  out.channels = std::move(channels);
  out.records = map_realizations(options, fn);
  out.stats = aggregate(out.records, options.master_seed);
  if (out.stats.count == 0) {
    throw NumericalError("every realization failed; first error: " + out.records.front().error);
  }
  return out;
}

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("scan grid must not be empty");
}

}  // namespace

EnsembleResult spectrum_ensemble(const LatticeSpec& spec, const PhysicalParams& params,
                                 std::span<const double> deltas, const EnsembleOptions& options) {
  spec.validate();
  params.validate();
  check_grid(deltas);
  const auto g = static_cast<Eigen::Index>(deltas.size());
  return run(deltas, {"T", "R", "sum"}, options, [&](const SampleSeed& seed) {
    const Chain chain = make_chain(sample_realization(spec, params.sigma_ih, seed), params.theta);
    const auto results = spectrum_scan(chain, params, deltas);
    Eigen::VectorXd v(3 * g);
    for (Eigen::Index i = 0; i < g; ++i) {
      const auto& r = results[static_cast<std::size_t>(i)];
      v[i] = r.T;
      v[g + i] = r.R;
      v[2 * g + i] = r.T + r.R;
    }
    return v;
  });
}

EnsembleResult kd_scan(const LatticeSpec& spec, const PhysicalParams& params,
                       std::span<const double> thetas, const EnsembleOptions& options) {
  spec.validate();
  params.validate();
  check_grid(thetas);
  for (double th : thetas) {
    if (!(th > 0.0 && th < 2 * kPi)) throw ConfigError("theta grid must lie inside (0, 2pi)");
  }
  const auto g = static_cast<Eigen::Index>(thetas.size());
  return run(thetas, {"D", "T", "R", "sum"}, options, [&](const SampleSeed& seed) {
    const Realization real = sample_realization(spec, params.sigma_ih, seed);
    Eigen::VectorXd v(4 * g);
    PhysicalParams p = params;
    for (Eigen::Index i = 0; i < g; ++i) {
      p.theta = thetas[static_cast<std::size_t>(i)];
      const ScatterResult r = scatter(make_chain(real, p.theta), p);
      v[i] = r.D;
      v[g + i] = r.T;
      v[2 * g + i] = r.R;
      v[3 * g + i] = r.T + r.R;
    }
    return v;
  });
}

EnsembleResult filling_scan(const LatticeSpec& spec, const PhysicalParams& params,
                            std::span<const double> fillings, const EnsembleOptions& options) {
  spec.validate();
  params.validate();
  check_grid(fillings);
  for (double p : fillings) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("filling grid must lie in [0, 1]");
  }
  const auto g = static_cast<Eigen::Index>(fillings.size());
  return run(fillings, {"D", "T", "R", "sum"}, options, [&](const SampleSeed& seed) {
    Eigen::VectorXd v(4 * g);
    for (Eigen::Index i = 0; i < g; ++i) {
      LatticeSpec s = spec;
      s.filling = fillings[static_cast<std::size_t>(i)];
      const Chain chain = make_chain(sample_realization(s, params.sigma_ih, seed), params.theta);
      const ScatterResult r = scatter(chain, params);
      v[i] = r.D;
      v[g + i] = r.T;
      v[2 * g + i] = r.R;
      v[3 * g + i] = r.T + r.R;
    }
    return v;
  });
}

EnsembleResult rabi_population(const CavityGeometry& geom, const PhysicalParams& params,
                               double filling, FillingMode mode, std::span<const double> times,
                               const EnsembleOptions& options) {
  geom.validate();
  params.validate();
  check_grid(times);
  return run(times, {"pe"}, options, [&](const SampleSeed& seed) {
    CavityRealization cavity = build_cavity(geom, filling, mode, seed);
    if (params.sigma_ih > 0.0) {
      const auto shifts =
          sample_detunings(static_cast<std::size_t>(cavity.chain.size()), params.sigma_ih, seed);
      cavity.chain.detunings =
          Eigen::Map<const Eigen::VectorXd>(shifts.data(), cavity.chain.size());
    }
    return central_population(cavity, params, times);
  });
}

G2EnsembleResult g2_ensemble(const LatticeSpec& spec, const PhysicalParams& params,
                             std::span<const double> taus, Port port, G2Average mode,
                             const EnsembleOptions& options) {
  spec.validate();
  params.validate();
  check_grid(taus);
  const auto g = static_cast<Eigen::Index>(taus.size());
  G2EnsembleResult out;
  out.mode = mode;
  out.raw = run(taus, {"g2", "numerator", "intensity"}, options, [&](const SampleSeed& seed) {
    const Chain chain = make_chain(sample_realization(spec, params.sigma_ih, seed), params.theta);
    const G2Curve curve = g2_tau(chain, params, taus, port);
    if (curve.divergent) {
      throw NumericalError("divergent g2: output intensity vanishes");
    }
    Eigen::VectorXd v(3 * g);
    v.segment(0, g) = curve.g2;
    v.segment(g, g) = curve.numerator;
    v.segment(2 * g, g).setConstant(curve.intensity);
    return v;
  });
  out.divergent = out.raw.stats.failures;

  if (mode == G2Average::NormalizedMean) {
    out.g2 = out.raw.mean("g2");
    out.g2_se = out.raw.std_error("g2");
  } else {
    const double mean_i = out.raw.mean("intensity")[0];
    const double scale = 1.0 / (mean_i * mean_i);
    out.g2 = out.raw.mean("numerator") * scale;
    out.g2_se = out.raw.std_error("numerator") * scale;
  }
  return out;
}

EnsembleResult tm_compare_ensemble(const LatticeSpec& spec, const PhysicalParams& params,
                                   std::span<const double> deltas,
                                   const EnsembleOptions& options) {
  spec.validate();
  params.validate();
  check_grid(deltas);
  const auto g = static_cast<Eigen::Index>(deltas.size());
  return run(deltas, {"T_H", "R_H", "T_TM", "R_TM", "abs_dT", "abs_dR"}, options,
             [&](const SampleSeed& seed) {
               const Chain chain =
                   make_chain(sample_realization(spec, params.sigma_ih, seed), params.theta);
               const TmSpectrum tm = tm_spectrum(chain, params, deltas);
               const auto h = spectrum_scan(chain, params, deltas);
               Eigen::VectorXd v(6 * g);
               for (Eigen::Index i = 0; i < g; ++i) {
                 const auto k = static_cast<std::size_t>(i);
                 v[i] = h[k].T;
                 v[g + i] = h[k].R;
                 v[2 * g + i] = tm.T[k];
                 v[3 * g + i] = tm.R[k];
                 v[4 * g + i] = std::abs(tm.T[k] - h[k].T);
                 v[5 * g + i] = std::abs(tm.R[k] - h[k].R);
               }
               return v;
             });
}

}  // namespace wgchain
