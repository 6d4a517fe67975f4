#ifndef WGCHAIN_ENSEMBLE_HPP
#define WGCHAIN_ENSEMBLE_HPP

// Monte Carlo over seeded realizations.
//
// Work is partitioned by realization index over a pool of worker threads.
// Every realization is a pure function of (master_seed, index, config), records
// are stored by index, and statistics are folded in index order, so results do
// not depend on the number of workers.

#include "wgchain/correlations.hpp"
#include "wgchain/model.hpp"
#include "wgchain/sampling.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wgchain {

struct EnsembleOptions {
  int samples = 200;
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0: WGCHAIN_WORKERS, else hardware concurrency
  std::function<void(int completed, int total)> progress;
};

/// Requested count if positive, else $WGCHAIN_WORKERS, else hardware threads.
int resolve_workers(int requested);

struct RealizationRecord {
  std::uint64_t index = 0;
  bool ok = true;
  std::string error;
  Eigen::VectorXd values;
};

struct EnsembleStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_error;  // sample std / sqrt(M); NaN when M < 2
  int count = 0;
  int failures = 0;
  std::vector<std::uint64_t> failed_indices;
  std::uint64_t master_seed = 0;
};

using RealizationFn = std::function<Eigen::VectorXd(const SampleSeed&)>;

/// Runs fn for indices 0..samples-1. NumericalError inside fn marks that
/// record failed and the run continues; any other exception is rethrown.
std::vector<RealizationRecord> map_realizations(const EnsembleOptions& options,
                                                const RealizationFn& fn);

/// Index-ordered two-pass mean and standard error over successful records.
EnsembleStats aggregate(std::span<const RealizationRecord> records, std::uint64_t master_seed);

/// Per-realization values laid out channel-major: value[c * grid.size() + g].
struct EnsembleResult {
  std::vector<double> grid;
  std::vector<std::string> channels;
  EnsembleStats stats;
  std::vector<RealizationRecord> records;

  Eigen::VectorXd mean(std::string_view channel) const;
  Eigen::VectorXd std_error(std::string_view channel) const;

 private:
  Eigen::Index channel_offset(std::string_view channel) const;
};

/// Channels T, R, sum over a detuning grid.
EnsembleResult spectrum_ensemble(const LatticeSpec& spec, const PhysicalParams& params,
                                 std::span<const double> deltas, const EnsembleOptions& options);

/// Channels D, T, R, sum at params.delta over a lattice-phase grid. Each
/// realization keeps its occupancy across the grid.
EnsembleResult kd_scan(const LatticeSpec& spec, const PhysicalParams& params,
                       std::span<const double> thetas, const EnsembleOptions& options);

/// Channels D, T, R, sum at params.delta over a filling grid.
EnsembleResult filling_scan(const LatticeSpec& spec, const PhysicalParams& params,
                            std::span<const double> fillings, const EnsembleOptions& options);

/// Channel pe: central-atom population averaged over mirror occupancies.
EnsembleResult rabi_population(const CavityGeometry& geom, const PhysicalParams& params,
                               double filling, FillingMode mode, std::span<const double> times,
                               const EnsembleOptions& options);

enum class G2Average {
  /// Mean of per-realization normalized g2 (default).
  NormalizedMean,
  /// mean(G2) / mean(I)^2; the standard error ignores the intensity spread.
  RatioOfMeans,
};

struct G2EnsembleResult {
  EnsembleResult raw;  // channels g2, numerator, intensity
  G2Average mode = G2Average::NormalizedMean;
  Eigen::VectorXd g2;
  Eigen::VectorXd g2_se;
  int divergent = 0;  // realizations with vanishing intensity, excluded
};

G2EnsembleResult g2_ensemble(const LatticeSpec& spec, const PhysicalParams& params,
                             std::span<const double> taus, Port port, G2Average mode,
                             const EnsembleOptions& options);

/// Channels T_H, R_H, T_TM, R_TM, abs_dT, abs_dR.
EnsembleResult tm_compare_ensemble(const LatticeSpec& spec, const PhysicalParams& params,
                                   std::span<const double> deltas,
                                   const EnsembleOptions& options);

}  // namespace wgchain

#endif  // WGCHAIN_ENSEMBLE_HPP
