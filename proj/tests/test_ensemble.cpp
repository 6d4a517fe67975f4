#include "wgchain/curves.hpp"
#include "wgchain/ensemble.hpp"
#include "wgchain/errors.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace wgchain;

namespace {

EnsembleOptions opts(int samples, std::uint64_t seed, int workers = 1) {
  EnsembleOptions o;
  o.samples = samples;
  o.master_seed = seed;
  o.workers = workers;
  return o;
}

}  // namespace

TEST_CASE("deterministic realizations have zero standard error") {
  const auto grid = linspace(-3.0, 3.0, 13);
  const auto r = spectrum_ensemble({20, 1.0, FillingMode::FixedCount}, PhysicalParams{}, grid,
                                   opts(10, 4));
  CHECK(r.stats.count == 10);
  CHECK(r.std_error("T").cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.std_error("R").cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standard error scales as 1/sqrt(M)") {
  PhysicalParams p;
  p.theta = 1.0;
  const double grid[] = {0.0};
  double ratio = 0;
  const int repeats = 5;
  for (int k = 0; k < repeats; ++k) {
    const auto a = spectrum_ensemble({40, 0.5, FillingMode::FixedCount}, p, grid,
                                     opts(50, 100 + k));
    const auto b = spectrum_ensemble({40, 0.5, FillingMode::FixedCount}, p, grid,
                                     opts(200, 200 + k));
    ratio += a.std_error("R")[0] / b.std_error("R")[0];
  }
  ratio /= repeats;
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.4);
}

TEST_CASE("results do not depend on the worker count") {
  PhysicalParams p;
  p.sigma_ih = 1.0;
  const auto grid = linspace(-4.0, 4.0, 17);
  const LatticeSpec spec{60, 0.5, FillingMode::FixedCount};
  const auto one = spectrum_ensemble(spec, p, grid, opts(24, 77, 1));
  const auto many = spectrum_ensemble(spec, p, grid, opts(24, 77, 6));
  CHECK(one.stats.mean == many.stats.mean);
  CHECK(one.stats.std_error == many.stats.std_error);
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    CHECK(one.records[i].values == many.records[i].values);
  }
}

TEST_CASE("re-aggregating stored records reproduces the statistics") {
  PhysicalParams p;
  const double grid[] = {0.0, 0.5};
  const auto r = spectrum_ensemble({50, 0.4, FillingMode::FixedCount}, p, grid, opts(30, 5, 3));
  auto copy = r.records;
  const auto again = aggregate(copy, 5);
  CHECK((again.mean - r.stats.mean).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((again.std_error - r.stats.std_error).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("failed realizations are recorded and skipped") {
  auto o = opts(8, 1, 3);
  const auto records = map_realizations(o, [](const SampleSeed& s) {
    if (s.realization_index == 3 || s.realization_index == 6) {
      throw NumericalError("singular");
    }
    return Eigen::VectorXd::Constant(2, static_cast<double>(s.realization_index));
  });
  const auto stats = aggregate(records, 1);
  CHECK(stats.count == 6);
  CHECK(stats.failures == 2);
  CHECK(stats.failed_indices == std::vector<std::uint64_t>{3, 6});
  CHECK(stats.mean[0] == doctest::Approx((0 + 1 + 2 + 4 + 5 + 7) / 6.0));
  CHECK(records[3].error == "singular");

  CHECK_THROWS_AS(map_realizations(o,
                                   [](const SampleSeed&) -> Eigen::VectorXd {
                                     throw ConfigError("bad");
                                   }),
                  ConfigError);
  CHECK_THROWS_AS(map_realizations(opts(0, 1), [](const SampleSeed&) {
                    return Eigen::VectorXd();
                  }),
                  ConfigError);
}

TEST_CASE("progress is reported for every realization") {
  auto o = opts(12, 1, 4);
  int calls = 0;
  int last = 0;
  o.progress = [&](int done, int total) {
    ++calls;
    last = std::max(last, done);
    CHECK(total == 12);
  };
  map_realizations(o, [](const SampleSeed&) { return Eigen::VectorXd::Zero(1); });
  CHECK(calls == 12);
  CHECK(last == 12);
}

TEST_CASE("worker count resolution") {
  CHECK(resolve_workers(3) == 3);
  setenv("WGCHAIN_WORKERS", "5", 1);
  CHECK(resolve_workers(0) == 5);
  unsetenv("WGCHAIN_WORKERS");
  CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("filling scan") {
  PhysicalParams p;
  p.theta = 1.0;
  const auto grid = linspace(0.0, 1.0, 11);
  const LatticeSpec spec{100, 0.0, FillingMode::FixedCount};
  const auto r = filling_scan(spec, p, grid, opts(20, 3));
  const auto d = r.mean("D");
  CHECK(d[0] == 0.0);
  CHECK(r.mean("R")[0] == 0.0);
  CHECK(r.mean("T")[0] == 1.0);
  CHECK(d[2] < d[5]);

  p.theta = kPi;
  const auto m = filling_scan(spec, p, grid, opts(20, 3));
  const auto dm = m.mean("D");
  CHECK(dm.maxCoeff() - dm.minCoeff() < d.maxCoeff() - d.minCoeff());

  const double bad[] = {1.5};
  CHECK_THROWS_AS(filling_scan(spec, p, bad, opts(2, 1)), ConfigError);
}

TEST_CASE("optical depth versus lattice phase") {
  PhysicalParams p;
  const LatticeSpec spec{100, 0.5, FillingMode::FixedCount};
  std::vector<double> grid;
  for (int k = 1; k < 20; ++k) grid.push_back(0.1 * k * kPi);
  const auto r = kd_scan(spec, p, grid, opts(40, 8));
  const auto d = r.mean("D");
  const auto refl = r.mean("R");
  const Eigen::Index pi_index = 9;
  const Eigen::Index half_pi_index = 4;
  CHECK(grid[pi_index] == doctest::Approx(kPi));
  CHECK(d[pi_index] < d[half_pi_index]);
  Eigen::Index best = 0;
  refl.maxCoeff(&best);
  CHECK(best == pi_index);

  // Per realization D(theta) = D(2 pi - theta).
  for (const auto& rec : r.records) {
    for (Eigen::Index k = 0; k < 9; ++k) {
      CHECK(std::abs(rec.values[k] - rec.values[18 - k]) < 1e-9 * std::max(1.0, rec.values[k]));
    }
  }
  const double bad[] = {0.0};
  CHECK_THROWS_AS(kd_scan(spec, p, bad, opts(2, 1)), ConfigError);
}

TEST_CASE("rabi population of an empty cavity is free decay") {
  PhysicalParams p;
  const auto times = linspace(0.0, 20.0, 201);
  const auto r = rabi_population(CavityGeometry{}, p, 0.0, FillingMode::FixedCount, times,
                                 opts(3, 1));
  const auto pe = r.mean("pe");
  for (Eigen::Index k = 0; k < pe.size(); ++k) {
    CHECK(std::abs(pe[k] - std::exp(-1.1 * times[static_cast<std::size_t>(k)])) < 1e-8);
  }
}

TEST_CASE("denser mirrors hold the excitation longer") {
  // Time average of p_e over each curve's own first beat period.
  PhysicalParams p;
  const auto times = linspace(0.0, 20.0, 2001);
  double previous = -1;
  for (double filling : {0.4, 0.6, 0.8, 1.0}) {
    const auto r = rabi_population(CavityGeometry{}, p, filling, FillingMode::FixedCount, times,
                                   opts(40, 13));
    const Eigen::VectorXd pe = r.mean("pe");
    const auto maxima = interior_maxima(pe);
    REQUIRE(!maxima.empty());
    const double avg = pe.head(static_cast<Eigen::Index>(maxima.front()) + 1).mean();
    CHECK(avg > previous);
    previous = avg;
  }
}

TEST_CASE("g2 ensemble averaging modes") {
  PhysicalParams p;
  const auto tau = linspace(0.0, 5.0, 11);
  const LatticeSpec spec{30, 0.2, FillingMode::FixedCount};
  const auto a = g2_ensemble(spec, p, tau, Port::Transmitted, G2Average::NormalizedMean,
                             opts(6, 2));
  const auto b = g2_ensemble(spec, p, tau, Port::Transmitted, G2Average::RatioOfMeans,
                             opts(6, 2));
  CHECK(a.g2[0] > 1.0);
  CHECK(b.g2[0] > 0.0);
  const double mean_i = a.raw.mean("intensity")[0];
  CHECK(b.g2[0] == doctest::Approx(a.raw.mean("numerator")[0] / (mean_i * mean_i)));
  CHECK(a.divergent == 0);
}

TEST_CASE("markovian comparison ensemble") {
  PhysicalParams p;
  p.eta = 0.0;
  const auto grid = linspace(-5.0, 5.0, 21);
  const auto r = tm_compare_ensemble({60, 0.5, FillingMode::FixedCount}, p, grid, opts(4, 3));
  CHECK(r.mean("abs_dT").maxCoeff() < 1e-8);
  CHECK(r.mean("abs_dR").maxCoeff() < 1e-8);
}
