#include "helpers.hpp"

#include "wgchain/errors.hpp"
#include "wgchain/model.hpp"
#include "wgchain/sampling.hpp"
#include "wgchain/scattering.hpp"

#include <doctest.h>

using namespace wgchain;
using testing::chain_from_sites;

TEST_CASE("phases are theta times site index") {
  Realization r{{0, 1}, {0.0, 0.0}};
  auto p = positions_phases(r, kPi);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == doctest::Approx(kPi));

  r = Realization{{0, 2, 5}, {0, 0, 0}};
  p = positions_phases(r, kPi / 2);
  CHECK(p[1] == doctest::Approx(kPi));
  CHECK(p[2] == doctest::Approx(2.5 * kPi));

  CHECK(positions_phases(Realization{}, 1.0).size() == 0);
}

TEST_CASE("realization validation") {
  CHECK_NOTHROW(Realization({{1, 3}, {0, 0}}).validate());
  CHECK_THROWS_AS(Realization({{3, 1}, {0, 0}}).validate(), ConfigError);
  CHECK_THROWS_AS(Realization({{1, 1}, {0, 0}}).validate(), ConfigError);
  CHECK_THROWS_AS(Realization({{1, 2}, {0}}).validate(), ConfigError);
}

TEST_CASE("parameter validation") {
  PhysicalParams p;
  CHECK_NOTHROW(p.validate());
  p.gamma0 = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.gamma_prime = -0.1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.sigma_ih = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.eta = -1e-3;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  CHECK_THROWS_AS((LatticeSpec{0, 0.5, FillingMode::FixedCount}.validate()), ConfigError);
  CHECK_THROWS_AS((LatticeSpec{10, 1.5, FillingMode::FixedCount}.validate()), ConfigError);
  CHECK((LatticeSpec{10, 0.25, FillingMode::FixedCount}.fixed_count()) == 3);
}

TEST_CASE("drive strength helpers and weak-drive warning") {
  PhysicalParams p;
  p.drive_amp = 0.02;
  CHECK(p.rabi_frequency() == doctest::Approx(0.01));
  CHECK(p.field_amplitude() == doctest::Approx(0.02 * std::sqrt(0.5)));
  CHECK_FALSE(p.weak_drive_warning().has_value());
  p.drive_amp = 0.5;
  CHECK(p.weak_drive_warning().has_value());
}

TEST_CASE("single-excitation Hamiltonian entries") {
  PhysicalParams p;
  p.gamma_prime = 0.1;
  auto h = build_h1(chain_from_sites({3}, kPi / 2), p);
  CHECK(std::abs(h(0, 0) - Complex(0, -0.55)) < 1e-15);

  h = build_h1(chain_from_sites({0, 1}, kPi), p);
  CHECK(std::abs(h(0, 1) - Complex(0, 0.5)) < 1e-15);
  h = build_h1(chain_from_sites({0, 1}, kPi / 2), p);
  CHECK(std::abs(h(0, 1) - Complex(0.5, 0)) < 1e-15);

  auto chain = testing::random_chain(40, 0.5, 1.3, 2.0, 7);
  p.delta = 0.3;
  h = build_h1(chain, p);
  CHECK((h - h.transpose()).norm() == 0.0);
  CHECK((h - h.adjoint()).norm() > 0.1);
  for (Eigen::Index j = 0; j < h.rows(); ++j) {
    CHECK(h(j, j).imag() == doctest::Approx(-0.55));
    CHECK(h(j, j).real() == doctest::Approx(-(0.3 - chain.detunings[j])));
  }
}

TEST_CASE("cavity construction") {
  CavityGeometry g;
  auto full = build_cavity(g, 1.0, FillingMode::FixedCount, {1, 0});
  CHECK(full.chain.size() == 101);
  CHECK_FALSE(full.advisory.has_value());

  auto empty = build_cavity(g, 0.0, FillingMode::FixedCount, {1, 0});
  CHECK(empty.chain.size() == 1);
  CHECK(empty.central == 0);
  CHECK(empty.advisory.has_value());

  auto part = build_cavity(g, 0.6, FillingMode::FixedCount, {1, 3});
  CHECK(part.left_sites.size() == 30);
  CHECK(part.right_sites.size() == 30);
  CHECK(part.chain.size() == 61);

  // The central atom sits theta0 from each mirror's innermost site.
  const auto& ph = full.chain.phases;
  const auto c = full.central;
  CHECK(ph[c] - ph[c - 1] == doctest::Approx(1.5 * kPi));
  CHECK(ph[c + 1] - ph[c] == doctest::Approx(1.5 * kPi));
  for (Eigen::Index j = 1; j < ph.size(); ++j) CHECK(ph[j] > ph[j - 1]);

  g.mirror_sites_left = 0;
  CHECK_THROWS_AS(build_cavity(g, 1.0, FillingMode::FixedCount, {1, 0}), ConfigError);
  CHECK_THROWS_AS(build_cavity(CavityGeometry{}, 1.2, FillingMode::FixedCount, {1, 0}),
                  ConfigError);
}
