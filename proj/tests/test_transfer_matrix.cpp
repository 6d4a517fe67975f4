#include "helpers.hpp"
#include "oracles.hpp"

#include "wgchain/curves.hpp"
#include "wgchain/errors.hpp"
#include "wgchain/scattering.hpp"
#include "wgchain/transfer_matrix.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace wgchain;
using testing::chain_from_sites;

TEST_CASE("single-atom coefficients") {
  PhysicalParams p;
  p.gamma_prime = 0.1;
  const auto a = atom_coefficients(0.0, 0.0, p);
  CHECK(std::abs(a.r - Complex(-1 / 1.1, 0)) < 1e-15);
  CHECK(std::norm(a.t) + std::norm(a.r) < 1.0);
  p.gamma_prime = 0;
  const auto b = atom_coefficients(0.8, 0.3, p);
  CHECK(std::norm(b.t) + std::norm(b.r) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(segment_phase(2.0, 5.0, p) == 2.0);
  p.eta = 1e-3;
  CHECK(segment_phase(2.0, 5.0, p) == doctest::Approx(2.0 * 1.005));
}

TEST_CASE("lossless resonant atom reflects everything") {
  PhysicalParams p;
  p.gamma_prime = 0;
  const auto pt = tm_point(chain_from_sites({0}, 1.0), p, 0.0);
  CHECK(pt.fallback);
  CHECK(pt.T < 1e-30);
  CHECK(pt.R == doctest::Approx(1.0));
}

TEST_CASE("markovian limit agrees with the Hamiltonian solver") {
  PhysicalParams p;
  const auto grid = linspace(-8.0, 8.0, 161);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const Chain chain = testing::random_chain(100, 0.3 + 0.05 * i, 0.4 + 0.5 * i, 1.0, 12, i);
    const auto m = compare_markovian(chain, p, grid);
    CHECK(m.max_deviation() < 1e-8);
  }
}

TEST_CASE("mirror chain follows the closed form") {
  PhysicalParams p;
  std::vector<int> sites(20);
  std::iota(sites.begin(), sites.end(), 0);
  const Chain chain = chain_from_sites(sites, kPi);
  for (double d : linspace(-20.0, 20.0, 41)) {
    const auto pt = tm_point(chain, p, d);
    CHECK(testing::rel_err(pt.R, oracle::mirror_R(20, 0.1, d)) < 1e-8);
    CHECK(testing::rel_err(pt.T, oracle::mirror_T(20, 0.1, d)) < 1e-8);
  }
  p.eta = 1e-2;
  const auto pt = tm_point(chain, p, 0.0);
  CHECK(testing::rel_err(pt.R, oracle::mirror_R(20, 0.1, 0.0)) < 1e-8);
}

TEST_CASE("splitting the chain and composing reproduces the whole") {
  PhysicalParams p;
  p.eta = 1e-3;
  const Chain chain = testing::random_chain(60, 0.5, 1.9, 0.7, 3);
  const Eigen::Index n = chain.size();
  const double delta = 0.35;
  const auto whole = two_port_from_transfer(chain_transfer_matrix(chain, p, delta, 0, n));
  for (Eigen::Index cut : {Eigen::Index(1), n / 3, n - 1}) {
    const Eigen::Matrix2cd left = chain_transfer_matrix(chain, p, delta, 0, cut);
    const Eigen::Matrix2cd right = chain_transfer_matrix(chain, p, delta, cut, n);
    const Eigen::Matrix2cd gap =
        propagation_matrix(segment_phase(chain.phases[cut] - chain.phases[cut - 1], delta, p));
    const auto joined = two_port_from_transfer(right * gap * left);
    CHECK(std::abs(std::norm(joined.t_fwd) - std::norm(whole.t_fwd)) < 1e-10);
    CHECK(std::abs(std::norm(joined.r_fwd) - std::norm(whole.r_fwd)) < 1e-10);

    const TwoPort gap_port{std::polar(1.0, segment_phase(chain.phases[cut] - chain.phases[cut - 1], delta, p)), 0.0,
                           std::polar(1.0, segment_phase(chain.phases[cut] - chain.phases[cut - 1], delta, p)), 0.0};
    const auto s = compose(compose(chain_two_port(chain, p, delta, 0, cut), gap_port),
                           chain_two_port(chain, p, delta, cut, n));
    CHECK(std::abs(std::norm(s.t_fwd) - std::norm(whole.t_fwd)) < 1e-10);
    CHECK(std::abs(std::norm(s.r_fwd) - std::norm(whole.r_fwd)) < 1e-10);
  }
}

TEST_CASE("transmission is reciprocal") {
  PhysicalParams p;
  p.eta = 1e-3;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const Chain chain = testing::random_chain(50, 0.5, 0.3 * (i + 1), 1.0, 31, i);
    const auto s = chain_two_port(chain, p, 0.2 * i - 1.0, 0, chain.size());
    CHECK(std::abs(std::norm(s.t_fwd) - std::norm(s.t_bwd)) < 1e-10);
  }
}

TEST_CASE("lossless chains conserve flux with retardation") {
  PhysicalParams p;
  p.gamma_prime = 0;
  p.eta = 1e-3;
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 40; ++i) {
    const Chain chain = testing::random_chain(80, u(gen), 2 * kPi * u(gen), 2 * u(gen), 5, i);
    const auto pt = tm_point(chain, p, -5 + 10 * u(gen));
    CHECK(std::abs(pt.T + pt.R - 1.0) < 1e-10);
  }
}

TEST_CASE("long opaque chains take the scattering-matrix route") {
  PhysicalParams p;
  std::vector<int> sites(500);
  std::iota(sites.begin(), sites.end(), 0);
  const Chain chain = chain_from_sites(sites, kPi / 2);
  const auto pt = tm_point(chain, p, 0.0);
  CHECK(pt.fallback);
  const auto h = scatter(chain, p);
  CHECK(std::abs(pt.T - h.T) < 1e-12);
  CHECK(std::abs(pt.R - h.R) < 1e-10);
}

TEST_CASE("unsorted chains are rejected") {
  Chain chain;
  chain.phases = Eigen::Vector2d(1.0, 0.0);
  chain.detunings = Eigen::Vector2d::Zero();
  const double grid[] = {0.0};
  CHECK_THROWS_AS(tm_spectrum(chain, PhysicalParams{}, grid), ConfigError);
}
