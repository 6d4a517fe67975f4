#ifndef WGCHAIN_TESTS_HELPERS_HPP
#define WGCHAIN_TESTS_HELPERS_HPP

#include "wgchain/model.hpp"
#include "wgchain/sampling.hpp"

#include <vector>

namespace testing {

inline wgchain::Chain chain_from_sites(const std::vector<int>& sites, double theta,
                                       std::vector<double> shifts = {}) {
  wgchain::Realization r;
  r.occupied_sites = sites;
  r.detunings = shifts.empty() ? std::vector<double>(sites.size(), 0.0) : std::move(shifts);
  return wgchain::make_chain(r, theta);
}

inline wgchain::Chain random_chain(int n_sites, double filling, double theta, double sigma,
                                   std::uint64_t seed, std::uint64_t index = 0) {
  wgchain::LatticeSpec spec{n_sites, filling, wgchain::FillingMode::FixedCount};
  return wgchain::make_chain(wgchain::sample_realization(spec, sigma, {seed, index}), theta);
}

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace testing

#endif
