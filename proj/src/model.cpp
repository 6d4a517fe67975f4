#include "wgchain/model.hpp"

#include "wgchain/errors.hpp"
#include "wgchain/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace wgchain {

void PhysicalParams::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(gamma0) || !finite(gamma_prime) || !finite(theta) || !finite(delta) ||
      !finite(drive_amp) || !finite(sigma_ih) || !finite(eta)) {
    throw ConfigError("physical parameters must be finite");
  }
  if (gamma0 <= 0) throw ConfigError("gamma0 must be positive");
  if (gamma_prime < 0) throw ConfigError("gamma_prime must be non-negative");
  if (sigma_ih < 0) throw ConfigError("sigma_ih must be non-negative");
  if (eta < 0) throw ConfigError("eta must be non-negative");
  if (drive_amp <= 0) throw ConfigError("drive_amp must be positive");
}

double PhysicalParams::output_coupling() const { return std::sqrt(gamma0 / 2.0); }

double PhysicalParams::field_amplitude() const { return drive_amp * output_coupling(); }

double PhysicalParams::rabi_frequency() const {
  return std::sqrt(gamma0 / 2.0) * field_amplitude();
}

std::optional<std::string> PhysicalParams::weak_drive_warning() const {
  const double omega = rabi_frequency();
  const double scale = std::max(gamma_prime, gamma0);
  if (omega > 0.1 * scale) {
    return "drive Rabi frequency " + std::to_string(omega) +
           " is not small compared to the decay rates; weak-drive results may be "
           "inaccurate";
  }
  return std::nullopt;
}

void LatticeSpec::validate() const {
  if (n_sites < 1) throw ConfigError("n_sites must be at least 1");
  if (!(filling >= 0.0 && filling <= 1.0)) throw ConfigError("filling must lie in [0, 1]");
}

int LatticeSpec::fixed_count() const {
  return static_cast<int>(std::lround(filling * n_sites));
}

void Realization::validate() const {
  if (occupied_sites.size() != detunings.size()) {
    throw ConfigError("realization: sites and detunings differ in length");
  }
  for (std::size_t i = 1; i < occupied_sites.size(); ++i) {
    if (occupied_sites[i] <= occupied_sites[i - 1]) {
      throw ConfigError("realization: site indices must be strictly increasing");
    }
  }
}

Eigen::VectorXd positions_phases(const Realization& real, double theta) {
  Eigen::VectorXd phases(static_cast<Eigen::Index>(real.size()));
  for (std::size_t j = 0; j < real.size(); ++j) {
    phases[static_cast<Eigen::Index>(j)] = theta * real.occupied_sites[j];
  }
  return phases;
}

Chain make_chain(const Realization& real, double theta) {
  Chain chain;
  chain.phases = positions_phases(real, theta);
  chain.detunings = Eigen::Map<const Eigen::VectorXd>(real.detunings.data(),
                                                      static_cast<Eigen::Index>(real.size()));
  return chain;
}

void CavityGeometry::validate() const {
  if (mirror_sites_left < 1 || mirror_sites_right < 1) {
    throw ConfigError("cavity mirrors need at least one site each");
  }
  if (!std::isfinite(theta) || !std::isfinite(center_gap_phase)) {
    throw ConfigError("cavity phases must be finite");
  }
}

namespace {

std::vector<int> mirror_occupancy(int n_sites, double filling, FillingMode mode,
                                  const SampleSeed& seed, Stream stream) {
  StreamRng rng(seed, stream);
  if (mode == FillingMode::FixedCount) {
    const int count = static_cast<int>(std::lround(filling * n_sites));
    return choose_sites(n_sites, count, rng);
  }
  std::vector<int> sites;
  for (int m = 0; m < n_sites; ++m) {
    if (rng.uniform01() < filling) sites.push_back(m);
  }
  return sites;
}

}  // namespace

CavityRealization build_cavity(const CavityGeometry& geom, double filling, FillingMode mode,
                               const SampleSeed& seed) {
  geom.validate();
  if (!(filling >= 0.0 && filling <= 1.0)) throw ConfigError("filling must lie in [0, 1]");

  CavityRealization out;
  out.left_sites =
      mirror_occupancy(geom.mirror_sites_left, filling, mode, seed, Stream::MirrorLeft);
  out.right_sites =
      mirror_occupancy(geom.mirror_sites_right, filling, mode, seed, Stream::MirrorRight);
  if (out.left_sites.empty() && out.right_sites.empty()) {
    out.advisory = "empty mirrors: the central atom decays freely";
  }

  const auto n_left = static_cast<Eigen::Index>(out.left_sites.size());
  const auto n_right = static_cast<Eigen::Index>(out.right_sites.size());
  const Eigen::Index n = n_left + 1 + n_right;
  out.chain.phases.resize(n);
  out.chain.detunings = Eigen::VectorXd::Zero(n);

  // Left mirror in increasing phase order: farthest site first.
  for (Eigen::Index i = 0; i < n_left; ++i) {
    const int site = out.left_sites[static_cast<std::size_t>(n_left - 1 - i)];
    out.chain.phases[i] = -geom.center_gap_phase - geom.theta * site;
  }
  out.central = n_left;
  out.chain.phases[n_left] = 0.0;
  for (Eigen::Index i = 0; i < n_right; ++i) {
    const int site = out.right_sites[static_cast<std::size_t>(i)];
    out.chain.phases[n_left + 1 + i] = geom.center_gap_phase + geom.theta * site;
  }
  return out;
}

}  // namespace wgchain
