#ifndef WGCHAIN_MODEL_HPP
#define WGCHAIN_MODEL_HPP

// Physical parameters, lattice geometry and the phase-coordinate chain that
// every solver consumes.
//
// Units: gamma0 is the rate unit (default 1), group velocity v_g = 1, hbar = 1.
// Atom positions enter the physics only through phases k_a * z_j, so sites are
// stored as integers and converted to phases theta * m_j on demand.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace wgchain {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

struct PhysicalParams {
  double gamma0 = 1.0;       // waveguide decay rate
  double gamma_prime = 0.1;  // free-space decay rate
  double theta = kPi / 2;    // lattice phase k_a d
  double delta = 0.0;        // drive detuning omega_in - omega_a
  double drive_amp = 1e-4;   // input amplitude in units of sqrt(gamma0 / 2 v_g)
  double sigma_ih = 0.0;     // std. dev. of per-atom resonance shifts
  double eta = 0.0;          // gamma0 / omega_a, transfer-matrix dispersion only

  /// Throws ConfigError on negative rates or non-finite values.
  void validate() const;

  /// sqrt(gamma0 / (2 v_g)): coupling of an atomic lowering operator to the
  /// output field.
  double output_coupling() const;
  /// Physical input field amplitude.
  double field_amplitude() const;
  /// Rabi frequency sqrt(gamma0 v_g / 2) * field_amplitude().
  double rabi_frequency() const;

  /// Non-empty when the drive is outside the weak-drive regime
  /// (Rabi frequency above 0.1 * max(gamma_prime, gamma0)).
  std::optional<std::string> weak_drive_warning() const;
};

enum class FillingMode { FixedCount, Bernoulli };

struct LatticeSpec {
  int n_sites = 100;
  double filling = 1.0;
  FillingMode mode = FillingMode::FixedCount;

  void validate() const;
  /// round(filling * n_sites); the exact atom count in FixedCount mode.
  int fixed_count() const;
};

/// One draw of lattice occupancy plus per-atom resonance shifts.
struct Realization {
  std::vector<int> occupied_sites;  // strictly increasing
  std::vector<double> detunings;    // same length as occupied_sites

  std::size_t size() const { return occupied_sites.size(); }
  void validate() const;
};

/// Atoms in phase coordinates: what the Hamiltonian, propagators and transfer
/// matrices actually see. Phases are non-decreasing.
struct Chain {
  Eigen::VectorXd phases;
  Eigen::VectorXd detunings;

  Eigen::Index size() const { return phases.size(); }
};

/// phi_j = theta * m_j.
Eigen::VectorXd positions_phases(const Realization& real, double theta);

Chain make_chain(const Realization& real, double theta);

/// Two atomic Bragg mirrors around a central atom.
struct CavityGeometry {
  int mirror_sites_left = 50;
  int mirror_sites_right = 50;
  double theta = kPi;                   // spacing phase inside each mirror
  double center_gap_phase = 1.5 * kPi;  // k_a d_0 to the nearest mirror sites

  void validate() const;
};

struct SampleSeed;

struct CavityRealization {
  Chain chain;
  Eigen::Index central = 0;     // index of the initially excited atom in chain
  std::vector<int> left_sites;  // occupied mirror sites, 0 = nearest the center
  std::vector<int> right_sites;
  std::optional<std::string> advisory;
};

/// Mirror sites are occupied with `filling`; the central atom is always present.
CavityRealization build_cavity(const CavityGeometry& geom, double filling,
                               FillingMode mode, const SampleSeed& seed);

}  // namespace wgchain

#endif  // WGCHAIN_MODEL_HPP
