#ifndef WGCHAIN_SCATTERING_HPP
#define WGCHAIN_SCATTERING_HPP

// Weak-drive steady state of the single-excitation effective Hamiltonian and
// the resulting transmission / reflection of the guided mode.

#include "wgchain/model.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace wgchain {

/// H_jk = -(delta - shift_j + i gamma'/2) delta_jk - i (gamma0/2) exp(i |phi_j - phi_k|).
/// The j == k term of the exchange sum is kept, so each diagonal entry carries
/// the full single-atom width (gamma0 + gamma') / 2.
Eigen::MatrixXcd build_h1(const Chain& chain, const PhysicalParams& params);

/// exp(i phi_j): phase of the drive (and of the reflected output) at each atom.
Eigen::VectorXcd drive_profile(const Chain& chain);

/// Solves H1 c = rabi * profile. Throws NumericalError carrying the reciprocal
/// condition estimate if the matrix is numerically singular.
Eigen::VectorXcd steady_state(const Eigen::MatrixXcd& h1, const Eigen::VectorXcd& profile,
                              double rabi);

/// ||A x - b|| / ||b||.
double relative_residual(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& x,
                         const Eigen::VectorXcd& b);

struct ScatterResult {
  Complex t_amp{1.0, 0.0};
  Complex r_amp{0.0, 0.0};
  double T = 1.0;
  double R = 0.0;
  double D = 0.0;  // -ln T; +inf when T == 0

  bool opaque() const;
};

/// Input-output amplitudes from the atomic coherences:
///   t = 1 + (i / E) sqrt(gamma0 / 2) sum_j c_j exp(-i phi_j)
///   r =     (i / E) sqrt(gamma0 / 2) sum_j c_j exp(+i phi_j)
/// The transmitted sum cancels against the incident field for opaque chains,
/// which limits T to about 1e-30 in double precision.
ScatterResult output_amplitudes(const Eigen::VectorXcd& c, const Chain& chain,
                                const PhysicalParams& params);

/// D = -ln T; T == 0 yields +infinity.
double optical_depth(double transmittance);

enum class TransmissionRoute {
  /// t = prod_j(-(delta - shift_j) - i gamma'/2) / det H1. H1 + i(gamma0/2) e e^dagger
  /// is upper triangular for sorted phases, so this follows from the matrix
  /// determinant lemma. Evaluated in the log domain, so D stays exact for
  /// chains far beyond the double-precision floor of the direct sum.
  Determinant,
  InputOutputSum,
};

/// Solves one configuration at params.delta.
ScatterResult scatter(const Chain& chain, const PhysicalParams& params,
                      TransmissionRoute route = TransmissionRoute::Determinant);

/// One ScatterResult per detuning. Solver failures are rethrown with the
/// offending detuning in the message.
std::vector<ScatterResult> spectrum_scan(const Chain& chain, PhysicalParams params,
                                         std::span<const double> deltas,
                                         TransmissionRoute route = TransmissionRoute::Determinant);

}  // namespace wgchain

#endif  // WGCHAIN_SCATTERING_HPP
