#ifndef WGCHAIN_TRANSFER_MATRIX_HPP
#define WGCHAIN_TRANSFER_MATRIX_HPP

// Frequency-domain cascade of single-atom scatterers and free propagation.
// With eta = 0 it is an independent route to the same T, R as the effective
// Hamiltonian; with eta > 0 the inter-atom phase follows the input frequency,
// k_in = k_a (1 + eta * delta / gamma0), which the Hamiltonian neglects.
//
// Basis: (right-moving, left-moving) amplitudes. A transfer matrix maps the
// pair just left of an element to the pair just right of it.

#include "wgchain/model.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace wgchain {

struct AtomCoefficients {
  Complex r;
  Complex t;  // 1 + r
};

/// r = -gamma0 / (gamma0 + gamma' - 2i (delta - shift)).
AtomCoefficients atom_coefficients(double delta, double shift, const PhysicalParams& params);

/// Phase across a gap whose resonant phase is gap_phase.
double segment_phase(double gap_phase, double delta, const PhysicalParams& params);

Eigen::Matrix2cd atom_transfer_matrix(const AtomCoefficients& atom);
Eigen::Matrix2cd propagation_matrix(double phase);

/// Scattering description of a two-port: forward quantities for incidence from
/// the left, backward for incidence from the right.
struct TwoPort {
  Complex t_fwd{1.0, 0.0};
  Complex r_fwd{0.0, 0.0};
  Complex t_bwd{1.0, 0.0};
  Complex r_bwd{0.0, 0.0};
};

/// Element a followed by element b (a on the left).
TwoPort compose(const TwoPort& a, const TwoPort& b);

/// Product of atom and gap matrices for atoms [begin, end) in order.
Eigen::Matrix2cd chain_transfer_matrix(const Chain& chain, const PhysicalParams& params,
                                       double delta, Eigen::Index begin, Eigen::Index end);

/// Redheffer composition over atoms [begin, end).
TwoPort chain_two_port(const Chain& chain, const PhysicalParams& params, double delta,
                       Eigen::Index begin, Eigen::Index end);

TwoPort two_port_from_transfer(const Eigen::Matrix2cd& m);

struct TmPoint {
  double T = 1.0;
  double R = 0.0;
  bool fallback = false;  // scattering-matrix composition was needed
};

/// Transfer-matrix product, falling back to scattering-matrix composition when
/// an atom is perfectly reflecting (|t| ~ 0) or the product leaves the safe
/// floating-point range.
TmPoint tm_point(const Chain& chain, const PhysicalParams& params, double delta);

struct TmSpectrum {
  std::vector<double> delta;
  std::vector<double> T;
  std::vector<double> R;
  int fallback_count = 0;
};

TmSpectrum tm_spectrum(const Chain& chain, const PhysicalParams& params,
                       std::span<const double> deltas);

struct DeviationMetrics {
  std::vector<double> delta;
  std::vector<double> abs_dT;
  std::vector<double> abs_dR;
  double max_dT = 0.0;
  double max_dR = 0.0;
  double mean_dT = 0.0;
  double mean_dR = 0.0;

  /// max over the grid of max(|dT|, |dR|).
  double max_deviation() const { return std::max(max_dT, max_dR); }
};

/// |T_TM - T_H| and |R_TM - R_H| on the grid, H from the effective Hamiltonian.
DeviationMetrics compare_markovian(const Chain& chain, const PhysicalParams& params,
                                   std::span<const double> deltas);

}  // namespace wgchain

#endif  // WGCHAIN_TRANSFER_MATRIX_HPP
