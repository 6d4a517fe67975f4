#ifndef WGCHAIN_CORRELATIONS_HPP
#define WGCHAIN_CORRELATIONS_HPP

// Photon-photon correlations of the output fields at leading order in the
// drive amplitude.
//
// The steady state is expanded as g0 |G> + sum_j c1_j |e_j> + sum_{j<k} c2_jk |e_j e_k>
// with c1 = O(E) and c2 = O(E^2). One detection of the output field maps it to
// the <= 1 excitation sector, which then relaxes under H1 plus the drive; the
// vacuum amplitude is constant at this order. Two-excitation pairs are stored
// lexicographically: (0,1), (0,2), ..., (0,n-1), (1,2), ...

#include "wgchain/model.hpp"
#include "wgchain/dynamics.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace wgchain {

/// Lexicographic index of the unordered pair {j, k}, j != k.
Eigen::Index pair_index(Eigen::Index n, Eigen::Index j, Eigen::Index k);
Eigen::Index pair_count(Eigen::Index n);

/// Two-excitation block of the effective Hamiltonian on |e_j e_k>, j < k:
/// diagonal H1_jj + H1_kk, single-atom hops j -> l carry H1_lj.
Eigen::MatrixXcd build_h2(const Eigen::MatrixXcd& h1);

struct TruncatedState {
  Complex g0{1.0, 0.0};
  Eigen::VectorXcd c1;
  Eigen::VectorXcd c2;

  Eigen::Index atoms() const { return c1.size(); }
  /// c2 for the unordered pair {j, k}; zero when j == k.
  Complex pair(Eigen::Index j, Eigen::Index k) const;
};

/// <= 1 excitation state left after one detection.
struct ConditionalState {
  Complex vacuum{0.0, 0.0};
  Eigen::VectorXcd single;
};

enum class Port { Transmitted, Reflected };

const char* to_string(Port port);

/// Solves H1 c1 = Omega e and H2 c2 = Omega (e_j c1_k + e_k c1_j).
TruncatedState steady_state_2ex(const Chain& chain, const PhysicalParams& params);

/// Residuals ||A x - b|| / ||b|| of the one- and two-excitation systems.
std::pair<double, double> steady_state_residuals(const TruncatedState& state, const Chain& chain,
                                                 const PhysicalParams& params);

/// Output operator on the truncated state: E 1 (transmitted only) plus
/// i sqrt(gamma0/2) sum_j exp(-/+ i phi_j) sigma_j. The O(E^3) two-excitation
/// remainder is dropped.
ConditionalState apply_output(const TruncatedState& state, const Chain& chain,
                              const PhysicalParams& params, Port port);

/// Second application: projection onto the vacuum.
Complex apply_output(const ConditionalState& state, const Chain& chain,
                     const PhysicalParams& params, Port port);

struct G2Curve {
  std::vector<double> tau;
  Eigen::VectorXd g2;         // |A(tau)|^2 / I^2
  Eigen::VectorXd numerator;  // |A(tau)|^2 / E^4
  double intensity = 0.0;     // T or R
  bool divergent = false;     // intensity vanished; g2 is +inf
  PropagatorPath path = PropagatorPath::Eigendecomposition;
};

/// g2(tau) of one output port. The tau grid must start at 0 or later and
/// increase.
G2Curve g2_tau(const Chain& chain, const PhysicalParams& params, std::span<const double> tau,
               Port port);

}  // namespace wgchain

#endif  // WGCHAIN_CORRELATIONS_HPP
