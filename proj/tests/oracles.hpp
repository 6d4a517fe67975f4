#ifndef WGCHAIN_TESTS_ORACLES_HPP
#define WGCHAIN_TESTS_ORACLES_HPP

// Test-only reference calculations, independent of the library solvers.

#include "wgchain/correlations.hpp"
#include "wgchain/model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace oracle {

// Mirror configuration (p = 1, theta = pi): N atoms act as one superatom.
double mirror_R(int n, double gamma_prime, double delta, double gamma0 = 1.0);
double mirror_T(int n, double gamma_prime, double delta, double gamma0 = 1.0);

// Full Lindblad master equation for a few atoms (2^n states) with the
// exchange Hamiltonian, collective left/right jump operators and local
// free-space decay. Drive -Omega sum (e^{i phi} sigma^+ + h.c.).
class MasterEquation {
 public:
  MasterEquation(const wgchain::Chain& chain, const wgchain::PhysicalParams& params);

  // <a^dag a> / E^2 of the chosen port in the steady state.
  double intensity(wgchain::Port port) const;
  // <a^dag(0) a^dag(tau) a(tau) a(0)> / <a^dag a>^2 by quantum regression.
  std::vector<double> g2(wgchain::Port port, const std::vector<double>& tau) const;
  // Steady-state <sigma_j>.
  Eigen::VectorXcd coherences() const;

 private:
  Eigen::MatrixXcd field(wgchain::Port port) const;
  Eigen::MatrixXcd lowering(int j) const;
  Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v) const;

  wgchain::Chain chain_;
  wgchain::PhysicalParams params_;
  int n_;
  int dim_;
  Eigen::MatrixXcd liouvillian_;
  Eigen::MatrixXcd rho_;
};

}  // namespace oracle

#endif
