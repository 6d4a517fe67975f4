#ifndef WGCHAIN_DYNAMICS_HPP
#define WGCHAIN_DYNAMICS_HPP

#include "wgchain/model.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace wgchain {

enum class PropagatorPath { Eigendecomposition, ScalingAndSquaring };

const char* to_string(PropagatorPath path);

/// exp(-i H t) for a fixed non-Hermitian generator H.
///
/// The modal form V exp(-i Lambda t) V^-1 is used unless V is numerically
/// singular (H defective or close to it), in which case every step is a Pade
/// scaling-and-squaring exponential.
class Propagator {
 public:
  explicit Propagator(const Eigen::MatrixXcd& h,
                      PropagatorPath preferred = PropagatorPath::Eigendecomposition);

  PropagatorPath path() const { return path_; }
  Eigen::Index size() const { return h_.rows(); }

  /// Eigenvalues of H; empty on the scaling-and-squaring path.
  const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v, double t) const;

  /// Column k holds exp(-i H t_k) v. Times must be non-negative and increasing.
  Eigen::MatrixXcd evolve(const Eigen::VectorXcd& v, std::span<const double> times) const;

 private:
  Eigen::MatrixXcd h_;
  PropagatorPath path_;
  Eigen::VectorXcd eigenvalues_;
  Eigen::MatrixXcd modes_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> modes_lu_;
};

struct Evolution {
  std::vector<double> times;
  Eigen::MatrixXcd amplitudes;  // n x times.size()
  PropagatorPath path = PropagatorPath::Eigendecomposition;

  /// |a_j(t_k)|^2 for one atom.
  Eigen::VectorXd population(Eigen::Index atom) const;
};

/// Undriven single-excitation evolution from a normalized initial vector.
/// Throws ConfigError on a bad grid or initial vector, NumericalError if the
/// norm grows between grid points (it cannot for gamma' >= 0).
Evolution evolve_1ex(const Eigen::MatrixXcd& h1, const Eigen::VectorXcd& initial,
                     std::span<const double> times,
                     PropagatorPath preferred = PropagatorPath::Eigendecomposition);

/// p_e(t) of the central cavity atom, evolved under H1 at zero detuning.
Eigen::VectorXd central_population(const CavityRealization& cavity, const PhysicalParams& params,
                                   std::span<const double> times,
                                   PropagatorPath preferred = PropagatorPath::Eigendecomposition);

}  // namespace wgchain

#endif  // WGCHAIN_DYNAMICS_HPP
