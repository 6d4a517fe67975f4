#include "wgchain/dynamics.hpp"

#include "wgchain/errors.hpp"
#include "wgchain/scattering.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>

namespace wgchain {

namespace {

constexpr double kMinModeRcond = 1e-12;
constexpr double kNormGrowthTol = 1e-9;

void check_grid(std::span<const double> times) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || times[k] < 0.0) {
      throw ConfigError("time grid must be finite and non-negative");
    }
    if (k > 0 && times[k] <= times[k - 1]) throw ConfigError("time grid must be increasing");
  }
}

}  // namespace

const char* to_string(PropagatorPath path) {
  switch (path) {
    case PropagatorPath::Eigendecomposition:
      return "eigendecomposition";
    case PropagatorPath::ScalingAndSquaring:
      return "scaling-and-squaring";
  }
  return "unknown";
}

Propagator::Propagator(const Eigen::MatrixXcd& h, PropagatorPath preferred)
    : h_(h), path_(preferred) {
  if (h_.rows() == 0 || path_ != PropagatorPath::Eigendecomposition) return;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h_);
  if (solver.info() != Eigen::Success) {
    path_ = PropagatorPath::ScalingAndSquaring;
    return;
  }
  modes_ = solver.eigenvectors();
  modes_lu_.compute(modes_);
  if (!(modes_lu_.rcond() > kMinModeRcond)) {
    path_ = PropagatorPath::ScalingAndSquaring;
    modes_.resize(0, 0);
    return;
  }
  eigenvalues_ = solver.eigenvalues();
}

Eigen::VectorXcd Propagator::apply(const Eigen::VectorXcd& v, double t) const {
  if (h_.rows() == 0) return v;
  if (path_ == PropagatorPath::Eigendecomposition) {
    const Eigen::VectorXcd w = modes_lu_.solve(v);
    const Eigen::VectorXcd phases =
        eigenvalues_.unaryExpr([t](Complex lambda) { return std::exp(Complex(0, -1) * lambda * t); });
    return modes_ * phases.cwiseProduct(w);
  }
  const Eigen::MatrixXcd step = (Complex(0, -t) * h_).exp();
  return step * v;
}

Eigen::MatrixXcd Propagator::evolve(const Eigen::VectorXcd& v,
                                    std::span<const double> times) const {
  check_grid(times);
  const auto n_times = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXcd out(v.size(), n_times);
  if (h_.rows() == 0) return out;

  if (path_ == PropagatorPath::Eigendecomposition) {
    const Eigen::VectorXcd w = modes_lu_.solve(v);
    for (Eigen::Index k = 0; k < n_times; ++k) {
      const double t = times[static_cast<std::size_t>(k)];
      const Eigen::VectorXcd phases = eigenvalues_.unaryExpr(
          [t](Complex lambda) { return std::exp(Complex(0, -1) * lambda * t); });
      out.col(k) = modes_ * phases.cwiseProduct(w);
    }
    return out;
  }

  // Step from grid point to grid point; equal steps share one exponential.
  std::map<double, Eigen::MatrixXcd> steps;
  Eigen::VectorXcd current = v;
  double t_prev = 0.0;
  for (Eigen::Index k = 0; k < n_times; ++k) {
    const double dt = times[static_cast<std::size_t>(k)] - t_prev;
    if (dt > 0.0) {
      auto it = steps.find(dt);
      if (it == steps.end()) it = steps.emplace(dt, (Complex(0, -dt) * h_).exp()).first;
      current = it->second * current;
    }
    out.col(k) = current;
    t_prev = times[static_cast<std::size_t>(k)];
  }
  return out;
}

Eigen::VectorXd Evolution::population(Eigen::Index atom) const {
  return amplitudes.row(atom).cwiseAbs2().transpose();
}

Evolution evolve_1ex(const Eigen::MatrixXcd& h1, const Eigen::VectorXcd& initial,
                     std::span<const double> times, PropagatorPath preferred) {
  if (initial.size() != h1.rows()) throw ConfigError("initial vector does not match H1");
  if (initial.size() > 0 && std::abs(initial.norm() - 1.0) > 1e-12) {
    throw ConfigError("initial vector must be normalized");
  }
  check_grid(times);

  const Propagator propagator(h1, preferred);
  Evolution out;
  out.times.assign(times.begin(), times.end());
  out.path = propagator.path();
  out.amplitudes = propagator.evolve(initial, times);

  double previous = initial.norm();
  for (Eigen::Index k = 0; k < out.amplitudes.cols(); ++k) {
    const double norm = out.amplitudes.col(k).norm();
    if (norm > previous * (1.0 + kNormGrowthTol) + 1e-14) {
      throw NumericalError("single-excitation norm increased during evolution");
    }
    previous = norm;
  }
  return out;
}

Eigen::VectorXd central_population(const CavityRealization& cavity, const PhysicalParams& params,
                                   std::span<const double> times, PropagatorPath preferred) {
  PhysicalParams undriven = params;
  undriven.delta = 0.0;
  const Eigen::MatrixXcd h1 = build_h1(cavity.chain, undriven);
  const Eigen::VectorXcd initial = Eigen::VectorXcd::Unit(cavity.chain.size(), cavity.central);
  return evolve_1ex(h1, initial, times, preferred).population(cavity.central);
}

}  // namespace wgchain
