#include "wgchain/scattering.hpp"

#include "wgchain/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace wgchain {

namespace {

constexpr double kMinRcond = 1e-14;

Complex diagonal_shift(const PhysicalParams& params, double atom_shift) {
  return -Complex(params.delta - atom_shift, params.gamma_prime / 2.0);
}

}  // namespace

Eigen::MatrixXcd build_h1(const Chain& chain, const PhysicalParams& params) {
  const Eigen::Index n = chain.size();
  const Complex exchange(0.0, -params.gamma0 / 2.0);
  Eigen::MatrixXcd h(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = k; j < n; ++j) {
      const double phase = std::abs(chain.phases[j] - chain.phases[k]);
      const Complex v = exchange * std::polar(1.0, phase);
      h(j, k) = v;
      h(k, j) = v;
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    h(j, j) += diagonal_shift(params, chain.detunings[j]);
  }
  return h;
}

Eigen::VectorXcd drive_profile(const Chain& chain) {
  return chain.phases.unaryExpr([](double phi) { return std::polar(1.0, phi); });
}

Eigen::VectorXcd steady_state(const Eigen::MatrixXcd& h1, const Eigen::VectorXcd& profile,
                              double rabi) {
  if (h1.rows() == 0) return Eigen::VectorXcd();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(h1);
  const double rcond = lu.rcond();
  if (!(rcond > kMinRcond)) {
    std::ostringstream msg;
    msg << "single-excitation system is singular (rcond " << rcond << ")";
    throw NumericalError(msg.str(), rcond);
  }
  return rabi * lu.solve(profile);
}

double relative_residual(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& x,
                         const Eigen::VectorXcd& b) {
  const double nb = b.norm();
  if (nb == 0.0) return (a * x).norm();
  return (a * x - b).norm() / nb;
}

bool ScatterResult::opaque() const { return std::isinf(D); }

double optical_depth(double transmittance) {
  if (!(transmittance >= 0.0)) throw ConfigError("optical depth needs T >= 0");
  if (transmittance == 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(transmittance);
}

ScatterResult output_amplitudes(const Eigen::VectorXcd& c, const Chain& chain,
                                const PhysicalParams& params) {
  const Complex prefactor =
      Complex(0.0, 1.0) * params.output_coupling() / params.field_amplitude();
  const Eigen::VectorXcd profile = drive_profile(chain);
  ScatterResult out;
  out.t_amp = 1.0 + prefactor * profile.dot(c);  // dot conjugates the profile
  out.r_amp = prefactor * (profile.transpose() * c).value();
  out.T = std::norm(out.t_amp);
  out.R = std::norm(out.r_amp);
  out.D = optical_depth(out.T);
  return out;
}

ScatterResult scatter(const Chain& chain, const PhysicalParams& params,
                      TransmissionRoute route) {
  if (chain.size() == 0) return ScatterResult{};
  const Eigen::MatrixXcd h1 = build_h1(chain, params);
  const Eigen::VectorXcd profile = drive_profile(chain);

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(h1);
  const double rcond = lu.rcond();
  if (!(rcond > kMinRcond)) {
    std::ostringstream msg;
    msg << "single-excitation system is singular (rcond " << rcond << ")";
    throw NumericalError(msg.str(), rcond);
  }
  const Eigen::VectorXcd c = params.rabi_frequency() * lu.solve(profile);
  ScatterResult out = output_amplitudes(c, chain, params);
  if (route == TransmissionRoute::InputOutputSum) return out;

  // log t = sum_j log(num_j) - log det H1; the permutation of the LU factor
  // contributes its sign.
  Complex log_t(0.0, 0.0);
  bool zero_numerator = false;
  const auto& lu_matrix = lu.matrixLU();
  for (Eigen::Index j = 0; j < chain.size(); ++j) {
    const Complex num = diagonal_shift(params, chain.detunings[j]);
    if (num == Complex(0.0, 0.0)) zero_numerator = true;
    log_t += std::log(num) - std::log(lu_matrix(j, j));
  }
  if (lu.permutationP().determinant() < 0) log_t -= Complex(0.0, kPi);

  if (zero_numerator) {
    out.t_amp = 0.0;
    out.T = 0.0;
    out.D = std::numeric_limits<double>::infinity();
  } else {
    out.t_amp = std::exp(log_t);
    out.T = std::norm(out.t_amp);
    out.D = -2.0 * log_t.real();
  }
  return out;
}

std::vector<ScatterResult> spectrum_scan(const Chain& chain, PhysicalParams params,
                                         std::span<const double> deltas,
                                         TransmissionRoute route) {
  if (deltas.empty()) throw ConfigError("spectrum scan needs a non-empty detuning grid");
  std::vector<ScatterResult> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    params.delta = delta;
    try {
      out.push_back(scatter(chain, params, route));
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << e.what() << " at delta = " << delta;
      throw NumericalError(msg.str(), e.rcond());
    }
  }
  return out;
}

}  // namespace wgchain
