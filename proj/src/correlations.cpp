#include "wgchain/correlations.hpp"

#include "wgchain/errors.hpp"
#include "wgchain/scattering.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace wgchain {

namespace {

constexpr double kMinRcond = 1e-14;

Eigen::VectorXcd output_weights(const Chain& chain, Port port) {
  const double sign = port == Port::Transmitted ? -1.0 : 1.0;
  return chain.phases.unaryExpr([sign](double phi) { return std::polar(1.0, sign * phi); });
}

double coherent_part(const PhysicalParams& params, Port port) {
  return port == Port::Transmitted ? params.field_amplitude() : 0.0;
}

Eigen::VectorXcd pair_source(const Eigen::VectorXcd& profile, const Eigen::VectorXcd& c1,
                             double rabi) {
  const Eigen::Index n = c1.size();
  Eigen::VectorXcd src(pair_count(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      src[pair_index(n, j, k)] = rabi * (profile[j] * c1[k] + profile[k] * c1[j]);
    }
  }
  return src;
}

}  // namespace

Eigen::Index pair_count(Eigen::Index n) { return n * (n - 1) / 2; }

Eigen::Index pair_index(Eigen::Index n, Eigen::Index j, Eigen::Index k) {
  if (j > k) std::swap(j, k);
  return j * (2 * n - j - 1) / 2 + (k - j - 1);
}

Eigen::MatrixXcd build_h2(const Eigen::MatrixXcd& h1) {
  const Eigen::Index n = h1.rows();
  const Eigen::Index pairs = pair_count(n);
  Eigen::MatrixXcd h2 = Eigen::MatrixXcd::Zero(pairs, pairs);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const Eigen::Index a = pair_index(n, j, k);
      h2(a, a) = h1(j, j) + h1(k, k);
      for (Eigen::Index l = 0; l < n; ++l) {
        if (l == j || l == k) continue;
        h2(pair_index(n, l, k), a) += h1(l, j);
        h2(pair_index(n, j, l), a) += h1(l, k);
      }
    }
  }
  return h2;
}

Complex TruncatedState::pair(Eigen::Index j, Eigen::Index k) const {
  if (j == k) return {0.0, 0.0};
  return c2[pair_index(atoms(), j, k)];
}

const char* to_string(Port port) {
  return port == Port::Transmitted ? "transmitted" : "reflected";
}

TruncatedState steady_state_2ex(const Chain& chain, const PhysicalParams& params) {
  TruncatedState state;
  const Eigen::Index n = chain.size();
  if (n == 0) return state;

  const double rabi = params.rabi_frequency();
  const Eigen::MatrixXcd h1 = build_h1(chain, params);
  const Eigen::VectorXcd profile = drive_profile(chain);
  state.c1 = steady_state(h1, profile, rabi);
  if (n == 1) {
    state.c2.resize(0);
    return state;
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(build_h2(h1));
  const double rcond = lu.rcond();
  if (!(rcond > kMinRcond)) {
    std::ostringstream msg;
    msg << "two-excitation system is singular (rcond " << rcond << ")";
    throw NumericalError(msg.str(), rcond);
  }
  state.c2 = lu.solve(pair_source(profile, state.c1, rabi));
  return state;
}

std::pair<double, double> steady_state_residuals(const TruncatedState& state, const Chain& chain,
                                                 const PhysicalParams& params) {
  if (chain.size() == 0) return {0.0, 0.0};
  const double rabi = params.rabi_frequency();
  const Eigen::MatrixXcd h1 = build_h1(chain, params);
  const Eigen::VectorXcd profile = drive_profile(chain);
  const double r1 = relative_residual(h1, state.c1, rabi * profile);
  if (chain.size() < 2) return {r1, 0.0};
  const double r2 =
      relative_residual(build_h2(h1), state.c2, pair_source(profile, state.c1, rabi));
  return {r1, r2};
}

ConditionalState apply_output(const TruncatedState& state, const Chain& chain,
                              const PhysicalParams& params, Port port) {
  const Eigen::Index n = state.atoms();
  const Eigen::VectorXcd w = output_weights(chain, port);
  const Complex ik(0.0, params.output_coupling());
  const double coh = coherent_part(params, port);

  ConditionalState out;
  out.vacuum = coh * state.g0 + ik * (w.transpose() * state.c1).value();
  out.single = coh * state.c1;
  for (Eigen::Index k = 0; k < n; ++k) {
    Complex acc(0.0, 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != k) acc += w[j] * state.pair(j, k);
    }
    out.single[k] += ik * acc;
  }
  return out;
}

Complex apply_output(const ConditionalState& state, const Chain& chain,
                     const PhysicalParams& params, Port port) {
  const Eigen::VectorXcd w = output_weights(chain, port);
  const Complex ik(0.0, params.output_coupling());
  return coherent_part(params, port) * state.vacuum + ik * (w.transpose() * state.single).value();
}

G2Curve g2_tau(const Chain& chain, const PhysicalParams& params, std::span<const double> tau,
               Port port) {
  G2Curve out;
  out.tau.assign(tau.begin(), tau.end());
  const auto n_tau = static_cast<Eigen::Index>(tau.size());
  const double e2 = params.field_amplitude() * params.field_amplitude();
  const double inf = std::numeric_limits<double>::infinity();

  if (chain.size() == 0) {
    // Coherent input passes untouched.
    out.intensity = port == Port::Transmitted ? 1.0 : 0.0;
    out.divergent = port == Port::Reflected;
    out.numerator = Eigen::VectorXd::Constant(n_tau, port == Port::Transmitted ? 1.0 : 0.0);
    out.g2 = Eigen::VectorXd::Constant(n_tau, out.divergent ? inf : 1.0);
    return out;
  }

  const TruncatedState state = steady_state_2ex(chain, params);
  const ConditionalState detected = apply_output(state, chain, params, port);

  // Single-detection amplitude from the determinant route; the direct sum in
  // detected.vacuum loses all precision for opaque chains.
  const ScatterResult sr = scatter(chain, params);
  const Complex x0 = params.field_amplitude() * (port == Port::Transmitted ? sr.t_amp : sr.r_amp);
  out.intensity = std::norm(x0) / e2;

  // x1(tau) = x0 c1 + exp(-i H1 tau) (x1(0) - x0 c1); the first part emits x0^2.
  const Eigen::VectorXcd offset = detected.single - x0 * state.c1;
  const Propagator propagator(build_h1(chain, params));
  out.path = propagator.path();
  const Eigen::MatrixXcd relax = propagator.evolve(offset, tau);

  out.numerator.resize(n_tau);
  out.g2.resize(n_tau);
  out.divergent = !(out.intensity > 0.0);
  for (Eigen::Index k = 0; k < n_tau; ++k) {
    const ConditionalState moving{Complex(0.0, 0.0), relax.col(k)};
    const Complex amplitude = (x0 * x0 + apply_output(moving, chain, params, port)) / e2;
    out.numerator[k] = std::norm(amplitude);
    if (out.divergent) {
      out.g2[k] = inf;
    } else {
      const double ratio = std::abs(amplitude) / out.intensity;
      out.g2[k] = ratio * ratio;
    }
  }
  if (!out.g2.allFinite()) out.divergent = true;
  return out;
}

}  // namespace wgchain
