#include "wgchain/transfer_matrix.hpp"

#include "wgchain/errors.hpp"
#include "wgchain/scattering.hpp"

#include <cmath>

namespace wgchain {

namespace {

constexpr double kMinAtomTransmission = 1e-12;
constexpr double kMaxTransferEntry = 1e150;

TwoPort atom_two_port(const AtomCoefficients& a) { return {a.t, a.r, a.t, a.r}; }

TwoPort gap_two_port(double phase) {
  const Complex p = std::polar(1.0, phase);
  return {p, 0.0, p, 0.0};
}

}  // namespace

AtomCoefficients atom_coefficients(double delta, double shift, const PhysicalParams& params) {
  const Complex denom(params.gamma0 + params.gamma_prime, -2.0 * (delta - shift));
  const Complex r = -params.gamma0 / denom;
  return {r, 1.0 + r};
}

double segment_phase(double gap_phase, double delta, const PhysicalParams& params) {
  return gap_phase * (1.0 + params.eta * delta / params.gamma0);
}

Eigen::Matrix2cd atom_transfer_matrix(const AtomCoefficients& a) {
  Eigen::Matrix2cd m;
  m << a.t * a.t - a.r * a.r, a.r, -a.r, 1.0;
  return m / a.t;
}

Eigen::Matrix2cd propagation_matrix(double phase) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::polar(1.0, phase);
  m(1, 1) = std::polar(1.0, -phase);
  return m;
}

TwoPort compose(const TwoPort& a, const TwoPort& b) {
  const Complex denom = 1.0 - a.r_bwd * b.r_fwd;
  TwoPort out;
  out.t_fwd = a.t_fwd * b.t_fwd / denom;
  out.r_fwd = a.r_fwd + a.t_fwd * a.t_bwd * b.r_fwd / denom;
  out.t_bwd = b.t_bwd * a.t_bwd / denom;
  out.r_bwd = b.r_bwd + b.t_bwd * b.t_fwd * a.r_bwd / denom;
  return out;
}

Eigen::Matrix2cd chain_transfer_matrix(const Chain& chain, const PhysicalParams& params,
                                       double delta, Eigen::Index begin, Eigen::Index end) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  for (Eigen::Index j = begin; j < end; ++j) {
    if (j > begin) {
      m = propagation_matrix(
              segment_phase(chain.phases[j] - chain.phases[j - 1], delta, params)) *
          m;
    }
    m = atom_transfer_matrix(atom_coefficients(delta, chain.detunings[j], params)) * m;
  }
  return m;
}

TwoPort chain_two_port(const Chain& chain, const PhysicalParams& params, double delta,
                       Eigen::Index begin, Eigen::Index end) {
  TwoPort s;
  for (Eigen::Index j = begin; j < end; ++j) {
    if (j > begin) {
      s = compose(s, gap_two_port(segment_phase(chain.phases[j] - chain.phases[j - 1], delta,
                                                params)));
    }
    s = compose(s, atom_two_port(atom_coefficients(delta, chain.detunings[j], params)));
  }
  return s;
}

TwoPort two_port_from_transfer(const Eigen::Matrix2cd& m) {
  TwoPort s;
  s.t_fwd = m.determinant() / m(1, 1);
  s.r_fwd = -m(1, 0) / m(1, 1);
  s.t_bwd = 1.0 / m(1, 1);
  s.r_bwd = m(0, 1) / m(1, 1);
  return s;
}

TmPoint tm_point(const Chain& chain, const PhysicalParams& params, double delta) {
  const Eigen::Index n = chain.size();
  TmPoint out;
  if (n == 0) return out;

  bool safe = true;
  for (Eigen::Index j = 0; j < n && safe; ++j) {
    safe = std::abs(atom_coefficients(delta, chain.detunings[j], params).t) >=
           kMinAtomTransmission;
  }

  if (safe) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    for (Eigen::Index j = 0; j < n && safe; ++j) {
      if (j > 0) {
        m = propagation_matrix(
                segment_phase(chain.phases[j] - chain.phases[j - 1], delta, params)) *
            m;
      }
      m = atom_transfer_matrix(atom_coefficients(delta, chain.detunings[j], params)) * m;
      safe = m.cwiseAbs().maxCoeff() < kMaxTransferEntry;
    }
    if (safe) {
      // Every factor has unit determinant, so t = 1/M22 without forming det(M).
      out.T = std::norm(1.0 / m(1, 1));
      out.R = std::norm(m(1, 0) / m(1, 1));
      return out;
    }
  }

  const TwoPort s = chain_two_port(chain, params, delta, 0, n);
  out.T = std::norm(s.t_fwd);
  out.R = std::norm(s.r_fwd);
  out.fallback = true;
  return out;
}

TmSpectrum tm_spectrum(const Chain& chain, const PhysicalParams& params,
                       std::span<const double> deltas) {
  for (Eigen::Index j = 1; j < chain.size(); ++j) {
    if (chain.phases[j] < chain.phases[j - 1]) {
      throw ConfigError("transfer matrices need atoms sorted by position");
    }
  }
  TmSpectrum out;
  out.delta.assign(deltas.begin(), deltas.end());
  out.T.reserve(deltas.size());
  out.R.reserve(deltas.size());
  for (double delta : deltas) {
    const TmPoint p = tm_point(chain, params, delta);
    out.T.push_back(p.T);
    out.R.push_back(p.R);
    out.fallback_count += p.fallback ? 1 : 0;
  }
  return out;
}

DeviationMetrics compare_markovian(const Chain& chain, const PhysicalParams& params,
                                   std::span<const double> deltas) {
  const TmSpectrum tm = tm_spectrum(chain, params, deltas);
  const std::vector<ScatterResult> h = spectrum_scan(chain, params, deltas);

  DeviationMetrics out;
  out.delta.assign(deltas.begin(), deltas.end());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double dT = std::abs(tm.T[i] - h[i].T);
    const double dR = std::abs(tm.R[i] - h[i].R);
    out.abs_dT.push_back(dT);
    out.abs_dR.push_back(dR);
    out.max_dT = std::max(out.max_dT, dT);
    out.max_dR = std::max(out.max_dR, dR);
    out.mean_dT += dT;
    out.mean_dR += dR;
  }
  if (!deltas.empty()) {
    out.mean_dT /= static_cast<double>(deltas.size());
    out.mean_dR /= static_cast<double>(deltas.size());
  }
  return out;
}

}  // namespace wgchain
