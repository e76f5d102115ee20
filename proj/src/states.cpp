#include "tomoforge/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tomoforge/error.hpp"
#include "tomoforge/text.hpp"

namespace tomoforge {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::complex<double>> coherent_coefficients(double amplitude,
                                                        const FockBasisCutoff& cutoff) {
  std::vector<std::complex<double>> c(static_cast<std::size_t>(cutoff.n_max));
  double value = std::exp(-0.5 * amplitude * amplitude);
  double norm = 0.0;
  for (int k = 0; k < cutoff.n_max; ++k) {
    if (k > 0) value *= amplitude / std::sqrt(static_cast<double>(k));
    c[static_cast<std::size_t>(k)] = value;
    norm += value * value;
  }
  if (norm < 1.0 - cutoff.norm_tolerance) {
    throw CutoffError("Fock cutoff " + std::to_string(cutoff.n_max) +
                      " too small for coherent amplitude " + format_double(amplitude) +
                      " (truncated norm " + format_double(norm) + ")");
  }
  return c;
}

// Cutoff large enough for gain() to be evaluated at any moderate amplitude.
FockBasisCutoff cutoff_for(double alpha, int m) {
  FockBasisCutoff cutoff;
  const double reach = std::abs(alpha) + std::sqrt(static_cast<double>(m)) + 8.0;
  cutoff.n_max = std::max(cutoff.n_max, static_cast<int>(std::ceil(reach * reach)) + m);
  return cutoff;
}

}  // namespace

QuantumState QuantumState::fock(int n) {
  QuantumState s;
  s.kind = StateKind::Fock;
  s.n = n;
  s.validate();
  return s;
}

QuantumState QuantumState::coherent(double alpha) {
  QuantumState s;
  s.kind = StateKind::Coherent;
  s.alpha = alpha;
  s.validate();
  return s;
}

QuantumState QuantumState::photon_added(double alpha, int m) {
  QuantumState s;
  s.kind = StateKind::PhotonAddedCS;
  s.alpha = alpha;
  s.m = m;
  s.validate();
  return s;
}

QuantumState QuantumState::amplified(double alpha, int m) {
  QuantumState s;
  s.kind = StateKind::AmplifiedCS;
  s.alpha = alpha;
  s.m = m;
  s.validate();
  return s;
}

QuantumState QuantumState::optimal(double alpha, int m) {
  QuantumState s;
  s.kind = StateKind::OptimalCS;
  s.alpha = alpha;
  s.m = m;
  s.validate();
  return s;
}

void QuantumState::validate() const {
  if (!std::isfinite(alpha)) throw ArgumentError("alpha must be finite");
  switch (kind) {
    case StateKind::Fock:
      if (n < 0) throw ArgumentError("Fock photon number must be nonnegative");
      if (n > kMaxFockIndex) throw RangeError("Fock photon number above supported range");
      break;
    case StateKind::Coherent:
      break;
    case StateKind::PhotonAddedCS:
      if (m < 1) throw ArgumentError("photon-added state needs m >= 1");
      break;
    case StateKind::AmplifiedCS:
      if (m < 1) throw ArgumentError("amplified state needs m >= 1");
      if (alpha == 0.0) throw DomainError("gain is undefined at alpha = 0");
      break;
    case StateKind::OptimalCS:
      if (m < 1) throw ArgumentError("optimal state needs m >= 1");
      if (alpha <= 0.0) throw DomainError("beta_opt requires alpha > 0");
      break;
  }
}

std::string QuantumState::to_string() const {
  switch (kind) {
    case StateKind::Fock:
      return "fock:" + std::to_string(n);
    case StateKind::Coherent:
      return "cs:" + format_double(alpha);
    case StateKind::PhotonAddedCS:
      return "pacs:" + format_double(alpha) + ":" + std::to_string(m);
    case StateKind::AmplifiedCS:
      return "amp:" + format_double(alpha) + ":" + std::to_string(m);
    case StateKind::OptimalCS:
      return "opt:" + format_double(alpha) + ":" + std::to_string(m);
  }
  return {};
}

QuantumState QuantumState::parse(std::string_view text) {
  const auto parts = split(trim(text), ':');
  const std::string_view family = parts[0];
  auto order = [&](std::size_t i) {
    return parts.size() > i ? static_cast<int>(parse_int(parts[i])) : 1;
  };
  try {
    if (family == "fock" && parts.size() == 2) {
      return fock(static_cast<int>(parse_int(parts[1])));
    }
    if (family == "cs" && parts.size() == 2) return coherent(parse_real_expr(parts[1]));
    if (parts.size() == 2 || parts.size() == 3) {
      if (family == "pacs") return photon_added(parse_real_expr(parts[1]), order(2));
      if (family == "amp") return amplified(parse_real_expr(parts[1]), order(2));
      if (family == "opt") return optimal(parse_real_expr(parts[1]), order(2));
    }
  } catch (const FormatError& e) {
    throw ArgumentError("bad state '" + std::string(text) + "': " + e.what());
  }
  throw ArgumentError("bad state '" + std::string(text) +
                      "' (expected fock:N, cs:A, pacs:A[:M], amp:A[:M] or opt:A[:M])");
}

double QuantumState::coherent_amplitude() const {
  switch (kind) {
    case StateKind::Coherent:
      return alpha;
    case StateKind::AmplifiedCS:
      return gain(alpha, m) * alpha;
    case StateKind::OptimalCS:
      return beta_opt(alpha, m);
    default:
      throw ArgumentError("state " + to_string() + " is not a coherent state");
  }
}

void fock_wavefunctions(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (out.size() == 1) return;
  out[1] = std::sqrt(2.0) * x * out[0];
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = std::sqrt(2.0 / (kk + 1.0)) * x * out[k] - std::sqrt(kk / (kk + 1.0)) * out[k - 1];
  }
}

double fock_wavefunction(int n, double x) {
  if (n < 0 || n > kMaxFockIndex) {
    throw RangeError("Fock index " + std::to_string(n) + " outside [0, " +
                     std::to_string(kMaxFockIndex) + "]");
  }
  std::vector<double> psi(static_cast<std::size_t>(n) + 1);
  fock_wavefunctions(x, psi);
  return psi.back();
}

double hermite(int n, double x) {
  if (n < 0) throw RangeError("negative Hermite order");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double laguerre(int n, double k, double x) {
  if (n < 0) throw RangeError("negative Laguerre order");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + k - x;
  for (int j = 1; j < n; ++j) {
    const double next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<std::complex<double>> pacs_coefficients(double alpha, int m,
                                                    const FockBasisCutoff& cutoff) {
  if (m < 1) throw ArgumentError("photon-added state needs m >= 1");
  if (m >= cutoff.n_max) throw CutoffError("Fock cutoff below the number of added photons");
  const auto cs = coherent_coefficients(alpha, FockBasisCutoff{cutoff.n_max, 1.0});
  std::vector<std::complex<double>> c(static_cast<std::size_t>(cutoff.n_max));
  double norm = 0.0;
  for (int k = m; k < cutoff.n_max; ++k) {
    // (a^dagger)^m |k - m> = sqrt(k! / (k - m)!) |k>
    double factor = 1.0;
    for (int j = k - m + 1; j <= k; ++j) factor *= std::sqrt(static_cast<double>(j));
    c[static_cast<std::size_t>(k)] = factor * cs[static_cast<std::size_t>(k - m)];
    norm += std::norm(c[static_cast<std::size_t>(k)]);
  }
  double exact = laguerre(m, 0.0, -alpha * alpha);
  for (int j = 2; j <= m; ++j) exact *= j;
  if (norm < (1.0 - cutoff.norm_tolerance) * exact) {
    throw CutoffError("Fock cutoff " + std::to_string(cutoff.n_max) +
                      " too small for photon-added state alpha=" + format_double(alpha));
  }
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& v : c) v *= scale;
  return c;
}

std::vector<std::complex<double>> fock_coefficients(const QuantumState& state,
                                                    const FockBasisCutoff& cutoff) {
  state.validate();
  if (cutoff.n_max < 1) throw ArgumentError("Fock cutoff must be positive");
  switch (state.kind) {
    case StateKind::Fock: {
      if (state.n >= cutoff.n_max) {
        throw CutoffError("Fock cutoff " + std::to_string(cutoff.n_max) + " cannot hold |" +
                          std::to_string(state.n) + ">");
      }
      std::vector<std::complex<double>> c(static_cast<std::size_t>(cutoff.n_max));
      c[static_cast<std::size_t>(state.n)] = 1.0;
      return c;
    }
    case StateKind::PhotonAddedCS:
      return pacs_coefficients(state.alpha, state.m, cutoff);
    default:
      return coherent_coefficients(state.coherent_amplitude(), cutoff);
  }
}

double gain(double alpha, int m) {
  if (alpha == 0.0) throw DomainError("gain is undefined at alpha = 0");
  if (m < 1) throw ArgumentError("gain order must be >= 1");
  const auto c = pacs_coefficients(alpha, m, cutoff_for(alpha, m));
  std::complex<double> mean_a = 0.0;
  for (std::size_t k = 0; k + 1 < c.size(); ++k) {
    mean_a += std::conj(c[k]) * c[k + 1] * std::sqrt(static_cast<double>(k + 1));
  }
  return mean_a.real() / alpha;
}

double beta_opt(double alpha, int m) {
  if (!(alpha > 0.0)) throw DomainError("beta_opt requires alpha > 0");
  if (m < 1) throw ArgumentError("beta_opt order must be >= 1");
  return alpha * (1.0 + std::sqrt(1.0 + 4.0 * m / (alpha * alpha))) / 2.0;
}

double fidelity(const QuantumState& a, const QuantumState& b, const FockBasisCutoff& cutoff) {
  const auto ca = fock_coefficients(a, cutoff);
  const auto cb = fock_coefficients(b, cutoff);
  std::complex<double> overlap = 0.0;
  for (std::size_t k = 0; k < ca.size(); ++k) overlap += std::conj(ca[k]) * cb[k];
  return std::norm(overlap);
}

LadderMoments ladder_moments(const QuantumState& state) {
  state.validate();
  LadderMoments out;
  switch (state.kind) {
    case StateKind::Fock:
      out.mean_n = state.n;
      break;
    case StateKind::PhotonAddedCS: {
      const double x = -state.alpha * state.alpha;
      const double base = laguerre(state.m, 0.0, x);
      out.mean_n = (state.m + 1) * laguerre(state.m + 1, 0.0, x) / base - 1.0;
      out.a1 = state.alpha * laguerre(state.m, 1.0, x) / base;
      out.a2 = state.alpha * state.alpha * laguerre(state.m, 2.0, x) / base;
      break;
    }
    default: {
      const double amp = state.coherent_amplitude();
      out.mean_n = amp * amp;
      out.a1 = amp;
      out.a2 = amp * amp;
      break;
    }
  }
  return out;
}

double theory_quadrature_mean(const QuantumState& state, double theta) {
  const auto lm = ladder_moments(state);
  return std::sqrt(2.0) * (lm.a1 * std::polar(1.0, -theta)).real();
}

double theory_quadrature_variance(const QuantumState& state, double theta) {
  const auto lm = ladder_moments(state);
  const double mean = std::sqrt(2.0) * (lm.a1 * std::polar(1.0, -theta)).real();
  const double second = ((lm.a2 * std::polar(1.0, -2.0 * theta)).real() + lm.mean_n + 0.5);
  return second - mean * mean;
}

MomentReport theory_observables(const QuantumState& state) {
  MomentReport report;
  report.mean_n = ladder_moments(state).mean_n;
  for (const double theta : {0.0, kPi / 2.0}) {
    report.quad_mean[theta] = theory_quadrature_mean(state, theta);
    report.quad_var[theta] = theory_quadrature_variance(state, theta);
  }
  return report;
}

}  // namespace tomoforge
