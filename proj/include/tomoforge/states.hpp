#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tomoforge/moment_report.hpp"

namespace tomoforge {

/// Families of pure single-mode states. Amplitudes are real throughout.
enum class StateKind { Fock, Coherent, PhotonAddedCS, AmplifiedCS, OptimalCS };

/// Tagged description of an analytic state.
///
/// AmplifiedCS(alpha, m) is the coherent state of amplitude gain(alpha, m) * alpha;
/// OptimalCS(alpha, m) is the coherent state of amplitude beta_opt(alpha, m).
struct QuantumState {
  StateKind kind = StateKind::Fock;
  int n = 0;           // photon number (Fock)
  double alpha = 0.0;  // coherent amplitude
  int m = 0;           // photons added / gain order

  static QuantumState fock(int n);
  static QuantumState coherent(double alpha);
  static QuantumState photon_added(double alpha, int m = 1);
  static QuantumState amplified(double alpha, int m = 1);
  static QuantumState optimal(double alpha, int m = 1);

  /// Throws ArgumentError when the invariants of the kind are broken.
  void validate() const;

  /// Compact textual form understood by parse(): "fock:2", "cs:0.5",
  /// "pacs:1.5:1", "amp:1.5:1", "opt:1.5:1".
  std::string to_string() const;
  static QuantumState parse(std::string_view text);

  /// Amplitude of the coherent state this describes (Coherent/AmplifiedCS/OptimalCS).
  double coherent_amplitude() const;

  bool operator==(const QuantumState&) const = default;
};

/// Truncation of the Fock expansion used to evaluate quadrature densities.
struct FockBasisCutoff {
  int n_max = 64;                 // keep |0>..|n_max - 1>
  double norm_tolerance = 1e-10;  // required truncated norm is 1 - norm_tolerance
};

inline constexpr int kMaxFockIndex = 256;

/// Hermite-Gauss function psi_n(x) = (2^n n! sqrt(pi))^(-1/2) H_n(x) exp(-x^2/2).
double fock_wavefunction(int n, double x);

/// psi_0(x) .. psi_{count-1}(x) written into `out` by the normalized upward recurrence.
void fock_wavefunctions(double x, std::span<double> out);

/// Physicists' Hermite polynomial H_n(x).
double hermite(int n, double x);

/// Generalized Laguerre polynomial L_n^(k)(x).
double laguerre(int n, double k, double x);

/// Fock coefficients c_0..c_{n_max-1} of the state. Throws CutoffError when
/// the truncated norm falls below 1 - cutoff.norm_tolerance.
std::vector<std::complex<double>> fock_coefficients(const QuantumState& state,
                                                    const FockBasisCutoff& cutoff = {});

/// Normalized Fock coefficients of |alpha, m> proportional to (a^dagger)^m |alpha>.
std::vector<std::complex<double>> pacs_coefficients(double alpha, int m,
                                                    const FockBasisCutoff& cutoff = {});

/// Amplification gain g_m(alpha) = <alpha,m| a |alpha,m> / alpha, evaluated
/// from the PACS Fock coefficients.
double gain(double alpha, int m);

/// Amplitude of the coherent state with maximal fidelity to |alpha, m>.
double beta_opt(double alpha, int m);

/// |<a|b>|^2 evaluated in the truncated Fock basis.
double fidelity(const QuantumState& a, const QuantumState& b, const FockBasisCutoff& cutoff = {});

/// Closed-form ladder moments of a state: <a^dagger a>, <a>, <a^2>.
struct LadderMoments {
  double mean_n = 0.0;
  std::complex<double> a1;
  std::complex<double> a2;
};

LadderMoments ladder_moments(const QuantumState& state);

/// Closed-form quadrature mean and variance of X_theta.
double theory_quadrature_mean(const QuantumState& state, double theta);
double theory_quadrature_variance(const QuantumState& state, double theta);

/// Closed-form <n>, <x>, <p>, Delta x^2 and Delta p^2 (theta = 0 and pi/2).
MomentReport theory_observables(const QuantumState& state);

}  // namespace tomoforge
