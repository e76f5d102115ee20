#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tomoforge {

enum class QualityFlag {
  SpuriousSample,     // mean_n further than the tolerance from every glossary value
  ForeignPixel,       // decoded image carried off-palette pixels
  Cutoff,             // Fock truncation was insufficient
  NegativeMeanN,      // quadrature produced a slightly negative <n>
  ImaginaryResidual,  // Im <a^dagger a> above 1e-6
};

std::string to_string(QualityFlag flag);
QualityFlag quality_flag_from_string(const std::string& text);

/// Observables extracted from one tomogram (or computed in closed form).
struct MomentReport {
  double mean_n = 0.0;
  std::map<double, double> quad_mean;                // theta -> <X_theta>
  std::map<double, double> quad_var;                 // theta -> Delta X_theta^2
  std::map<std::pair<double, int>, double> higher;   // (theta, k) -> <X_theta^k>
  std::vector<QualityFlag> flags;

  std::optional<double> variance_at(double theta, double tol = 1e-9) const;
  bool has_flag(QualityFlag flag) const;
  void add_flag(QualityFlag flag);
};

}  // namespace tomoforge
