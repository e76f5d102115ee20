#pragma once

#include <span>
#include <string>
#include <vector>

#include "tomoforge/quadrature_pdf.hpp"

namespace tomoforge {

enum class EstimateKind { PdfW1, CriticDuality };

struct WassersteinEstimate {
  double value = 0.0;
  EstimateKind kind = EstimateKind::PdfW1;
};

std::string to_string(EstimateKind kind);

/// Cumulative trapezoid integral, starting at 0.
std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y);

/// W1 = integral |F - G| dx with F, G the cumulative distributions of two
/// normalized pdfs on the same grid. Throws ArgumentError on grid mismatch
/// and ContractError on unnormalized input.
double w1_pdf(const QuadraturePdf& f, const QuadraturePdf& g);

/// mean(real) - mean(fake). Throws ArgumentError on an empty batch.
double critic_duality_gap(std::span<const double> real_scores, std::span<const double> fake_scores);

}  // namespace tomoforge
