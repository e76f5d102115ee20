#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomoforge/moment_report.hpp"
#include "tomoforge/states.hpp"

namespace tomoforge {

struct GlossaryEntry {
  QuantumState state;
  double mean_n = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
  std::map<std::pair<double, int>, double> higher;
};

enum class Verdict { Match, Spurious };
std::string to_string(Verdict v);

struct Classification {
  GlossaryEntry best;
  std::map<std::string, double> relative_errors;  // "mean_n", "var_x", "var_p"
  Verdict verdict = Verdict::Spurious;
  bool squeezed_x = false;
  std::size_t candidates = 0;  // entries within tol on mean_n
  bool tie_break = false;      // variances decided between candidates
};

std::vector<GlossaryEntry> build_glossary(const std::vector<QuantumState>& states);

/// Fock 0..5.
std::vector<QuantumState> fock_states();
/// CS with alpha^2 in {0, 0.1, 0.3, 0.5, 1}.
std::vector<QuantumState> coherent_states();
/// 1-PACS with alpha^2 in {0, 0.1, 0.3, 0.5, 1}.
std::vector<QuantumState> pacs_states();
/// Amplified CS, optimal CS and 1-PACS at one alpha.
std::vector<QuantumState> trio_states(double alpha);
/// All of the above with the trio at alpha in {0.5, 1, 1.5, 2}.
std::vector<QuantumState> combined_states();

/// Entries within tol of the report's mean_n are candidates. A single candidate
/// decides on mean_n alone; several candidates are ranked by the relative error
/// of var_x, then var_p, then mean_n. The verdict is Match when every deciding
/// observable lies within tol, Spurious otherwise.
Classification classify(const MomentReport& report, const std::vector<GlossaryEntry>& glossary,
                        double tol = 0.04);

nlohmann::json glossary_to_json(const std::vector<GlossaryEntry>& glossary);
std::vector<GlossaryEntry> glossary_from_json(const nlohmann::json& j);

void write_classification_csv_header(std::ostream& out);
void write_classification_csv_row(std::ostream& out, const std::string& sample_id,
                                  const MomentReport& report, const Classification& c);

}  // namespace tomoforge
