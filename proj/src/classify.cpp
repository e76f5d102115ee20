#include "tomoforge/classify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "tomoforge/error.hpp"
#include "tomoforge/moments.hpp"
#include "tomoforge/text.hpp"

namespace tomoforge {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kSquares[] = {0.0, 0.1, 0.3, 0.5, 1.0};

// Lexicographic comparison that treats scores within 1e-12 as equal.
int compare_scores(double a, double b) {
  if (std::abs(a - b) <= 1e-12) return 0;
  return a < b ? -1 : 1;
}

}  // namespace

std::string to_string(Verdict v) { return v == Verdict::Match ? "match" : "spurious"; }

std::vector<GlossaryEntry> build_glossary(const std::vector<QuantumState>& states) {
  if (states.empty()) throw ArgumentError("a glossary needs at least one state");
  std::vector<GlossaryEntry> out;
  out.reserve(states.size());
  for (const auto& s : states) {
    const MomentReport r = theory_observables(s);
    out.push_back({s, r.mean_n, *r.variance_at(0.0), *r.variance_at(kHalfPi), r.higher});
  }
  return out;
}

std::vector<QuantumState> fock_states() {
  std::vector<QuantumState> s;
  for (int n = 0; n <= 5; ++n) s.push_back(QuantumState::fock(n));
  return s;
}

std::vector<QuantumState> coherent_states() {
  std::vector<QuantumState> s;
  for (const double a2 : kSquares) s.push_back(QuantumState::coherent(std::sqrt(a2)));
  return s;
}

std::vector<QuantumState> pacs_states() {
  std::vector<QuantumState> s;
  for (const double a2 : kSquares) s.push_back(QuantumState::photon_added(std::sqrt(a2), 1));
  return s;
}

std::vector<QuantumState> trio_states(double alpha) {
  return {QuantumState::amplified(alpha, 1), QuantumState::optimal(alpha, 1),
          QuantumState::photon_added(alpha, 1)};
}

std::vector<QuantumState> combined_states() {
  std::vector<QuantumState> s = fock_states();
  for (const auto& v : {coherent_states(), pacs_states()}) s.insert(s.end(), v.begin(), v.end());
  for (const double a : {0.5, 1.0, 1.5, 2.0}) {
    const auto t = trio_states(a);
    s.insert(s.end(), t.begin(), t.end());
  }
  return s;
}

Classification classify(const MomentReport& report, const std::vector<GlossaryEntry>& glossary,
                        double tol) {
  if (glossary.empty()) throw ArgumentError("cannot classify against an empty glossary");
  const auto var_x = report.variance_at(0.0);
  const auto var_p = report.variance_at(kHalfPi);

  std::vector<std::size_t> candidates;
  std::size_t nearest = 0;
  double nearest_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < glossary.size(); ++i) {
    const double e = relative_error(report.mean_n, glossary[i].mean_n);
    if (e <= tol) candidates.push_back(i);
    if (e < nearest_err) {
      nearest_err = e;
      nearest = i;
    }
  }

  Classification c;
  c.candidates = candidates.size();
  std::size_t best = nearest;
  if (candidates.size() > 1 && var_x) {
    c.tie_break = true;
    auto score = [&](std::size_t i) {
      const auto& g = glossary[i];
      return std::array<double, 3>{relative_error(*var_x, g.var_x),
                                   var_p ? relative_error(*var_p, g.var_p) : 0.0,
                                   relative_error(report.mean_n, g.mean_n)};
    };
    best = candidates.front();
    auto best_score = score(best);
    for (std::size_t k = 1; k < candidates.size(); ++k) {
      const auto s = score(candidates[k]);
      for (std::size_t d = 0; d < s.size(); ++d) {
        const int cmp = compare_scores(s[d], best_score[d]);
        if (cmp < 0) {
          best = candidates[k];
          best_score = s;
        }
        if (cmp != 0) break;
      }
    }
  }

  c.best = glossary[best];
  c.relative_errors["mean_n"] = relative_error(report.mean_n, c.best.mean_n);
  if (var_x) c.relative_errors["var_x"] = relative_error(*var_x, c.best.var_x);
  if (var_p) c.relative_errors["var_p"] = relative_error(*var_p, c.best.var_p);

  bool ok = c.relative_errors["mean_n"] <= tol;
  if (c.tie_break) ok = ok && c.relative_errors["var_x"] <= tol;
  c.verdict = ok ? Verdict::Match : Verdict::Spurious;
  c.squeezed_x = var_x ? *var_x < 0.5 : c.best.var_x < 0.5;
  return c;
}

nlohmann::json glossary_to_json(const std::vector<GlossaryEntry>& glossary) {
  auto j = nlohmann::json::array();
  for (const auto& g : glossary) {
    j.push_back({{"state", g.state.to_string()}, {"mean_n", g.mean_n}, {"var_x", g.var_x}, {"var_p", g.var_p}});
  }
  return j;
}

std::vector<GlossaryEntry> glossary_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_array() || j.empty()) throw FormatError("glossary must be a nonempty JSON array");
    std::vector<GlossaryEntry> out;
    for (const auto& e : j) {
      GlossaryEntry g;
      g.state = QuantumState::parse(e.at("state").get<std::string>());
      g.mean_n = e.at("mean_n").get<double>();
      g.var_x = e.at("var_x").get<double>();
      g.var_p = e.at("var_p").get<double>();
      out.push_back(std::move(g));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed glossary: ") + e.what());
  }
}

void write_classification_csv_header(std::ostream& out) {
  out << "sample_id,best_state,verdict,mean_n,rel_err_mean_n,var_x,rel_err_var_x,squeezed_x,flags\n";
}

void write_classification_csv_row(std::ostream& out, const std::string& sample_id,
                                  const MomentReport& report, const Classification& c) {
  const auto var_x = report.variance_at(0.0);
  const auto rel_var = c.relative_errors.find("var_x");
  out << sample_id << ',' << c.best.state.to_string() << ',' << to_string(c.verdict) << ','
      << format_double(report.mean_n) << ',' << format_double(c.relative_errors.at("mean_n")) << ','
      << (var_x ? format_double(*var_x) : "") << ','
      << (rel_var != c.relative_errors.end() ? format_double(rel_var->second) : "") << ','
      << (c.squeezed_x ? "true" : "false") << ',';
  for (std::size_t i = 0; i < report.flags.size(); ++i) out << (i ? ";" : "") << to_string(report.flags[i]);
  out << '\n';
}

}  // namespace tomoforge
