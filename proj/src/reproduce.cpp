#include "temai/reproduce.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "temai/canonical.hpp"
#include "temai/reports.hpp"
#include "temai/scoring.hpp"

namespace temai {

namespace {

constexpr double kScoreTolerance = 0.03;
constexpr double kRateTolerancePoints = 0.05;
constexpr double kDeltaTolerance = 0.05;

ReproductionCheck check(std::string name, double expected, double actual, double tolerance,
                        std::string unit = {}) {
  ReproductionCheck c{std::move(name), expected, actual, tolerance, std::move(unit), false};
  c.pass = std::abs(actual - expected) <= tolerance + 1e-12;
  return c;
}

void stage_checks(std::vector<ReproductionCheck>& out, const std::string& label,
                  const StageScores& s, const canonical::PublishedStages& p) {
  out.push_back(check(label + " capability", p.capability_score, s.capability_score, kScoreTolerance));
  out.push_back(check(label + " adoption rate", p.adoption_rate * 100, s.adoption_rate * 100,
                      kRateTolerancePoints, "%"));
  out.push_back(check(label + " effective capability", p.effective_capability,
                      s.effective_capability, kScoreTolerance));
  out.push_back(check(label + " utility rate", p.utility_rate * 100, s.utility_rate * 100,
                      kRateTolerancePoints, "%"));
  out.push_back(check(label + " final value", p.final_value, s.final_value, kScoreTolerance));
}

}  // namespace

bool ReproductionReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

ReproductionReport reproduce_case_studies() {
  const Pipeline store(canonical::framework(), canonical::store_weights());
  const Pipeline pv(canonical::framework(), canonical::pv_weights());
  const auto retail = store.run(canonical::retail_assessment(), ChainMode::reported);
  const auto solar = pv.run(canonical::pv_assessment(), ChainMode::reported);

  ReproductionReport r;
  stage_checks(r.checks, "retail", retail.scores, canonical::kRetailPublished);
  stage_checks(r.checks, "pv", solar.scores, canonical::kPvPublished);

  r.checks.push_back(check("retail appendix final",
                           canonical::kRetailAppendixFinal,
                           retail.appendix_final, kScoreTolerance));
  r.checks.push_back(check("pv appendix final",
                           canonical::kPvAppendixFinal,
                           solar.appendix_final, kScoreTolerance));

  r.checks.push_back(check("capability difference", canonical::kPublishedCapabilityGap,
                           solar.scores.capability_score - retail.scores.capability_score,
                           kDeltaTolerance));
  r.checks.push_back(check("adoption rate gap", canonical::kPublishedAdoptionGapPoints,
                           (solar.scores.adoption_rate - retail.scores.adoption_rate) * 100,
                           kDeltaTolerance, "pp"));
  auto ratio = check("pv/retail final ratio", 2.0,
                     solar.scores.final_value / retail.scores.final_value, 0.0, "x");
  ratio.pass = ratio.actual > 2.0;
  r.checks.push_back(ratio);

  for (const auto* res : {&retail, &solar}) {
    r.discrepancies.push_back(
        {res->assessment_id, res->scores.adoption_rate, res->appendix_final, res->reported_final});
  }
  return r;
}

std::string format_report(const ReproductionReport& report) {
  std::string out = fmt::format("{:<32}{:>10}{:>10}{:>8}  {}\n", "check", "published", "computed",
                                "tol", "result");
  for (const auto& c : report.checks) {
    const bool is_ratio = c.unit == "x";
    const std::string tol = is_ratio ? std::string(">") : fmt::format("±{:.2f}", c.tolerance);
    out += fmt::format("{:<32}{:>10.2f}{:>10.2f}{:>8}  {}\n", c.name + (c.unit.empty() ? "" : " (" + c.unit + ")"),
                       c.expected, c.actual, tol, c.pass ? "PASS" : "FAIL");
  }
  out += "\nchain modes (appendix = C*a*u, reported = C*a^2*u):\n";
  out += fmt::format("{:<26}{:>10}{:>10}{:>10}{:>10}\n", "assessment", "a", "appendix", "reported",
                     "a*appx");
  for (const auto& d : report.discrepancies) {
    out += fmt::format("{:<26}{:>10.4f}{:>10.2f}{:>10.2f}{:>10.2f}\n", d.case_id, d.adoption_rate,
                       d.appendix_final, d.reported_final, d.appendix_final * d.adoption_rate);
  }
  out += fmt::format("\n{}\n", report.all_pass() ? "all checks PASS" : "reproduction FAILED");
  return out;
}

Json to_json(const ReproductionReport& report) {
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"expected", c.expected},
                      {"actual", round_to(c.actual, kRateDigits)},
                      {"tolerance", c.tolerance},
                      {"unit", c.unit},
                      {"pass", c.pass}});
  }
  Json modes = Json::array();
  for (const auto& d : report.discrepancies) {
    modes.push_back({{"assessment_id", d.case_id},
                     {"adoption_rate", round_to(d.adoption_rate, kRateDigits)},
                     {"appendix_final", round_to(d.appendix_final, kScoreDigits)},
                     {"reported_final", round_to(d.reported_final, kScoreDigits)}});
  }
  return {{"checks", checks}, {"chain_modes", modes}, {"pass", report.all_pass()}};
}

}  // namespace temai
