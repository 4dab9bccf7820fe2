#pragma once

#include <string>
#include <vector>

#include "temai/serialization.hpp"

namespace temai {

struct ReproductionCheck {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  std::string unit;  // "", "%", "pp" or "x"
  bool pass = false;
};

/// Both chain finals side by side for one case study.
struct ModeDiscrepancy {
  std::string case_id;
  double adoption_rate = 0.0;
  double appendix_final = 0.0;
  double reported_final = 0.0;
};

struct ReproductionReport {
  std::vector<ReproductionCheck> checks;
  std::vector<ModeDiscrepancy> discrepancies;

  bool all_pass() const;
};

/// Scores the shipped retail and photovoltaic fixtures and compares stage
/// values, appendix-chain finals and cross-case deltas against the published
/// figures.
ReproductionReport reproduce_case_studies();

std::string format_report(const ReproductionReport& report);
Json to_json(const ReproductionReport& report);

}  // namespace temai
