#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace arealaw {

enum class Relation { less_equal, greater_equal };

/// One verified inequality: measured (relation) bound.
struct InequalityCheck {
  std::string check;
  double measured = 0.0;
  double bound = 0.0;
  Relation relation = Relation::less_equal;
  bool pass = false;
  bool vacuous = false;
  std::string note;

  /// Signed distance to failure: bound - measured for <=, measured - bound for >=.
  double margin() const;
};

/// Builds a check; pass allows `slack` on the failing side.
InequalityCheck make_check(std::string name, double measured, Relation relation, double bound,
                           double slack = 0.0, bool vacuous = false, std::string note = {});

nlohmann::json to_json(const InequalityCheck& c);
InequalityCheck check_from_json(const nlohmann::json& j);

bool all_pass(const std::vector<InequalityCheck>& checks);

/// Decimal with 12 significant digits.
std::string format_number(double x);

}  // namespace arealaw
