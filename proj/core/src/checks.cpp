#include "arealaw/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace arealaw {

double InequalityCheck::margin() const {
  return relation == Relation::less_equal ? bound - measured : measured - bound;
}

InequalityCheck make_check(std::string name, double measured, Relation relation, double bound,
                           double slack, bool vacuous, std::string note) {
  InequalityCheck c;
  c.check = std::move(name);
  c.measured = measured;
  c.bound = bound;
  c.relation = relation;
  c.vacuous = vacuous;
  c.note = std::move(note);
  c.pass = std::isfinite(measured) && !std::isnan(bound) && c.margin() >= -slack;
  return c;
}

nlohmann::json to_json(const InequalityCheck& c) {
  nlohmann::json j;
  j["check"] = c.check;
  j["measured"] = c.measured;
  j["bound"] = c.bound;
  j["relation"] = c.relation == Relation::less_equal ? "<=" : ">=";
  j["pass"] = c.pass;
  j["vacuous"] = c.vacuous;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

InequalityCheck check_from_json(const nlohmann::json& j) {
  InequalityCheck c;
  c.check = j.at("check").get<std::string>();
  c.measured = j.at("measured").is_null() ? NAN : j.at("measured").get<double>();
  c.bound = j.at("bound").is_null() ? NAN : j.at("bound").get<double>();
  c.relation = j.value("relation", std::string("<=")) == ">=" ? Relation::greater_equal
                                                              : Relation::less_equal;
  c.pass = j.at("pass").get<bool>();
  c.vacuous = j.at("vacuous").get<bool>();
  c.note = j.value("note", std::string());
  return c;
}

bool all_pass(const std::vector<InequalityCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace arealaw
