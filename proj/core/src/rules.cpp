#include "bagclean/rules.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bagclean::rules {

namespace {

void validate_rule(const Rule& rule, std::size_t index) {
  if (rule.pattern.size() < 2) {
    throw ParseError("rule " + std::to_string(index) +
                     ": pattern must have at least 2 tokens");
  }
  int e1 = 0, e2 = 0;
  for (const auto& tok : rule.pattern) {
    if (tok == "E1") ++e1;
    if (tok == "E2") ++e2;
  }
  if (e1 != 1 || e2 != 1) {
    throw ParseError("rule " + std::to_string(index) +
                     ": pattern must contain exactly one E1 and one E2");
  }
  if (rule.relation.empty()) {
    throw ParseError("rule " + std::to_string(index) + ": empty relation");
  }
}

}  // namespace

RuleSet compile_rules(const std::string& document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rules document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array()) {
    throw ParseError("rules document: expected object with a \"rules\" array");
  }
  RuleSet out;
  out.version = doc.value("version", "1");
  const auto& arr = doc["rules"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Rule r;
    try {
      r.relation = arr[i].at("relation").get<std::string>();
      r.pattern = arr[i].at("pattern").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("rule " + std::to_string(i) + ": " + e.what());
    }
    validate_rule(r, i);
    out.rules.push_back(std::move(r));
  }
  return out;
}

RuleSet load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open rules file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return compile_rules(buf.str());
}

void save_rules(const RuleSet& rule_set, const std::string& path) {
  nlohmann::json doc;
  doc["version"] = rule_set.version;
  doc["rules"] = nlohmann::json::array();
  for (const auto& r : rule_set.rules) {
    doc["rules"].push_back({{"relation", r.relation}, {"pattern", r.pattern}});
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write rules file: " + path);
  out << doc.dump(2) << "\n";
}

bool rule_matches(const Rule& rule, const Instance& instance,
                  const std::string& bag_relation) {
  if (rule.relation != bag_relation) return false;
  const auto& toks = instance.tokens;
  const auto& pat = rule.pattern;
  // The E1 slot pins the only possible alignment.
  std::size_t i1 = 0, i2 = 0;
  for (std::size_t i = 0; i < pat.size(); ++i) {
    if (pat[i] == "E1") i1 = i;
    if (pat[i] == "E2") i2 = i;
  }
  const long start = static_cast<long>(instance.e1_pos) - static_cast<long>(i1);
  if (start < 0 ||
      start + static_cast<long>(pat.size()) > static_cast<long>(toks.size())) {
    return false;
  }
  if (start + static_cast<long>(i2) != static_cast<long>(instance.e2_pos)) {
    return false;
  }
  for (std::size_t i = 0; i < pat.size(); ++i) {
    if (i == i1 || i == i2) continue;
    if (toks[static_cast<std::size_t>(start) + i] != pat[i]) return false;
  }
  return true;
}

bool in_matched_set(const RuleSet& rule_set, const Instance& instance,
                    const std::string& bag_relation) {
  for (const auto& rule : rule_set.rules) {
    if (rule_matches(rule, instance, bag_relation)) return true;
  }
  return false;
}

}  // namespace bagclean::rules
