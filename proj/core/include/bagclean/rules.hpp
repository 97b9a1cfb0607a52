#pragma once

#include <string>
#include <vector>

#include "bagclean/types.hpp"

namespace bagclean::rules {

// A pattern rule: ordered token list where the reserved tokens "E1" and "E2"
// mark the entity slots and every other token is a literal vocabulary item.
struct Rule {
  std::string relation;
  std::vector<std::string> pattern;
};

struct RuleSet {
  std::string version;
  std::vector<Rule> rules;

  std::size_t size() const { return rules.size(); }
  bool empty() const { return rules.empty(); }
};

// Parses and validates a rules document (JSON text). Throws ParseError on a
// malformed document (naming the offending rule index) and on any rule whose
// pattern lacks exactly one E1 and one E2 or has fewer than two tokens.
RuleSet compile_rules(const std::string& document);

RuleSet load_rules(const std::string& path);
void save_rules(const RuleSet& rule_set, const std::string& path);

// True iff the rule's relation equals bag_relation and the pattern occurs as
// a contiguous token subsequence with E1 aligned exactly to instance.e1_pos
// and E2 to instance.e2_pos.
bool rule_matches(const Rule& rule, const Instance& instance,
                  const std::string& bag_relation);

// Membership in the matched-instance set: any rule matches.
bool in_matched_set(const RuleSet& rule_set, const Instance& instance,
                    const std::string& bag_relation);

}  // namespace bagclean::rules
