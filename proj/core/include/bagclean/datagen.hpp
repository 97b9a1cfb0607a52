#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bagclean/rules.hpp"
#include "bagclean/types.hpp"

namespace bagclean::datagen {

struct GenConfig {
  int n_relations = 5;  // including the NA relation
  int n_bags = 500;
  int bag_min = 4;
  int bag_max = 8;
  double p_noise = 0.4;
  double rule_coverage = 0.04;
  int vocab_size = 200;
  int d_s = 64;
  int d_e = 50;
  double feature_sigma = 0.3;
  double embedding_noise = 0.1;
  std::uint64_t seed = 0;
};

GenConfig gen_config_from_json_file(const std::string& path);

struct GenResult {
  Dataset dataset;
  rules::RuleSet rule_set;
};

// Synthetic distant-supervision corpus: every instance is TRUE (feature near
// the bag relation's prototype, gold_select=true) or NOISE (feature from a
// different relation's prototype, gold_select=false); entity embeddings obey
// e2 = e1 + relation prototype + noise; rule patterns are planted only in
// TRUE instances of non-NA bags at a rate calibrated to rule_coverage.
GenResult generate(const GenConfig& config);

void write_dataset(const Dataset& dataset, const std::string& path);
Dataset read_dataset(const std::string& path);

// Seeded shuffle then split by bag. Throws if either side would be empty.
std::pair<std::vector<Bag>, std::vector<Bag>> split(
    const std::vector<Bag>& bags, double train_fraction, std::uint64_t seed);

}  // namespace bagclean::datagen
