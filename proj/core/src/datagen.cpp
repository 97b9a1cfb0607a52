#include "bagclean/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bagclean/rng.hpp"
#include "json.hpp"

namespace bagclean::datagen {

namespace {

void validate(const GenConfig& c) {
  if (c.n_relations < 2) throw ConfigError("n_relations must be >= 2");
  if (c.n_bags < 1) throw ConfigError("n_bags must be positive");
  if (c.bag_min < 1 || c.bag_max < c.bag_min) {
    throw ConfigError("invalid bag size range");
  }
  if (c.p_noise < 0.0 || c.p_noise >= 1.0) {
    throw ConfigError("p_noise must be in [0, 1)");
  }
  if (c.rule_coverage < 0.0 || c.rule_coverage >= 1.0) {
    throw ConfigError("rule_coverage must be in [0, 1)");
  }
  if (c.vocab_size < 10) throw ConfigError("vocab_size too small");
  if (c.d_s < 1 || c.d_e < 1) throw ConfigError("dimensions must be positive");
  if (c.feature_sigma < 0.0 || c.embedding_noise < 0.0) {
    throw ConfigError("noise scales must be non-negative");
  }
}

Vec gaussian_vec(Rng& rng, int dim, double scale) {
  Vec v(static_cast<std::size_t>(dim));
  for (double& x : v) x = scale * rng.gaussian();
  return v;
}

std::string filler_token(Rng& rng, int vocab_size) {
  return "w" + std::to_string(rng.below(static_cast<std::uint64_t>(vocab_size)));
}

nlohmann::json instance_to_json(const Instance& x) {
  nlohmann::json j;
  j["tokens"] = x.tokens;
  j["e1_pos"] = x.e1_pos;
  j["e2_pos"] = x.e2_pos;
  if (x.repr) j["repr"] = *x.repr;
  if (x.gold_select) j["gold_select"] = *x.gold_select;
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  Instance x;
  x.tokens = j.at("tokens").get<std::vector<std::string>>();
  x.e1_pos = j.at("e1_pos").get<int>();
  x.e2_pos = j.at("e2_pos").get<int>();
  if (j.contains("repr")) x.repr = j["repr"].get<Vec>();
  if (j.contains("gold_select")) x.gold_select = j["gold_select"].get<bool>();
  if (x.e1_pos == x.e2_pos || x.e1_pos < 0 || x.e2_pos < 0 ||
      x.e1_pos >= static_cast<int>(x.tokens.size()) ||
      x.e2_pos >= static_cast<int>(x.tokens.size())) {
    throw ParseError("invalid entity positions");
  }
  return x;
}

}  // namespace

GenConfig gen_config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open generator config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("generator config: ") + e.what());
  }
  GenConfig c;
  c.n_relations = j.value("n_relations", c.n_relations);
  c.n_bags = j.value("n_bags", c.n_bags);
  c.bag_min = j.value("bag_min", c.bag_min);
  c.bag_max = j.value("bag_max", c.bag_max);
  c.p_noise = j.value("p_noise", c.p_noise);
  c.rule_coverage = j.value("rule_coverage", c.rule_coverage);
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.d_s = j.value("d_s", c.d_s);
  c.d_e = j.value("d_e", c.d_e);
  c.feature_sigma = j.value("feature_sigma", c.feature_sigma);
  c.embedding_noise = j.value("embedding_noise", c.embedding_noise);
  c.seed = j.value("seed", c.seed);
  validate(c);
  return c;
}

GenResult generate(const GenConfig& config) {
  validate(config);

  GenResult out;
  auto& meta = out.dataset.meta;
  meta.d_s = config.d_s;
  meta.d_e = config.d_e;
  meta.relations.push_back("NA");
  for (int r = 1; r < config.n_relations; ++r) {
    meta.relations.push_back("r" + std::to_string(r));
  }

  // Plant probability for TRUE instances of non-NA bags such that the
  // expected overall matched fraction equals rule_coverage.
  const double frac_non_na =
      static_cast<double>(config.n_relations - 1) / config.n_relations;
  const double true_frac = 1.0 - config.p_noise;
  const double plant_prob =
      config.rule_coverage / (true_frac * frac_non_na);
  if (plant_prob > 1.0) {
    throw ConfigError(
        "rule_coverage exceeds the attainable matched fraction for the given "
        "p_noise and relation count");
  }

  // Prototypes per relation: feature-space mean and relation embedding.
  Rng proto_rng(derive_seed(config.seed, 0));
  std::vector<Vec> feat_proto, rel_proto;
  for (int r = 0; r < config.n_relations; ++r) {
    feat_proto.push_back(gaussian_vec(proto_rng, config.d_s, 1.0));
    rel_proto.push_back(gaussian_vec(proto_rng, config.d_e, 1.0));
  }

  // One rule per non-NA relation; pattern tokens are disjoint from the
  // filler vocabulary so accidental matches are impossible.
  out.rule_set.version = "1";
  for (int r = 1; r < config.n_relations; ++r) {
    rules::Rule rule;
    rule.relation = meta.relations[static_cast<std::size_t>(r)];
    rule.pattern = {"E1", "rp_" + rule.relation + "_a",
                    "rp_" + rule.relation + "_b", "E2"};
    out.rule_set.rules.push_back(std::move(rule));
  }

  for (int k = 0; k < config.n_bags; ++k) {
    Rng rng(derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(k)));
    Bag bag;
    bag.bag_id = "b" + std::to_string(k);
    bag.e1 = "ent" + std::to_string(2 * k);
    bag.e2 = "ent" + std::to_string(2 * k + 1);
    const int rel = static_cast<int>(rng.below(
        static_cast<std::uint64_t>(config.n_relations)));
    bag.relation = meta.relations[static_cast<std::size_t>(rel)];

    bag.e1_emb = gaussian_vec(rng, config.d_e, 1.0);
    bag.e2_emb = bag.e1_emb;
    for (int i = 0; i < config.d_e; ++i) {
      bag.e2_emb[static_cast<std::size_t>(i)] +=
          rel_proto[static_cast<std::size_t>(rel)][static_cast<std::size_t>(i)] +
          config.embedding_noise * rng.gaussian();
    }

    const int size = config.bag_min +
                     static_cast<int>(rng.below(static_cast<std::uint64_t>(
                         config.bag_max - config.bag_min + 1)));
    // Wrong-label noise is coherent within a bag: all noise instances
    // express the same (wrong) relation, as when an entity pair genuinely
    // co-occurs under a second relation.
    int noise_rel = static_cast<int>(
        rng.below(static_cast<std::uint64_t>(config.n_relations - 1)));
    if (noise_rel >= rel) ++noise_rel;
    for (int i = 0; i < size; ++i) {
      Instance x;
      const bool is_noise = rng.uniform() < config.p_noise;
      const int feat_rel = is_noise ? noise_rel : rel;
      Vec repr = feat_proto[static_cast<std::size_t>(feat_rel)];
      for (double& v : repr) v += config.feature_sigma * rng.gaussian();
      x.repr = std::move(repr);
      x.gold_select = !is_noise;

      const bool plant =
          !is_noise && rel != 0 && rng.uniform() < plant_prob;
      if (plant) {
        const auto& pat =
            out.rule_set.rules[static_cast<std::size_t>(rel - 1)].pattern;
        const int prefix = static_cast<int>(rng.below(3));
        const int suffix = static_cast<int>(rng.below(3));
        for (int t = 0; t < prefix; ++t) {
          x.tokens.push_back(filler_token(rng, config.vocab_size));
        }
        x.e1_pos = prefix;
        x.tokens.push_back(bag.e1);
        x.tokens.push_back(pat[1]);
        x.tokens.push_back(pat[2]);
        x.e2_pos = prefix + 3;
        x.tokens.push_back(bag.e2);
        for (int t = 0; t < suffix; ++t) {
          x.tokens.push_back(filler_token(rng, config.vocab_size));
        }
      } else {
        const int len = 5 + static_cast<int>(rng.below(6));
        for (int t = 0; t < len; ++t) {
          x.tokens.push_back(filler_token(rng, config.vocab_size));
        }
        x.e1_pos = static_cast<int>(rng.below(static_cast<std::uint64_t>(len)));
        int p2 = static_cast<int>(
            rng.below(static_cast<std::uint64_t>(len - 1)));
        if (p2 >= x.e1_pos) ++p2;
        x.e2_pos = p2;
        x.tokens[static_cast<std::size_t>(x.e1_pos)] = bag.e1;
        x.tokens[static_cast<std::size_t>(x.e2_pos)] = bag.e2;
      }
      bag.instances.push_back(std::move(x));
    }

    // Keep at least one true instance per bag.
    bool any_true = false;
    for (const auto& x : bag.instances) any_true |= *x.gold_select;
    if (!any_true) {
      const std::size_t idx =
          rng.below(static_cast<std::uint64_t>(bag.instances.size()));
      Instance& x = bag.instances[idx];
      Vec repr = feat_proto[static_cast<std::size_t>(rel)];
      for (double& v : repr) v += config.feature_sigma * rng.gaussian();
      x.repr = std::move(repr);
      x.gold_select = true;
    }

    out.dataset.bags.push_back(std::move(bag));
  }
  return out;
}

void write_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset: " + path);
  nlohmann::json meta;
  meta["d_s"] = dataset.meta.d_s;
  meta["d_e"] = dataset.meta.d_e;
  meta["n_r"] = dataset.meta.n_r();
  meta["relations"] = dataset.meta.relations;
  out << "# " << meta.dump() << "\n";
  for (const auto& bag : dataset.bags) {
    nlohmann::json j;
    j["bag_id"] = bag.bag_id;
    j["e1"] = bag.e1;
    j["e2"] = bag.e2;
    j["relation"] = bag.relation;
    j["e1_emb"] = bag.e1_emb;
    j["e2_emb"] = bag.e2_emb;
    j["instances"] = nlohmann::json::array();
    for (const auto& x : bag.instances) {
      j["instances"].push_back(instance_to_json(x));
    }
    out << j.dump() << "\n";
  }
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset: " + path);
  Dataset ds;
  std::string line;
  int lineno = 0;
  bool have_meta = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      if (line[0] == '#') {
        const auto j = nlohmann::json::parse(line.substr(1));
        ds.meta.d_s = j.at("d_s").get<int>();
        ds.meta.d_e = j.at("d_e").get<int>();
        ds.meta.relations = j.at("relations").get<std::vector<std::string>>();
        if (ds.meta.n_r() != j.at("n_r").get<int>()) {
          throw ParseError("meta n_r disagrees with relation vocabulary");
        }
        have_meta = true;
        continue;
      }
      if (!have_meta) {
        throw ParseError("missing leading metadata comment line");
      }
      const auto j = nlohmann::json::parse(line);
      Bag bag;
      bag.bag_id = j.at("bag_id").get<std::string>();
      bag.e1 = j.at("e1").get<std::string>();
      bag.e2 = j.at("e2").get<std::string>();
      bag.relation = j.at("relation").get<std::string>();
      bag.e1_emb = j.at("e1_emb").get<Vec>();
      bag.e2_emb = j.at("e2_emb").get<Vec>();
      if (static_cast<int>(bag.e1_emb.size()) != ds.meta.d_e ||
          static_cast<int>(bag.e2_emb.size()) != ds.meta.d_e) {
        throw ParseError("entity embedding dimension != d_e");
      }
      relation_index(ds.meta, bag.relation);
      for (const auto& ij : j.at("instances")) {
        Instance x = instance_from_json(ij);
        if (x.repr && static_cast<int>(x.repr->size()) != ds.meta.d_s) {
          throw ParseError("instance repr dimension != d_s");
        }
        bag.instances.push_back(std::move(x));
      }
      if (bag.instances.empty()) throw ParseError("bag has no instances");
      ds.bags.push_back(std::move(bag));
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const LookupError& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_meta) throw ParseError(path + ": empty file without metadata line");
  return ds;
}

std::pair<std::vector<Bag>, std::vector<Bag>> split(
    const std::vector<Bag>& bags, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ArgumentError("split: train_fraction must be in (0, 1)");
  }
  const std::size_t n = bags.size();
  const std::size_t n_train =
      static_cast<std::size_t>(std::llround(train_fraction * n));
  if (n_train == 0 || n_train == n) {
    throw ArgumentError("split: fraction yields an empty side");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  // Fisher-Yates with the fixed uniform stream.
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = rng.below(i + 1);
    std::swap(order[i], order[j]);
  }
  std::pair<std::vector<Bag>, std::vector<Bag>> out;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? out.first : out.second).push_back(bags[order[i]]);
  }
  return out;
}

}  // namespace bagclean::datagen
