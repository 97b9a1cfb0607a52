#include "bagclean/trainer.hpp"

#include <fstream>

#include "bagclean/log.hpp"
#include "json.hpp"

namespace bagclean::trainer {

Mode mode_from_string(const std::string& s) {
  if (s == "pr") return Mode::Pr;
  if (s == "vanilla") return Mode::Vanilla;
  if (s == "noselect") return Mode::NoSelect;
  throw ConfigError("unknown mode: " + s);
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Pr:
      return "pr";
    case Mode::Vanilla:
      return "vanilla";
    case Mode::NoSelect:
      return "noselect";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (episodes < 0) throw ConfigError("episodes must be >= 0");
  if (lr_policy < 0.0 || lr_classifier < 0.0) {
    throw ConfigError("learning rates must be >= 0");
  }
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must be in (0, 1]");
  if (d_s < 1 || d_e < 1) throw ConfigError("dimensions must be positive");
  if (pretrain_steps < 0) throw ConfigError("pretrain_steps must be >= 0");
  if (window < 1) throw ConfigError("window must be >= 1");
}

TrainConfig train_config_from_json_file(const std::string& path,
                                        TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open training config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("training config: ") + e.what());
  }
  base.episodes = j.value("episodes", base.episodes);
  base.lr_policy = j.value("lr_policy", base.lr_policy);
  base.lr_classifier = j.value("lr_classifier", base.lr_classifier);
  base.tau = j.value("tau", base.tau);
  base.d_s = j.value("d_s", base.d_s);
  base.d_e = j.value("d_e", base.d_e);
  if (j.contains("mode")) {
    base.mode = mode_from_string(j["mode"].get<std::string>());
  }
  base.seed = j.value("seed", base.seed);
  base.pretrain_steps = j.value("pretrain_steps", base.pretrain_steps);
  if (j.contains("reward_threshold") && !j["reward_threshold"].is_null()) {
    base.reward_threshold = j["reward_threshold"].get<double>();
  }
  base.window = j.value("window", base.window);
  base.hash_seed = j.value("hash_seed", base.hash_seed);
  base.validate();
  return base;
}

EncodedDataset encode_dataset(const Dataset& dataset,
                              const rules::RuleSet& rule_set,
                              const encoder::EncoderConfig& enc) {
  EncodedDataset out;
  out.meta = dataset.meta;
  out.has_gold = true;
  for (const auto& bag : dataset.bags) {
    EncodedBag eb;
    eb.bag_id = bag.bag_id;
    eb.relation = relation_index(dataset.meta, bag.relation);
    eb.rel_emb = encoder::relation_embedding(bag.e1_emb, bag.e2_emb);
    std::vector<bool> gold_flags;
    for (const auto& x : bag.instances) {
      eb.reprs.push_back(encoder::encode_instance(x, enc));
      eb.matched.push_back(rules::in_matched_set(rule_set, x, bag.relation));
      if (x.gold_select) {
        gold_flags.push_back(*x.gold_select);
      } else {
        out.has_gold = false;
      }
    }
    out.bags.push_back(std::move(eb));
    out.gold.push_back(std::move(gold_flags));
  }
  if (!out.has_gold) out.gold.clear();
  return out;
}

SelectResult select_bag(const EncodedBag& bag,
                        const policy::PolicyParams& params, Mode mode,
                        Rng& rng) {
  SelectResult result;
  if (bag.reprs.empty()) {
    log_info("skipping empty bag " + bag.bag_id);
    return result;
  }
  if (mode == Mode::NoSelect) {
    for (std::size_t i = 0; i < bag.reprs.size(); ++i) {
      result.selected.push_back(static_cast<int>(i));
    }
    return result;
  }
  std::vector<Vec> selected_reprs;
  for (std::size_t i = 0; i < bag.reprs.size(); ++i) {
    policy::TrajectoryStep step;
    step.state = encoder::build_state(selected_reprs, bag.reprs[i], bag.rel_emb);
    policy::ActionDistribution dist =
        policy::action_distribution(step.state, params);
    step.used_pr = (mode == Mode::Pr && bag.matched[i]);
    if (step.used_pr) dist = policy::pr_transform(dist);
    step.action = policy::sample_action(dist, rng);
    step.log_prob_grad = policy::grad_log_policy(step.state, step.action, params);
    if (step.action == 1) {
      result.selected.push_back(static_cast<int>(i));
      selected_reprs.push_back(bag.reprs[i]);
    }
    result.trajectory.push_back(std::move(step));
  }
  return result;
}

double terminal_reward(const std::vector<int>& selected, const EncodedBag& bag,
                       const classifier::ClassifierParams& params) {
  std::vector<Vec> reprs;
  reprs.reserve(selected.size());
  for (int i : selected) reprs.push_back(bag.reprs[static_cast<std::size_t>(i)]);
  return classifier::log_likelihood(reprs, bag.relation, params);
}

EpisodeStats run_episode(const EncodedDataset& dataset, TrainerState& state,
                         const TrainConfig& config,
                         const BagObserver& observer) {
  double reward_sum = 0.0;
  long n_bags = 0;
  long n_instances = 0, n_selected = 0;
  long n_matched = 0, n_matched_selected = 0;
  long tp = 0, fp = 0, fn = 0;

  std::vector<classifier::TrainExample> new_bags;
  new_bags.reserve(dataset.bags.size());

  for (std::size_t b = 0; b < dataset.bags.size(); ++b) {
    const EncodedBag& bag = dataset.bags[b];
    if (bag.reprs.empty()) {
      log_info("episode " + std::to_string(state.episode) +
               ": skipping empty bag " + bag.bag_id);
      continue;
    }
    // Actions are sampled under the delayed policy, the reward comes from
    // the delayed classifier, the update lands on the live policy.
    SelectResult sel =
        select_bag(bag, state.policy_delayed, config.mode, state.rng);
    const double reward =
        terminal_reward(sel.selected, bag, state.classifier_delayed);
    if (!sel.trajectory.empty()) {
      const std::vector<double> rewards(sel.trajectory.size(), reward);
      state.policy_live = policy::reinforce_update(
          state.policy_live, sel.trajectory, rewards, config.lr_policy);
    }

    classifier::TrainExample ex;
    ex.relation = bag.relation;
    for (int i : sel.selected) {
      ex.selected.push_back(bag.reprs[static_cast<std::size_t>(i)]);
    }
    new_bags.push_back(std::move(ex));

    reward_sum += reward;
    ++n_bags;
    n_instances += static_cast<long>(bag.reprs.size());
    n_selected += static_cast<long>(sel.selected.size());
    std::vector<bool> picked(bag.reprs.size(), false);
    for (int i : sel.selected) picked[static_cast<std::size_t>(i)] = true;
    for (std::size_t i = 0; i < bag.reprs.size(); ++i) {
      if (bag.matched[i]) {
        ++n_matched;
        if (picked[i]) ++n_matched_selected;
      }
      if (dataset.has_gold) {
        const bool g = dataset.gold[b][i];
        if (picked[i] && g) ++tp;
        if (picked[i] && !g) ++fp;
        if (!picked[i] && g) ++fn;
      }
    }
    if (observer) observer(state.episode, bag, sel, reward);
  }

  state.policy_delayed =
      policy::soft_update(state.policy_live, state.policy_delayed, config.tau);
  if (!new_bags.empty()) {
    state.classifier_live = classifier::classifier_train_step(
        new_bags, state.classifier_live, config.lr_classifier);
  }
  state.classifier_delayed = state.classifier_live;

  EpisodeStats stats;
  stats.episode = state.episode;
  stats.mean_reward = n_bags ? reward_sum / static_cast<double>(n_bags) : 0.0;
  stats.selection_rate =
      n_instances ? static_cast<double>(n_selected) / n_instances : 0.0;
  stats.matched_selection_rate =
      n_matched ? static_cast<double>(n_matched_selected) / n_matched : 0.0;
  if (dataset.has_gold) {
    const double prec = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double rec = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
    stats.selection_f1 =
        (prec + rec > 0.0) ? 2.0 * prec * rec / (prec + rec) : 0.0;
    stats.has_selection_f1 = true;
  }
  ++state.episode;
  return stats;
}

TrainResult train(const Dataset& dataset, const rules::RuleSet& rule_set,
                  const TrainConfig& config, const BagObserver& observer) {
  config.validate();
  if (config.mode == Mode::Pr && rule_set.empty()) {
    throw ConfigError("mode=pr requires a non-empty rule set");
  }
  if (dataset.bags.empty()) throw ConfigError("dataset has no bags");

  encoder::EncoderConfig enc;
  enc.d_s = dataset.meta.d_s > 0 ? dataset.meta.d_s : config.d_s;
  enc.d_e = dataset.meta.d_e > 0 ? dataset.meta.d_e : config.d_e;
  enc.hash_seed = config.hash_seed;

  const EncodedDataset encoded = encode_dataset(dataset, rule_set, enc);
  const int d_state = 2 * enc.d_s + enc.d_e;
  const int n_r = encoded.meta.n_r();

  TrainResult result{TrainerState(d_state, n_r, enc.d_s, config.seed), {}};
  TrainerState& state = result.state;

  // Pretrain the classifier on the original noisy bags (all instances kept),
  // then initialize the delayed copies from the live ones.
  if (config.pretrain_steps > 0) {
    std::vector<classifier::TrainExample> batch;
    for (const auto& bag : encoded.bags) {
      classifier::TrainExample ex;
      ex.relation = bag.relation;
      ex.selected = bag.reprs;
      batch.push_back(std::move(ex));
    }
    for (int s = 0; s < config.pretrain_steps; ++s) {
      state.classifier_live = classifier::classifier_train_step(
          batch, state.classifier_live, config.lr_classifier);
    }
  }
  state.classifier_delayed = state.classifier_live;
  state.policy_delayed = state.policy_live;

  for (int m = 0; m < config.episodes; ++m) {
    EpisodeStats stats = run_episode(encoded, state, config, observer);
    state.metrics.push_back(stats);
    log_debug("episode " + std::to_string(stats.episode) + " mean_reward=" +
              std::to_string(stats.mean_reward));
  }

  result.metrics.episodes = state.metrics;
  if (config.reward_threshold) {
    std::vector<double> trace;
    for (const auto& e : state.metrics) trace.push_back(e.mean_reward);
    result.metrics.episodes_to_threshold = eval::episodes_to_threshold(
        trace, *config.reward_threshold, config.window);
  }
  if (!state.metrics.empty() && state.metrics.back().has_selection_f1) {
    result.metrics.selection_f1_final = state.metrics.back().selection_f1;
  }
  return result;
}

EvalOutput evaluate_policy(const Dataset& dataset,
                           const policy::PolicyParams& pol,
                           const classifier::ClassifierParams& cls,
                           const std::vector<std::string>& relations) {
  if (relations.empty()) throw ArgumentError("evaluate_policy: no relations");
  encoder::EncoderConfig enc;
  enc.d_s = dataset.meta.d_s;
  enc.d_e = dataset.meta.d_e;
  const EncodedDataset encoded =
      encode_dataset(dataset, rules::RuleSet{}, enc);

  std::vector<eval::Prediction> predictions;
  std::vector<eval::GoldFact> gold;
  std::vector<std::vector<int>> chosen;
  std::vector<std::vector<bool>> gold_flags;
  for (std::size_t b = 0; b < encoded.bags.size(); ++b) {
    const auto& bag = encoded.bags[b];
    std::vector<Vec> selected_reprs;
    std::vector<int> selected;
    for (std::size_t i = 0; i < bag.reprs.size(); ++i) {
      const auto state =
          encoder::build_state(selected_reprs, bag.reprs[i], bag.rel_emb);
      if (policy::action_distribution(state, pol).p_select >= 0.5) {
        selected.push_back(static_cast<int>(i));
        selected_reprs.push_back(bag.reprs[i]);
      }
    }
    const Vec repr = classifier::bag_representation(
        selected_reprs, static_cast<std::size_t>(cls.d_s()));
    const Vec probs = classifier::predict_proba(classifier::scores(repr, cls));
    for (std::size_t r = 1; r < relations.size(); ++r) {  // skip NA
      predictions.push_back({bag.bag_id, relations[r], probs[r]});
    }
    if (dataset.bags[b].relation != relations[0]) {
      gold.push_back({bag.bag_id, dataset.bags[b].relation});
    }
    chosen.push_back(std::move(selected));
    if (encoded.has_gold) gold_flags.push_back(encoded.gold[b]);
  }

  EvalOutput out;
  if (!gold.empty()) {
    out.curve = eval::pr_curve(std::move(predictions), gold);
    out.pr_auc = eval::pr_auc(out.curve);
    out.has_curve = true;
  }
  if (encoded.has_gold) {
    out.selection = eval::selection_metrics(chosen, gold_flags);
    out.has_selection = true;
  }
  return out;
}

}  // namespace bagclean::trainer
