#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bagclean/classifier.hpp"
#include "bagclean/encoder.hpp"
#include "bagclean/eval.hpp"
#include "bagclean/policy.hpp"
#include "bagclean/rng.hpp"
#include "bagclean/rules.hpp"
#include "bagclean/types.hpp"

namespace bagclean::trainer {

enum class Mode { Pr, Vanilla, NoSelect };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode mode);

struct TrainConfig {
  int episodes = 100;
  double lr_policy = 0.01;
  double lr_classifier = 0.01;
  double tau = 0.005;
  int d_s = 64;
  int d_e = 50;
  Mode mode = Mode::Pr;
  std::uint64_t seed = 0;
  int pretrain_steps = 50;
  std::optional<double> reward_threshold;
  int window = 10;
  std::uint64_t hash_seed = 0;

  void validate() const;
};

// Loads a config file; fields not present keep the passed-in defaults.
TrainConfig train_config_from_json_file(const std::string& path,
                                        TrainConfig base = {});

// The view of a bag the selection loop consumes: representations, relation
// embedding, and rule-match flags. Gold selection flags are deliberately not
// part of this type.
struct EncodedBag {
  std::string bag_id;
  int relation = 0;
  Vec rel_emb;
  std::vector<Vec> reprs;
  std::vector<bool> matched;
};

struct EncodedDataset {
  DatasetMeta meta;
  std::vector<EncodedBag> bags;
  // Parallel to `bags`; used only for selection-quality statistics.
  std::vector<std::vector<bool>> gold;
  bool has_gold = false;
};

EncodedDataset encode_dataset(const Dataset& dataset,
                              const rules::RuleSet& rule_set,
                              const encoder::EncoderConfig& enc);

struct SelectResult {
  std::vector<int> selected;
  std::vector<policy::TrajectoryStep> trajectory;
};

// One trajectory over the bag's instances in stored order. The candidate is
// sampled from the PR-transformed distribution iff mode is Pr and the
// candidate is rule-matched; gradients are always of the plain log-policy.
// Mode NoSelect keeps everything and records no trajectory.
SelectResult select_bag(const EncodedBag& bag,
                        const policy::PolicyParams& params, Mode mode,
                        Rng& rng);

// R = log P(bag.relation | mean of selected reprs) under the classifier.
double terminal_reward(const std::vector<int>& selected, const EncodedBag& bag,
                       const classifier::ClassifierParams& params);

struct TrainerState {
  policy::PolicyParams policy_live;
  policy::PolicyParams policy_delayed;
  classifier::ClassifierParams classifier_live;
  classifier::ClassifierParams classifier_delayed;
  int episode = 0;
  Rng rng;
  std::vector<EpisodeStats> metrics;

  TrainerState(int d_state, int n_r, int d_s, std::uint64_t seed)
      : policy_live(policy::PolicyParams::zero(d_state)),
        policy_delayed(policy::PolicyParams::zero(d_state)),
        classifier_live(classifier::ClassifierParams::zero(n_r, d_s)),
        classifier_delayed(classifier::ClassifierParams::zero(n_r, d_s)),
        rng(seed) {}
};

using BagObserver = std::function<void(
    int episode, const EncodedBag& bag, const SelectResult& result,
    double reward)>;

EpisodeStats run_episode(const EncodedDataset& dataset, TrainerState& state,
                         const TrainConfig& config,
                         const BagObserver& observer = {});

struct TrainResult {
  TrainerState state;
  eval::RunMetrics metrics;
};

TrainResult train(const Dataset& dataset, const rules::RuleSet& rule_set,
                  const TrainConfig& config, const BagObserver& observer = {});

struct EvalOutput {
  std::vector<eval::PRPoint> curve;
  double pr_auc = 0.0;
  bool has_curve = false;  // false when the dataset has no non-NA bag
  eval::SelectionMetrics selection;
  bool has_selection = false;  // gold flags present
};

// Runs the trained selector (deterministic greedy: keep iff p_select >= 0.5)
// over a dataset and scores the classifier's non-NA predictions against the
// bag labels, plus selection quality when gold flags are present.
EvalOutput evaluate_policy(const Dataset& dataset,
                           const policy::PolicyParams& pol,
                           const classifier::ClassifierParams& cls,
                           const std::vector<std::string>& relations);

}  // namespace bagclean::trainer
