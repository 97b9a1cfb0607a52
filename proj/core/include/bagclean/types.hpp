#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bagclean/common.hpp"

namespace bagclean {

// One sentence mention of an entity pair. `repr` is a precomputed feature
// vector (the generator emits one); `gold_select` is the ground-truth
// keep/drop flag, present only on synthetic data and used only by evaluation.
struct Instance {
  std::vector<std::string> tokens;
  int e1_pos = 0;
  int e2_pos = 0;
  std::optional<Vec> repr;
  std::optional<bool> gold_select;
};

// All instances sharing one entity pair, with the distant-supervision label.
struct Bag {
  std::string bag_id;
  std::string e1;
  std::string e2;
  std::string relation;
  std::vector<Instance> instances;
  Vec e1_emb;
  Vec e2_emb;
};

struct DatasetMeta {
  int d_s = 0;
  int d_e = 0;
  std::vector<std::string> relations;  // includes the NA relation at index 0

  int n_r() const { return static_cast<int>(relations.size()); }
};

struct Dataset {
  DatasetMeta meta;
  std::vector<Bag> bags;
};

int relation_index(const DatasetMeta& meta, const std::string& relation);

// Per-episode training log row.
struct EpisodeStats {
  int episode = 0;
  double mean_reward = 0.0;
  double selection_rate = 0.0;
  double matched_selection_rate = 0.0;
  double selection_f1 = 0.0;
  bool has_selection_f1 = false;  // gold flags present in the dataset
};

}  // namespace bagclean
