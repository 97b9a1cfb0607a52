#pragma once

#include <string>
#include <vector>

#include "bagclean/types.hpp"

namespace bagclean::classifier {

// Softmax relation classifier over a pooled bag representation.
struct ClassifierParams {
  Mat weight;  // n_r x d_s
  Vec bias;    // n_r

  static ClassifierParams zero(int n_r, int d_s) {
    return {zeros(static_cast<std::size_t>(n_r),
                  static_cast<std::size_t>(d_s)),
            zeros(static_cast<std::size_t>(n_r))};
  }
  int n_r() const { return static_cast<int>(bias.size()); }
  int d_s() const {
    return weight.empty() ? 0 : static_cast<int>(weight[0].size());
  }
};

struct TrainExample {
  std::vector<Vec> selected;  // representations of the kept instances
  int relation = 0;           // gold relation index
};

// Elementwise mean of the selected representations; zero vector for the
// empty list (dimension `d_s`).
Vec bag_representation(const std::vector<Vec>& selected, std::size_t d_s);

// weight . bag_repr + bias
Vec scores(const Vec& bag_repr, const ClassifierParams& params);

// Numerically stable softmax (max subtraction).
Vec predict_proba(const Vec& score_values);

// Stable log-softmax entry for `relation`; always <= 0 and finite.
double log_likelihood(const std::vector<Vec>& selected, int relation,
                      const ClassifierParams& params);

// One full-batch gradient-ascent step on the mean log-likelihood. The batch
// is canonically ordered internally so the result is independent of the
// input permutation.
ClassifierParams classifier_train_step(const std::vector<TrainExample>& batch,
                                       const ClassifierParams& params,
                                       double lr);

void save_checkpoint(const ClassifierParams& params,
                     const std::vector<std::string>& relations,
                     const std::string& path);
ClassifierParams load_checkpoint(const std::string& path,
                                 std::vector<std::string>* relations = nullptr);

}  // namespace bagclean::classifier
