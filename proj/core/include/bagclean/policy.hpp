#pragma once

#include <string>
#include <vector>

#include "bagclean/encoder.hpp"
#include "bagclean/rng.hpp"
#include "bagclean/types.hpp"

namespace bagclean::policy {

// Linear softmax policy over {discard=0, select=1}.
struct PolicyParams {
  Mat weight;  // 2 x d_state
  Vec bias;    // 2

  static PolicyParams zero(int d_state) {
    return {zeros(2, static_cast<std::size_t>(d_state)), zeros(2)};
  }
  int d_state() const {
    return weight.empty() ? 0 : static_cast<int>(weight[0].size());
  }
};

struct ActionDistribution {
  double p_discard = 0.5;
  double p_select = 0.5;
};

struct PolicyGrad {
  Mat weight;  // 2 x d_state
  Vec bias;    // 2
};

struct TrajectoryStep {
  encoder::StateVector state;
  int action = 0;  // 0 discard, 1 select
  bool used_pr = false;
  PolicyGrad log_prob_grad;
};

ActionDistribution action_distribution(const encoder::StateVector& state,
                                       const PolicyParams& params);

// Posterior-regularized transform applied to rule-matched candidates:
// p_select' = p_select / Z, p_discard' = p_discard * e^-1 / Z,
// Z = p_select + p_discard * e^-1.
ActionDistribution pr_transform(const ActionDistribution& dist);

// Returns 1 iff the single uniform draw u satisfies u < p_select.
int sample_action(const ActionDistribution& dist, Rng& rng);

// Gradient of log P(action|state) under the plain policy (never the
// transformed one), i.e. (one_hot(action) - probs) outer state / bias.
PolicyGrad grad_log_policy(const encoder::StateVector& state, int action,
                           const PolicyParams& params);

// theta <- theta + lr * sum_i rewards[i] * steps[i].log_prob_grad
PolicyParams reinforce_update(const PolicyParams& params,
                              const std::vector<TrajectoryStep>& steps,
                              const std::vector<double>& rewards, double lr);

// Elementwise tau*live + (1-tau)*delayed; tau must be in (0, 1].
PolicyParams soft_update(const PolicyParams& live, const PolicyParams& delayed,
                         double tau);

void save_checkpoint(const PolicyParams& params, const std::string& path);
PolicyParams load_checkpoint(const std::string& path);

}  // namespace bagclean::policy
