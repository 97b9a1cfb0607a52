#include "bagclean/policy.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace bagclean::policy {

ActionDistribution action_distribution(const encoder::StateVector& state,
                                       const PolicyParams& params) {
  const Vec s = state.flatten();
  if (static_cast<int>(s.size()) != params.d_state()) {
    throw DimensionError("action_distribution: state dimension " +
                         std::to_string(s.size()) + " != d_state " +
                         std::to_string(params.d_state()));
  }
  const double logit0 = dot(params.weight[0], s) + params.bias[0];
  const double logit1 = dot(params.weight[1], s) + params.bias[1];
  // Stable two-way softmax.
  const double m = std::max(logit0, logit1);
  const double e0 = std::exp(logit0 - m);
  const double e1 = std::exp(logit1 - m);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

ActionDistribution pr_transform(const ActionDistribution& dist) {
  static const double kExpNeg1 = std::exp(-1.0);
  const double z = dist.p_select + dist.p_discard * kExpNeg1;
  if (z == 0.0) return dist;  // degenerate all-mass-on-discard with p=0
  return {dist.p_discard * kExpNeg1 / z, dist.p_select / z};
}

int sample_action(const ActionDistribution& dist, Rng& rng) {
  return rng.uniform() < dist.p_select ? 1 : 0;
}

PolicyGrad grad_log_policy(const encoder::StateVector& state, int action,
                           const PolicyParams& params) {
  const Vec s = state.flatten();
  if (static_cast<int>(s.size()) != params.d_state()) {
    throw DimensionError("grad_log_policy: state dimension mismatch");
  }
  const ActionDistribution dist = action_distribution(state, params);
  const double probs[2] = {dist.p_discard, dist.p_select};
  PolicyGrad g;
  g.weight = zeros(2, s.size());
  g.bias = zeros(2);
  for (int a = 0; a < 2; ++a) {
    const double coef = (a == action ? 1.0 : 0.0) - probs[a];
    g.bias[static_cast<std::size_t>(a)] = coef;
    for (std::size_t i = 0; i < s.size(); ++i) {
      g.weight[static_cast<std::size_t>(a)][i] = coef * s[i];
    }
  }
  return g;
}

PolicyParams reinforce_update(const PolicyParams& params,
                              const std::vector<TrajectoryStep>& steps,
                              const std::vector<double>& rewards, double lr) {
  if (steps.size() != rewards.size()) {
    throw ArgumentError("reinforce_update: steps/rewards length mismatch");
  }
  PolicyParams out = params;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double c = lr * rewards[i];
    const PolicyGrad& g = steps[i].log_prob_grad;
    for (int a = 0; a < 2; ++a) {
      out.bias[static_cast<std::size_t>(a)] +=
          c * g.bias[static_cast<std::size_t>(a)];
      axpy(c, g.weight[static_cast<std::size_t>(a)],
           out.weight[static_cast<std::size_t>(a)]);
    }
  }
  return out;
}

PolicyParams soft_update(const PolicyParams& live, const PolicyParams& delayed,
                         double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw ArgumentError("soft_update: tau must be in (0, 1]");
  }
  if (live.d_state() != delayed.d_state()) {
    throw DimensionError("soft_update: parameter dimension mismatch");
  }
  PolicyParams out = delayed;
  for (int a = 0; a < 2; ++a) {
    const auto ai = static_cast<std::size_t>(a);
    out.bias[ai] = tau * live.bias[ai] + (1.0 - tau) * delayed.bias[ai];
    for (std::size_t i = 0; i < out.weight[ai].size(); ++i) {
      out.weight[ai][i] =
          tau * live.weight[ai][i] + (1.0 - tau) * delayed.weight[ai][i];
    }
  }
  return out;
}

void save_checkpoint(const PolicyParams& params, const std::string& path) {
  nlohmann::json doc;
  doc["format_version"] = "1";
  doc["d_state"] = params.d_state();
  doc["weight"] = params.weight;
  doc["bias"] = params.bias;
  std::ofstream out(path);
  if (!out) throw Error("cannot write policy checkpoint: " + path);
  out << doc.dump(2) << "\n";
}

PolicyParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open policy checkpoint: " + path);
  try {
    nlohmann::json doc;
    in >> doc;
    PolicyParams p;
    p.weight = doc.at("weight").get<Mat>();
    p.bias = doc.at("bias").get<Vec>();
    if (p.weight.size() != 2 || p.bias.size() != 2 ||
        static_cast<int>(p.weight[0].size()) != doc.at("d_state").get<int>()) {
      throw ParseError("policy checkpoint: inconsistent dimensions");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("policy checkpoint: ") + e.what());
  }
}

}  // namespace bagclean::policy
