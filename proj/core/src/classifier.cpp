#include "bagclean/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"

namespace bagclean::classifier {

Vec bag_representation(const std::vector<Vec>& selected, std::size_t d_s) {
  return mean_of(selected, d_s);
}

Vec scores(const Vec& bag_repr, const ClassifierParams& params) {
  if (static_cast<int>(bag_repr.size()) != params.d_s()) {
    throw DimensionError("scores: bag repr dimension mismatch");
  }
  Vec out(params.bias.size());
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = dot(params.weight[r], bag_repr) + params.bias[r];
  }
  return out;
}

Vec predict_proba(const Vec& score_values) {
  const double m = *std::max_element(score_values.begin(), score_values.end());
  Vec out(score_values.size());
  double z = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(score_values[i] - m);
    z += out[i];
  }
  for (double& p : out) p /= z;
  return out;
}

namespace {

double log_softmax_at(const Vec& score_values, std::size_t idx) {
  const double m = *std::max_element(score_values.begin(), score_values.end());
  double z = 0.0;
  for (double s : score_values) z += std::exp(s - m);
  return score_values[idx] - m - std::log(z);
}

}  // namespace

double log_likelihood(const std::vector<Vec>& selected, int relation,
                      const ClassifierParams& params) {
  if (relation < 0 || relation >= params.n_r()) {
    throw LookupError("log_likelihood: relation index " +
                      std::to_string(relation) + " out of vocabulary");
  }
  const Vec repr =
      bag_representation(selected, static_cast<std::size_t>(params.d_s()));
  return log_softmax_at(scores(repr, params),
                        static_cast<std::size_t>(relation));
}

ClassifierParams classifier_train_step(const std::vector<TrainExample>& batch,
                                       const ClassifierParams& params,
                                       double lr) {
  if (batch.empty()) {
    throw ArgumentError("classifier_train_step: empty batch");
  }
  const std::size_t d_s = static_cast<std::size_t>(params.d_s());
  const std::size_t n_r = params.bias.size();

  // Precompute bag representations, then accumulate in a canonical order so
  // the summation is independent of the batch permutation.
  std::vector<std::pair<int, Vec>> items;
  items.reserve(batch.size());
  for (const auto& ex : batch) {
    if (ex.relation < 0 || ex.relation >= static_cast<int>(n_r)) {
      throw LookupError("classifier_train_step: relation index out of range");
    }
    items.emplace_back(ex.relation, bag_representation(ex.selected, d_s));
  }
  std::sort(items.begin(), items.end());

  Mat grad_w = zeros(n_r, d_s);
  Vec grad_b = zeros(n_r);
  for (const auto& [rel, repr] : items) {
    const Vec probs = predict_proba(scores(repr, params));
    for (std::size_t r = 0; r < n_r; ++r) {
      const double coef =
          (static_cast<int>(r) == rel ? 1.0 : 0.0) - probs[r];
      grad_b[r] += coef;
      axpy(coef, repr, grad_w[r]);
    }
  }
  const double scale = lr / static_cast<double>(items.size());
  ClassifierParams out = params;
  for (std::size_t r = 0; r < n_r; ++r) {
    out.bias[r] += scale * grad_b[r];
    axpy(scale, grad_w[r], out.weight[r]);
  }
  return out;
}

void save_checkpoint(const ClassifierParams& params,
                     const std::vector<std::string>& relations,
                     const std::string& path) {
  nlohmann::json doc;
  doc["format_version"] = "1";
  doc["d_s"] = params.d_s();
  doc["n_r"] = params.n_r();
  doc["relations"] = relations;
  doc["weight"] = params.weight;
  doc["bias"] = params.bias;
  std::ofstream out(path);
  if (!out) throw Error("cannot write classifier checkpoint: " + path);
  out << doc.dump(2) << "\n";
}

ClassifierParams load_checkpoint(const std::string& path,
                                 std::vector<std::string>* relations) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open classifier checkpoint: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
    ClassifierParams p;
    p.weight = doc.at("weight").get<Mat>();
    p.bias = doc.at("bias").get<Vec>();
    if (relations) {
      *relations = doc.at("relations").get<std::vector<std::string>>();
    }
    if (static_cast<int>(p.weight.size()) != doc.at("n_r").get<int>()) {
      throw ParseError("classifier checkpoint: n_r mismatch");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("classifier checkpoint: ") + e.what());
  }
}

}  // namespace bagclean::classifier
