#include "bagclean/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "json.hpp"

namespace bagclean::eval {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

std::vector<PRPoint> pr_curve(std::vector<Prediction> predictions,
                              const std::vector<GoldFact>& gold) {
  if (gold.empty()) throw ArgumentError("pr_curve: empty gold set");
  std::sort(predictions.begin(), predictions.end(),
            [](const Prediction& a, const Prediction& b) {
              if (a.confidence != b.confidence) {
                return a.confidence > b.confidence;
              }
              if (a.bag_id != b.bag_id) return a.bag_id < b.bag_id;
              return a.relation < b.relation;
            });
  std::set<std::pair<std::string, std::string>> gold_set;
  for (const auto& g : gold) gold_set.insert({g.bag_id, g.relation});

  std::vector<PRPoint> curve;
  curve.reserve(predictions.size());
  int correct = 0;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    const auto& p = predictions[k];
    if (gold_set.count({p.bag_id, p.relation})) ++correct;
    PRPoint pt;
    pt.rank = static_cast<int>(k + 1);
    pt.precision = static_cast<double>(correct) / static_cast<double>(k + 1);
    pt.recall =
        static_cast<double>(correct) / static_cast<double>(gold_set.size());
    curve.push_back(pt);
  }
  return curve;
}

double pr_auc(const std::vector<PRPoint>& curve) {
  if (curve.empty()) throw ArgumentError("pr_auc: empty curve");
  double area = 0.0;
  double prev_recall = 0.0;
  for (const auto& pt : curve) {
    area += (pt.recall - prev_recall) * pt.precision;
    prev_recall = pt.recall;
  }
  return area;
}

SelectionMetrics selection_metrics(
    const std::vector<std::vector<int>>& chosen,
    const std::vector<std::vector<bool>>& gold) {
  if (chosen.size() != gold.size()) {
    throw ArgumentError("selection_metrics: bag count mismatch");
  }
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t b = 0; b < gold.size(); ++b) {
    std::vector<bool> picked(gold[b].size(), false);
    for (int i : chosen[b]) {
      if (i < 0 || i >= static_cast<int>(gold[b].size())) {
        throw ArgumentError("selection_metrics: index out of range");
      }
      picked[static_cast<std::size_t>(i)] = true;
    }
    for (std::size_t i = 0; i < gold[b].size(); ++i) {
      if (picked[i] && gold[b][i]) ++tp;
      if (picked[i] && !gold[b][i]) ++fp;
      if (!picked[i] && gold[b][i]) ++fn;
    }
  }
  SelectionMetrics m;
  m.precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
  m.recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
  m.f1 = (m.precision + m.recall > 0.0)
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

std::optional<int> episodes_to_threshold(const std::vector<double>& trace,
                                         double threshold, int window) {
  if (window < 1) throw ArgumentError("episodes_to_threshold: window >= 1");
  for (std::size_t e = static_cast<std::size_t>(window) - 1; e < trace.size();
       ++e) {
    double sum = 0.0;
    for (std::size_t i = e + 1 - static_cast<std::size_t>(window); i <= e; ++i) {
      sum += trace[i];
    }
    if (sum / window >= threshold) return static_cast<int>(e);
  }
  return std::nullopt;
}

namespace {

nlohmann::json run_metrics_to_json(const RunMetrics& m) {
  nlohmann::json j;
  j["episodes"] = nlohmann::json::array();
  for (const auto& e : m.episodes) {
    nlohmann::json ej;
    ej["episode"] = e.episode;
    ej["mean_reward"] = e.mean_reward;
    ej["selection_rate"] = e.selection_rate;
    ej["matched_selection_rate"] = e.matched_selection_rate;
    if (e.has_selection_f1) ej["selection_f1"] = e.selection_f1;
    j["episodes"].push_back(std::move(ej));
  }
  if (m.episodes_to_threshold) {
    j["episodes_to_threshold"] = *m.episodes_to_threshold;
  } else {
    j["episodes_to_threshold"] = nullptr;
  }
  j["pr_curve"] = nlohmann::json::array();
  for (const auto& pt : m.pr_curve) {
    j["pr_curve"].push_back(
        {{"rank", pt.rank}, {"recall", pt.recall}, {"precision", pt.precision}});
  }
  j["pr_auc"] = m.pr_auc;
  j["selection_f1_final"] = m.selection_f1_final;
  return j;
}

RunMetrics run_metrics_from_json(const nlohmann::json& j) {
  RunMetrics m;
  for (const auto& ej : j.at("episodes")) {
    EpisodeStats e;
    e.episode = ej.at("episode").get<int>();
    e.mean_reward = ej.at("mean_reward").get<double>();
    e.selection_rate = ej.at("selection_rate").get<double>();
    e.matched_selection_rate = ej.at("matched_selection_rate").get<double>();
    if (ej.contains("selection_f1")) {
      e.selection_f1 = ej["selection_f1"].get<double>();
      e.has_selection_f1 = true;
    }
    m.episodes.push_back(e);
  }
  if (j.contains("episodes_to_threshold") &&
      !j["episodes_to_threshold"].is_null()) {
    m.episodes_to_threshold = j["episodes_to_threshold"].get<int>();
  }
  if (j.contains("pr_curve")) {
    for (const auto& pj : j["pr_curve"]) {
      PRPoint pt;
      pt.rank = pj.at("rank").get<int>();
      pt.recall = pj.at("recall").get<double>();
      pt.precision = pj.at("precision").get<double>();
      m.pr_curve.push_back(pt);
    }
  }
  m.pr_auc = j.value("pr_auc", 0.0);
  m.selection_f1_final = j.value("selection_f1_final", 0.0);
  return m;
}

}  // namespace

std::string compare_runs(const std::vector<RunSummary>& runs) {
  if (runs.size() < 2) throw ArgumentError("compare_runs: need >= 2 runs");
  nlohmann::json report;
  report["runs"] = nlohmann::json::array();
  std::vector<double> aucs, f1s;
  for (const auto& run : runs) {
    nlohmann::json rj;
    rj["name"] = run.name;
    rj["pr_auc"] = run.metrics.pr_auc;
    rj["selection_f1_final"] = run.metrics.selection_f1_final;
    if (run.metrics.episodes_to_threshold) {
      rj["episodes_to_threshold"] = *run.metrics.episodes_to_threshold;
    } else {
      rj["episodes_to_threshold"] = "not reached";
    }
    report["runs"].push_back(std::move(rj));
    aucs.push_back(run.metrics.pr_auc);
    f1s.push_back(run.metrics.selection_f1_final);
  }
  report["median"] = {{"pr_auc", median(aucs)},
                      {"selection_f1_final", median(f1s)}};
  report["pairwise"] = nlohmann::json::array();
  for (std::size_t a = 0; a < runs.size(); ++a) {
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      nlohmann::json pj;
      pj["a"] = runs[a].name;
      pj["b"] = runs[b].name;
      pj["pr_auc_diff"] = runs[a].metrics.pr_auc - runs[b].metrics.pr_auc;
      pj["selection_f1_diff"] = runs[a].metrics.selection_f1_final -
                                runs[b].metrics.selection_f1_final;
      if (runs[a].metrics.episodes_to_threshold &&
          runs[b].metrics.episodes_to_threshold) {
        pj["episodes_to_threshold_diff"] =
            *runs[a].metrics.episodes_to_threshold -
            *runs[b].metrics.episodes_to_threshold;
      } else {
        pj["episodes_to_threshold_diff"] = nullptr;
      }
      report["pairwise"].push_back(std::move(pj));
    }
  }
  return report.dump(2) + "\n";
}

void write_curve_csv(const std::vector<PRPoint>& curve,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write curve file: " + path);
  out << "rank,recall,precision\n";
  for (const auto& pt : curve) {
    out << pt.rank << "," << fmt_double(pt.recall) << ","
        << fmt_double(pt.precision) << "\n";
  }
}

void write_metrics_csv(const std::vector<EpisodeStats>& episodes,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write metrics file: " + path);
  out << "episode,mean_reward,selection_rate,matched_selection_rate,"
         "selection_f1\n";
  for (const auto& e : episodes) {
    out << e.episode << "," << fmt_double(e.mean_reward) << ","
        << fmt_double(e.selection_rate) << ","
        << fmt_double(e.matched_selection_rate) << ","
        << (e.has_selection_f1 ? fmt_double(e.selection_f1) : "nan") << "\n";
  }
}

void write_run_metrics(const RunMetrics& metrics, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write run metrics: " + path);
  out << run_metrics_to_json(metrics).dump(2) << "\n";
}

RunMetrics read_run_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open run metrics: " + path);
  try {
    nlohmann::json j;
    in >> j;
    return run_metrics_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace bagclean::eval
