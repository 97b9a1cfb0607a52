#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bagclean/types.hpp"

namespace bagclean::eval {

struct Prediction {
  std::string bag_id;
  std::string relation;
  double confidence = 0.0;
};

struct GoldFact {
  std::string bag_id;
  std::string relation;
};

struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
  int rank = 0;  // 1-based
};

struct RunMetrics {
  std::vector<EpisodeStats> episodes;
  std::optional<int> episodes_to_threshold;
  std::vector<PRPoint> pr_curve;
  double pr_auc = 0.0;
  double selection_f1_final = 0.0;
};

// Ranks predictions by descending confidence (ties broken by bag_id then
// relation) and emits precision/recall at every rank. NA predictions are the
// caller's business to exclude. Throws on empty gold.
std::vector<PRPoint> pr_curve(std::vector<Prediction> predictions,
                              const std::vector<GoldFact>& gold);

// Area under the curve with stepwise-left precision interpolation over
// recall in [0, max recall].
double pr_auc(const std::vector<PRPoint>& curve);

struct SelectionMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Instance-level selection quality over the whole corpus; 0/0 maps to 0.
// `chosen` holds per-bag selected indices, `gold` per-bag gold_select flags.
SelectionMetrics selection_metrics(
    const std::vector<std::vector<int>>& chosen,
    const std::vector<std::vector<bool>>& gold);

// Smallest episode index e with mean(trace[e-window+1 .. e]) >= threshold.
std::optional<int> episodes_to_threshold(const std::vector<double>& trace,
                                         double threshold, int window);

struct RunSummary {
  std::string name;
  RunMetrics metrics;
};

// Structured comparison report (JSON text): per-run scalar metrics, medians,
// and pairwise differences. Requires at least two runs.
std::string compare_runs(const std::vector<RunSummary>& runs);

void write_curve_csv(const std::vector<PRPoint>& curve,
                     const std::string& path);
void write_metrics_csv(const std::vector<EpisodeStats>& episodes,
                       const std::string& path);
void write_run_metrics(const RunMetrics& metrics, const std::string& path);
RunMetrics read_run_metrics(const std::string& path);

}  // namespace bagclean::eval
