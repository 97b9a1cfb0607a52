#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bagclean/classifier.hpp"
#include "bagclean/datagen.hpp"
#include "bagclean/encoder.hpp"
#include "bagclean/eval.hpp"
#include "bagclean/log.hpp"
#include "bagclean/policy.hpp"
#include "bagclean/rules.hpp"
#include "bagclean/trainer.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace bagclean;

namespace {

struct GenerateArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

int run_generate(const GenerateArgs& args) {
  datagen::GenConfig config =
      datagen::gen_config_from_json_file(args.config_path);
  if (args.seed) config.seed = *args.seed;
  fs::create_directories(args.out_dir);

  datagen::GenResult gen = datagen::generate(config);
  datagen::write_dataset(gen.dataset, args.out_dir + "/dataset.jsonl");
  rules::save_rules(gen.rule_set, args.out_dir + "/rules.json");

  // Optional train/test split, driven by the config file.
  std::ifstream in(args.config_path);
  nlohmann::json j;
  in >> j;
  if (j.contains("train_fraction")) {
    const double frac = j["train_fraction"].get<double>();
    auto [train_bags, test_bags] =
        datagen::split(gen.dataset.bags, frac, config.seed);
    Dataset train{gen.dataset.meta, std::move(train_bags)};
    Dataset test{gen.dataset.meta, std::move(test_bags)};
    datagen::write_dataset(train, args.out_dir + "/train.jsonl");
    datagen::write_dataset(test, args.out_dir + "/test.jsonl");
  }
  log_info("wrote dataset with " + std::to_string(gen.dataset.bags.size()) +
           " bags to " + args.out_dir);
  return 0;
}

struct TrainArgs {
  std::string data_path;
  std::string rules_path;
  std::string mode = "pr";
  int episodes = 100;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  int jobs = 1;
};

void run_one_training(const Dataset& dataset, const rules::RuleSet& rule_set,
                      trainer::TrainConfig config, const std::string& out_dir) {
  fs::create_directories(out_dir);
  trainer::TrainResult result = trainer::train(dataset, rule_set, config);
  eval::write_metrics_csv(result.metrics.episodes, out_dir + "/metrics.csv");
  eval::write_run_metrics(result.metrics, out_dir + "/metrics.json");
  policy::save_checkpoint(result.state.policy_live, out_dir + "/policy.json");
  classifier::save_checkpoint(result.state.classifier_live,
                              dataset.meta.relations,
                              out_dir + "/classifier.json");
}

int run_train(const TrainArgs& args) {
  trainer::TrainConfig config;
  if (!args.config_path.empty()) {
    config = trainer::train_config_from_json_file(args.config_path, config);
  }
  config.mode = trainer::mode_from_string(args.mode);
  config.episodes = args.episodes;
  config.seed = args.seed;
  config.validate();

  const Dataset dataset = datagen::read_dataset(args.data_path);
  const rules::RuleSet rule_set = rules::load_rules(args.rules_path);

  if (args.seeds.empty()) {
    run_one_training(dataset, rule_set, config, args.out_dir);
    return 0;
  }
  // Seed sweep: one independent run per seed, at most --jobs in flight.
  const int jobs = std::max(1, args.jobs);
  std::vector<std::future<void>> running;
  for (std::uint64_t seed : args.seeds) {
    if (static_cast<int>(running.size()) >= jobs) {
      running.front().get();
      running.erase(running.begin());
    }
    trainer::TrainConfig c = config;
    c.seed = seed;
    const std::string out = args.out_dir + "/" + std::to_string(seed);
    running.push_back(std::async(std::launch::async, [&dataset, &rule_set, c,
                                                      out] {
      run_one_training(dataset, rule_set, c, out);
    }));
  }
  for (auto& f : running) f.get();
  return 0;
}

struct EvaluateArgs {
  std::string policy_path;
  std::string classifier_path;
  std::string data_path;
  std::string out_dir;
};

int run_evaluate(const EvaluateArgs& args) {
  const policy::PolicyParams pol = policy::load_checkpoint(args.policy_path);
  std::vector<std::string> relations;
  const classifier::ClassifierParams cls =
      classifier::load_checkpoint(args.classifier_path, &relations);
  const Dataset dataset = datagen::read_dataset(args.data_path);
  fs::create_directories(args.out_dir);

  const trainer::EvalOutput result =
      trainer::evaluate_policy(dataset, pol, cls, relations);

  nlohmann::json report;
  if (result.has_curve) {
    eval::write_curve_csv(result.curve, args.out_dir + "/pr_curve.csv");
    report["pr_auc"] = result.pr_auc;
    report["n_ranked"] = result.curve.size();
  }
  if (result.has_selection) {
    report["selection_precision"] = result.selection.precision;
    report["selection_recall"] = result.selection.recall;
    report["selection_f1"] = result.selection.f1;
  }
  std::ofstream out(args.out_dir + "/report.json");
  out << report.dump(2) << "\n";
  return 0;
}

struct CompareArgs {
  std::vector<std::string> run_paths;
  std::string out_path;
};

int run_compare(const CompareArgs& args) {
  std::vector<eval::RunSummary> runs;
  for (const auto& path : args.run_paths) {
    runs.push_back({path, eval::read_run_metrics(path)});
  }
  const std::string report = eval::compare_runs(runs);
  std::ofstream out(args.out_path);
  if (!out) throw Error("cannot write report: " + args.out_path);
  out << report;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posterior-regularized REINFORCE instance selection"};
  app.require_subcommand(1);

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "generate a synthetic dataset");
  gen->add_option("--config", gen_args.config_path, "generator config (JSON)")
      ->required();
  gen->add_option("--out", gen_args.out_dir, "output directory")->required();
  std::uint64_t gen_seed = 0;
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "override seed");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train selector + classifier");
  train->add_option("--data", train_args.data_path, "dataset (JSONL)")
      ->required();
  train->add_option("--rules", train_args.rules_path, "rules file (JSON)")
      ->required();
  train->add_option("--mode", train_args.mode, "pr|vanilla|noselect")
      ->required();
  train->add_option("--episodes", train_args.episodes, "episode count")
      ->required();
  train->add_option("--seed", train_args.seed, "rng seed")->required();
  train->add_option("--out", train_args.out_dir, "output directory")
      ->required();
  train->add_option("--config", train_args.config_path, "training config");
  train->add_option("--seeds", train_args.seeds,
                    "seed sweep (one run per seed)")
      ->delimiter(',');
  train->add_option("--jobs", train_args.jobs, "parallel runs in a sweep");

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint");
  evaluate->add_option("--policy", eval_args.policy_path, "policy checkpoint")
      ->required();
  evaluate
      ->add_option("--classifier", eval_args.classifier_path,
                   "classifier checkpoint")
      ->required();
  evaluate->add_option("--data", eval_args.data_path, "dataset (JSONL)")
      ->required();
  evaluate->add_option("--out", eval_args.out_dir, "output directory")
      ->required();

  CompareArgs cmp_args;
  auto* compare = app.add_subcommand("compare", "compare run metrics");
  compare->add_option("--runs", cmp_args.run_paths, "metrics.json paths")
      ->required()
      ->expected(-2);
  compare->add_option("--out", cmp_args.out_path, "report path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      if (*gen_seed_opt) gen_args.seed = gen_seed;
      return run_generate(gen_args);
    }
    if (*train) return run_train(train_args);
    if (*evaluate) return run_evaluate(eval_args);
    if (*compare) return run_compare(cmp_args);
  } catch (const std::exception& e) {
    log_error(e.what());
    return 1;
  }
  return 2;
}
