/* Copyright 2026 The Trajeval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Command-line front end: validate, evaluate, baseline, mine, split,
// windows, stats, gen. Outputs are deterministic for fixed inputs and
// flags; run metadata (timestamps, worker counts) goes only to the
// run_info.json sidecar. TRAJEVAL_THREADS bounds parallelism.

#include <cmath>
#include <cstdint>
#include <ctime>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "trajeval/baselines.h"
#include "trajeval/error.h"
#include "trajeval/metrics.h"
#include "trajeval/mining.h"
#include "trajeval/parallel.h"
#include "trajeval/pipeline.h"
#include "trajeval/report.h"
#include "trajeval/scenario.h"

namespace trajeval {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kUsage = 2;

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

struct ValidateOptions {
  std::string scenarios;
  std::string predictions;
};

int RunValidate(const ValidateOptions& opt) {
  std::size_t bad = 0;
  std::size_t checked = 0;
  const auto check_file = [&](const std::string& path, bool is_prediction) {
    const std::vector<std::string> lines = SplitLines(ReadTextFile(path));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      ++checked;
      try {
        if (is_prediction) {
          ParsePrediction(lines[i]);
        } else {
          ParseScenario(lines[i]);
        }
      } catch (const Error& e) {
        ++bad;
        std::cout << path << ":" << (i + 1) << ": " << e.what() << "\n";
      }
    }
  };
  check_file(opt.scenarios, false);
  if (!opt.predictions.empty()) check_file(opt.predictions, true);
  std::cout << checked - bad << " of " << checked << " records valid\n";
  return bad == 0 ? kOk : kPartial;
}

struct EvaluateOptions {
  std::string scenarios;
  std::string predictions;
  std::string mode = "marginal";
  std::vector<double> horizons = {3.0, 5.0, 8.0};
  std::string out;
};

MetricsConfig ConfigForHorizons(const std::vector<double>& horizons) {
  const MetricsConfig defaults;
  MetricsConfig cfg = defaults;
  cfg.horizons.clear();
  std::vector<double> sorted = horizons;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const double seconds : sorted) {
    bool found = false;
    for (const HorizonSpec& spec : defaults.horizons) {
      if (std::abs(spec.seconds - seconds) < 1e-9) {
        cfg.horizons.push_back(spec);
        found = true;
        break;
      }
    }
    if (!found) {
      throw CLI::ValidationError(
          "--horizons",
          "no miss thresholds defined for a " + FormatDouble(seconds) +
              " s horizon (supported: 3, 5, 8)");
    }
  }
  return cfg;
}

std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

int RunEvaluate(const EvaluateOptions& opt) {
  const MetricsConfig cfg = ConfigForHorizons(opt.horizons);
  const EvalMode mode =
      opt.mode == "joint" ? EvalMode::kJoint : EvalMode::kMarginal;
  const std::vector<Scenario> scenarios = ReadScenarioFile(opt.scenarios);
  const std::vector<JointPredictionSet> predictions =
      ReadPredictionFile(opt.predictions);
  const MetricsReport report = Evaluate(scenarios, predictions, cfg, mode);

  WriteTextFile(opt.out + "/metrics.json", MetricsReportToJson(report));
  WriteTextFile(opt.out + "/metrics.csv", MetricsReportToCsv(report));
  WriteTextFile(opt.out + "/pr_curves.csv", PrCurvesToCsv(report));

  Json info;
  info["tool"] = "trajeval";
  info["subcommand"] = "evaluate";
  info["generated_at"] = UtcNow();
  info["scenarios"] = opt.scenarios;
  info["predictions"] = opt.predictions;
  info["mode"] = EvalModeName(mode);
  Json horizons = Json::array();
  for (const HorizonSpec& spec : cfg.horizons) horizons.push_back(spec.seconds);
  info["horizons"] = std::move(horizons);
  info["workers"] = WorkerCount();
  info["scenario_count"] = report.scenario_count;
  info["prediction_count"] = predictions.size();
  info["evaluated_samples"] = report.evaluated_samples;
  info["missing_predictions"] = report.missing.size();
  WriteTextFile(opt.out + "/run_info.json", info.dump(2) + "\n");

  std::cout << "evaluated " << report.evaluated_samples << " samples from "
            << report.scenario_count << " scenarios ("
            << EvalModeName(mode) << " mode); " << report.missing.size()
            << " missing; reports in " << opt.out << "\n";
  return report.missing.empty() ? kOk : kPartial;
}

struct BaselineOptions {
  std::string scenarios;
  std::string kind = "cv";
  std::string mode = "marginal";
  int horizon_steps = 80;
  std::string out;
};

int RunBaseline(const BaselineOptions& opt) {
  const std::vector<Scenario> scenarios = ReadScenarioFile(opt.scenarios);
  std::vector<JointPredictionSet> predictions;
  std::size_t skipped = 0;
  for (const Scenario& scenario : scenarios) {
    if (opt.mode == "joint") {
      if (!scenario.interactive_pair.has_value()) continue;
      const InteractivePair& pair = *scenario.interactive_pair;
      std::vector<JointPredictionSet> members;
      try {
        for (const std::string& id : {pair.first, pair.second}) {
          const Track* track = scenario.FindTrack(id);
          if (track == nullptr) {
            throw Error(ErrorCode::kAgentInvalidAtPredictionTime,
                        id + " is not a track");
          }
          members.push_back(ConstantVelocityPredict(
              *track, scenario.current_index, opt.horizon_steps,
              scenario.scenario_id));
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kAgentInvalidAtPredictionTime) throw;
        ++skipped;
        std::cerr << scenario.scenario_id << ": " << e.what() << "\n";
        continue;
      }
      predictions.push_back(JointFromMarginal(members, 1));
    } else {
      for (const PredictEntry& entry : scenario.predict_list) {
        const Track* track = scenario.FindTrack(entry.id);
        try {
          predictions.push_back(ConstantVelocityPredict(
              *track, scenario.current_index, opt.horizon_steps,
              scenario.scenario_id));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kAgentInvalidAtPredictionTime) throw;
          ++skipped;
          std::cerr << scenario.scenario_id << ": " << e.what() << "\n";
        }
      }
    }
  }
  WritePredictionFile(opt.out, predictions);
  std::cout << predictions.size() << " prediction sets written to " << opt.out
            << " (" << skipped << " agents skipped)\n";
  return skipped == 0 ? kOk : kPartial;
}

struct MineOptions {
  std::string scenarios;
  std::string query;
  std::string out;
};

int RunMine(const MineOptions& opt) {
  const std::vector<Scenario> scenarios = ReadScenarioFile(opt.scenarios);
  std::string body;
  if (!opt.query.empty()) {
    const PredicateExpr expr = ParsePredicate(opt.query);
    const MiningConfig cfg;
    body = "scenario_id,binding,witness_seconds\n";
    for (const Scenario& scenario : scenarios) {
      for (const Binding& binding : EvaluatePredicate(expr, scenario, cfg)) {
        body += scenario.scenario_id + ",";
        bool first = true;
        for (const auto& [var, id] : binding.assignment) {
          if (!first) body += ';';
          body += var + "=" + id;
          first = false;
        }
        body += ',';
        if (binding.witness_time.has_value()) {
          body += FormatDouble(*binding.witness_time);
        }
        body += '\n';
      }
    }
  } else {
    body = "scenario_id,kind,first,second,event_seconds\n";
    const MiningConfig cfg;
    for (const Scenario& scenario : scenarios) {
      for (const InteractionLabel& label :
           MineInteractivePairs(scenario, cfg)) {
        body += scenario.scenario_id + ",";
        body += InteractionKindName(label.kind);
        body += "," + label.first + "," + label.second + "," +
                FormatDouble(label.time_seconds) + "\n";
      }
    }
  }
  if (opt.out.empty()) {
    std::cout << body;
  } else {
    WriteTextFile(opt.out, body);
  }
  return kOk;
}

struct SplitOptions {
  std::string scenarios;
  std::string out;
};

int RunSplit(const SplitOptions& opt) {
  const std::vector<Scenario> scenarios = ReadScenarioFile(opt.scenarios);
  std::string body = "scenario_id,split\n";
  std::map<std::string, std::size_t> counts;
  for (const Scenario& scenario : scenarios) {
    const Split split =
        AssignSplit(scenario.capture_date, scenario.vehicle_id);
    body += scenario.scenario_id + "," + SplitName(split) + "\n";
    ++counts[SplitName(split)];
  }
  if (opt.out.empty()) {
    std::cout << body;
  } else {
    WriteTextFile(opt.out, body);
  }
  for (const auto& [name, count] : counts) {
    std::cerr << name << ": " << count << "\n";
  }
  return kOk;
}

struct WindowsOptions {
  std::string scenarios;
  std::string set;
  std::string out;
};

int RunWindows(const WindowsOptions& opt) {
  const std::optional<WindowSet> set = ParseWindowSet(opt.set);
  if (!set.has_value()) {
    throw CLI::ValidationError("--set", "unknown window set '" + opt.set +
                                            "'");
  }
  const std::vector<Scenario> parents = ReadScenarioFile(opt.scenarios);
  std::vector<Scenario> windows;
  std::size_t failed = 0;
  for (const Scenario& parent : parents) {
    try {
      std::vector<Scenario> sliced = ExtractWindows(parent, *set);
      windows.insert(windows.end(),
                     std::make_move_iterator(sliced.begin()),
                     std::make_move_iterator(sliced.end()));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kParentTooShort) throw;
      ++failed;
      std::cerr << e.what() << "\n";
    }
  }
  WriteScenarioFile(opt.out, windows);
  std::cout << windows.size() << " windows from " << parents.size()
            << " parents written to " << opt.out << "\n";
  return failed == 0 ? kOk : kPartial;
}

struct StatsOptions {
  std::string scenarios;
  std::string out;
};

int RunStats(const StatsOptions& opt) {
  const std::vector<Scenario> scenarios = ReadScenarioFile(opt.scenarios);
  const CorpusStats stats = ComputeCorpusStats(scenarios);
  if (opt.out.empty()) {
    std::cout << CorpusStatsToJson(stats);
  } else {
    WriteTextFile(opt.out + "/stats.json", CorpusStatsToJson(stats));
    WriteTextFile(opt.out + "/stats.csv", CorpusStatsToCsv(stats));
    std::cout << stats.scenario_count << " scenarios, " << stats.agent_count
              << " agents; stats in " << opt.out << "\n";
  }
  return kOk;
}

struct GenOptions {
  std::string template_name;
  std::uint64_t seed = 0;
  std::uint64_t count = 1;
  std::string out;
};

int RunGen(const GenOptions& opt) {
  const std::optional<ScenarioTemplate> t =
      ParseScenarioTemplate(opt.template_name);
  if (!t.has_value()) {
    throw CLI::ValidationError(
        "--template", "unknown template '" + opt.template_name + "'");
  }
  std::vector<Scenario> scenarios;
  scenarios.reserve(opt.count);
  for (std::uint64_t i = 0; i < opt.count; ++i) {
    scenarios.push_back(GenerateSyntheticScenario(opt.seed + i, *t));
  }
  WriteScenarioFile(opt.out, scenarios);
  std::cout << scenarios.size() << " scenarios written to " << opt.out
            << "\n";
  return kOk;
}

int Main(int argc, char** argv) {
  CLI::App app{
      "Motion forecasting evaluation metrics and dataset tooling"};
  app.require_subcommand(1);
  int exit_code = kOk;

  ValidateOptions validate_opt;
  CLI::App* validate =
      app.add_subcommand("validate", "Check scenario/prediction files");
  validate->add_option("--scenarios", validate_opt.scenarios,
                       "Scenario file (one JSON record per line)")
      ->required();
  validate->add_option("--predictions", validate_opt.predictions,
                       "Prediction file to check as well");
  validate->callback([&] { exit_code = RunValidate(validate_opt); });

  EvaluateOptions evaluate_opt;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score predictions against a corpus");
  evaluate->add_option("--scenarios", evaluate_opt.scenarios,
                       "Ground-truth scenario file")
      ->required();
  evaluate->add_option("--predictions", evaluate_opt.predictions,
                       "Prediction file")
      ->required();
  evaluate->add_option("--mode", evaluate_opt.mode,
                       "marginal (per object) or joint (interactive pair)")
      ->check(CLI::IsMember({"marginal", "joint"}));
  evaluate
      ->add_option("--horizons", evaluate_opt.horizons,
                   "Evaluation horizons in seconds")
      ->delimiter(',');
  evaluate->add_option("--out", evaluate_opt.out, "Report directory")
      ->required();
  evaluate->callback([&] { exit_code = RunEvaluate(evaluate_opt); });

  BaselineOptions baseline_opt;
  CLI::App* baseline =
      app.add_subcommand("baseline", "Run a reference predictor");
  baseline->add_option("--scenarios", baseline_opt.scenarios,
                       "Scenario file")
      ->required();
  baseline->add_option("--kind", baseline_opt.kind, "Predictor kind")
      ->check(CLI::IsMember({"cv"}));
  baseline
      ->add_option("--mode", baseline_opt.mode,
                   "marginal predictions or joint pair predictions")
      ->check(CLI::IsMember({"marginal", "joint"}));
  baseline->add_option("--horizon-steps", baseline_opt.horizon_steps,
                       "Future steps per prediction")
      ->check(CLI::PositiveNumber);
  baseline->add_option("--out", baseline_opt.out, "Prediction file to write")
      ->required();
  baseline->callback([&] { exit_code = RunBaseline(baseline_opt); });

  MineOptions mine_opt;
  CLI::App* mine = app.add_subcommand(
      "mine", "Mine interactions (predicate query or built-in labels)");
  mine->add_option("--scenarios", mine_opt.scenarios, "Scenario file")
      ->required();
  mine->add_option("--query", mine_opt.query,
                   "Predicate expression, e.g. "
                   "and(crossed_paths($a,$b,gap<5), type($a,vehicle))");
  mine->add_option("--out", mine_opt.out, "Output CSV (default stdout)");
  mine->callback([&] { exit_code = RunMine(mine_opt); });

  SplitOptions split_opt;
  CLI::App* split =
      app.add_subcommand("split", "Assign capture-keyed dataset splits");
  split->add_option("--scenarios", split_opt.scenarios, "Scenario file")
      ->required();
  split->add_option("--out", split_opt.out, "Output CSV (default stdout)");
  split->callback([&] { exit_code = RunSplit(split_opt); });

  WindowsOptions windows_opt;
  CLI::App* windows =
      app.add_subcommand("windows", "Slice parents into 9.1 s windows");
  windows->add_option("--scenarios", windows_opt.scenarios,
                      "Parent scenario file")
      ->required();
  windows
      ->add_option("--set", windows_opt.set,
                   "training|val|test|val_interactive|test_interactive")
      ->required();
  windows->add_option("--out", windows_opt.out, "Windowed scenario file")
      ->required();
  windows->callback([&] { exit_code = RunWindows(windows_opt); });

  StatsOptions stats_opt;
  CLI::App* stats =
      app.add_subcommand("stats", "Corpus histograms and coverage");
  stats->add_option("--scenarios", stats_opt.scenarios, "Scenario file")
      ->required();
  stats->add_option("--out", stats_opt.out,
                    "Directory for stats.json/stats.csv (default stdout)");
  stats->callback([&] { exit_code = RunStats(stats_opt); });

  GenOptions gen_opt;
  CLI::App* gen =
      app.add_subcommand("gen", "Generate synthetic scenarios");
  gen->add_option("--template", gen_opt.template_name,
                  "straight_cv|turning|crossing_pair|yield_pedestrian|braking")
      ->required();
  gen->add_option("--seed", gen_opt.seed, "First seed");
  gen->add_option("--count", gen_opt.count, "Scenario count")
      ->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_opt.out, "Scenario file to write")
      ->required();
  gen->callback([&] { exit_code = RunGen(gen_opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return exit_code;
}

}  // namespace
}  // namespace trajeval

int main(int argc, char** argv) { return trajeval::Main(argc, argv); }
