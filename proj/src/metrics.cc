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

#include "trajeval/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "trajeval/error.h"
#include "trajeval/parallel.h"

namespace trajeval {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

void CheckHorizon(const JointPredictionSet& p, int horizon_steps) {
  if (horizon_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be at least 1");
  }
  if (static_cast<std::size_t>(horizon_steps) > p.NumSteps()) {
    throw Error(ErrorCode::kInvalidArgument,
                "horizon exceeds the predicted step count");
  }
}

void CheckShapes(const GroundTruthSlice& gt, const JointPredictionSet& p,
                 int horizon_steps) {
  if (gt.agents.empty() || p.hypotheses.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "ground truth and prediction must be non-empty");
  }
  if (p.NumAgents() != gt.agents.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "prediction and ground truth disagree on the agent count");
  }
  CheckHorizon(p, horizon_steps);
  for (const AgentGroundTruth& agent : gt.agents) {
    if (agent.positions.size() < static_cast<std::size_t>(horizon_steps)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "horizon exceeds the ground-truth step count");
    }
  }
}

// matched[k]: hypothesis k matches every agent at the horizon step.
// Disengaged when any agent's ground truth is invalid there.
std::optional<std::vector<bool>> MatchVector(const GroundTruthSlice& gt,
                                             const JointPredictionSet& p,
                                             const HorizonSpec& horizon,
                                             const MetricsConfig& cfg) {
  CheckShapes(gt, p, horizon.step);
  const std::size_t t = static_cast<std::size_t>(horizon.step) - 1;
  for (const AgentGroundTruth& agent : gt.agents) {
    if (!agent.valid[t]) return std::nullopt;
  }
  std::vector<bool> matched(p.hypotheses.size());
  for (std::size_t k = 0; k < p.hypotheses.size(); ++k) {
    bool all = true;
    for (std::size_t a = 0; a < gt.agents.size() && all; ++a) {
      const AgentGroundTruth& agent = gt.agents[a];
      all = IsMatch(agent.positions[t], p.hypotheses[k].waypoints[a][t],
                    agent.reference, agent.frame_velocity.x,
                    agent.frame_velocity.y, horizon, cfg);
    }
    matched[k] = all;
  }
  return matched;
}

std::size_t ArgmaxConfidence(const JointPredictionSet& p) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < p.hypotheses.size(); ++k) {
    if (p.hypotheses[k].confidence > p.hypotheses[best].confidence) best = k;
  }
  return best;
}

}  // namespace

const char* EvalModeName(EvalMode mode) {
  return mode == EvalMode::kMarginal ? "marginal" : "joint";
}

const char* ShapeBucketName(ShapeBucket bucket) {
  switch (bucket) {
    case ShapeBucket::kStationary: return "stationary";
    case ShapeBucket::kStraight: return "straight";
    case ShapeBucket::kStraightLeft: return "straight_left";
    case ShapeBucket::kStraightRight: return "straight_right";
    case ShapeBucket::kLeft: return "left";
    case ShapeBucket::kRight: return "right";
    case ShapeBucket::kLeftUTurn: return "left_u_turn";
    case ShapeBucket::kRightUTurn: return "right_u_turn";
  }
  return "unknown";
}

double SpeedScale(double speed, const MetricsConfig& cfg) {
  const double span = cfg.speed_upper - cfg.speed_lower;
  double t = span > 0.0 ? (speed - cfg.speed_lower) / span : 1.0;
  t = std::clamp(t, 0.0, 1.0);
  return 0.5 + 0.5 * t;
}

bool IsMatch(const Vec2& ground_truth, const Vec2& predicted,
             const Pose2& ref, double vx, double vy,
             const HorizonSpec& horizon, const MetricsConfig& cfg) {
  const Vec2 d = ToAgentFrame(ground_truth - predicted, ref);
  const double lon = horizon.lon0 * SpeedScale(std::abs(vx), cfg);
  const double lat = horizon.lat0 * SpeedScale(std::abs(vy), cfg);
  return std::abs(d.x) <= lon && std::abs(d.y) <= lat;
}

double MinAde(const GroundTruthSlice& gt, const JointPredictionSet& p,
              int horizon_steps) {
  CheckShapes(gt, p, horizon_steps);
  std::size_t valid_pairs = 0;
  for (const AgentGroundTruth& agent : gt.agents) {
    for (int t = 0; t < horizon_steps; ++t) valid_pairs += agent.valid[t];
  }
  if (valid_pairs == 0) {
    throw Error(ErrorCode::kNoValidGroundTruthSteps,
                "no agent has valid ground truth within the horizon");
  }
  double best = kInfinity;
  for (const Hypothesis& hyp : p.hypotheses) {
    double sum = 0.0;
    for (std::size_t a = 0; a < gt.agents.size(); ++a) {
      const AgentGroundTruth& agent = gt.agents[a];
      for (int t = 0; t < horizon_steps; ++t) {
        if (!agent.valid[t]) continue;
        sum += (agent.positions[t] - hyp.waypoints[a][t]).Norm();
      }
    }
    best = std::min(best, sum / static_cast<double>(valid_pairs));
  }
  return best;
}

double MinFde(const GroundTruthSlice& gt, const JointPredictionSet& p,
              int horizon_steps) {
  CheckShapes(gt, p, horizon_steps);
  const std::size_t t = static_cast<std::size_t>(horizon_steps) - 1;
  for (const AgentGroundTruth& agent : gt.agents) {
    if (!agent.valid[t]) {
      throw Error(ErrorCode::kGroundTruthInvalidAtHorizon,
                  "object " + agent.object_id +
                      " has no ground truth at the horizon step");
    }
  }
  double best = kInfinity;
  for (const Hypothesis& hyp : p.hypotheses) {
    double sum = 0.0;
    for (std::size_t a = 0; a < gt.agents.size(); ++a) {
      sum += (gt.agents[a].positions[t] - hyp.waypoints[a][t]).Norm();
    }
    best = std::min(best, sum / static_cast<double>(gt.agents.size()));
  }
  return best;
}

std::optional<bool> MissIndicator(const GroundTruthSlice& gt,
                                  const JointPredictionSet& p,
                                  const HorizonSpec& horizon,
                                  const MetricsConfig& cfg) {
  const auto matched = MatchVector(gt, p, horizon, cfg);
  if (!matched.has_value()) return std::nullopt;
  return std::none_of(matched->begin(), matched->end(),
                      [](bool m) { return m; });
}

bool OverlapIndicator(const Scenario& scene, const JointPredictionSet& p,
                      int horizon_steps, const MetricsConfig& cfg) {
  if (p.hypotheses.empty()) {
    throw Error(ErrorCode::kEmptyInput, "prediction set has no hypotheses");
  }
  CheckHorizon(p, horizon_steps);
  const Hypothesis& hyp = p.hypotheses[ArgmaxConfidence(p)];
  const std::size_t num_agents = p.NumAgents();
  const int h = horizon_steps;

  // Per-agent predicted boxes: current box extents carried forward, headings
  // inferred from one step back (the position at prediction time seeds the
  // first step's heading).
  std::vector<std::vector<Box5>> member(num_agents);
  for (std::size_t a = 0; a < num_agents; ++a) {
    const Track* track = scene.FindTrack(p.agent_ids[a]);
    if (track == nullptr) {
      throw Error(ErrorCode::kInvalidArgument,
                  "prediction references unknown object " + p.agent_ids[a]);
    }
    const ObjectState& cur =
        track->states[static_cast<std::size_t>(scene.current_index)];
    if (!cur.valid) {
      throw Error(ErrorCode::kAgentInvalidAtPredictionTime,
                  "object " + p.agent_ids[a] +
                      " is invalid at prediction time");
    }
    std::vector<Vec2> seq;
    seq.reserve(static_cast<std::size_t>(h) + 1);
    seq.push_back(cur.Position2());
    for (int t = 0; t < h; ++t) seq.push_back(hyp.waypoints[a][t]);
    const std::vector<double> headings = InferHeadings(seq, cur.heading);
    member[a].reserve(static_cast<std::size_t>(h));
    for (int t = 0; t < h; ++t) {
      member[a].push_back({hyp.waypoints[a][t], cur.length, cur.width,
                           headings[static_cast<std::size_t>(t) + 1]});
    }
  }

  // Every other object that exists at prediction time is an obstacle.
  std::unordered_set<std::string_view> members(p.agent_ids.begin(),
                                               p.agent_ids.end());
  std::vector<const Track*> obstacles;
  for (const Track& track : scene.tracks) {
    if (members.count(track.id) > 0) continue;
    if (track.states[static_cast<std::size_t>(scene.current_index)].valid) {
      obstacles.push_back(&track);
    }
  }

  for (int t = 0; t < h; ++t) {
    const std::size_t step =
        static_cast<std::size_t>(scene.current_index) + 1 +
        static_cast<std::size_t>(t);
    for (std::size_t a = 0; a < num_agents; ++a) {
      const Box5& box = member[a][static_cast<std::size_t>(t)];
      for (std::size_t b = a + 1; b < num_agents; ++b) {
        if (BoxIou(box, member[b][static_cast<std::size_t>(t)]) >
            cfg.iou_threshold) {
          return true;
        }
      }
      for (const Track* obstacle : obstacles) {
        if (step >= obstacle->states.size()) continue;
        const ObjectState& st = obstacle->states[step];
        if (!st.valid) continue;
        const Box5 other{{st.x, st.y}, st.length, st.width, st.heading};
        if (BoxIou(box, other) > cfg.iou_threshold) return true;
      }
    }
  }
  return false;
}

double OverlapRateMarginal(const Scenario& scene,
                           std::span<const JointPredictionSet> sets,
                           int horizon_steps, const MetricsConfig& cfg) {
  if (sets.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no prediction sets given");
  }
  std::size_t hits = 0;
  for (const JointPredictionSet& p : sets) {
    if (p.NumAgents() != 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "marginal overlap expects single-agent prediction sets");
    }
    hits += OverlapIndicator(scene, p, horizon_steps, cfg);
  }
  return static_cast<double>(hits) / static_cast<double>(sets.size());
}

ShapeBucket ClassifyShape(const AgentGroundTruth& agent, int horizon_steps,
                          const MetricsConfig& cfg) {
  if (horizon_steps < 1 ||
      static_cast<std::size_t>(horizon_steps) > agent.positions.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "horizon exceeds the ground-truth step count");
  }
  std::vector<Vec2> points;
  points.reserve(static_cast<std::size_t>(horizon_steps));
  for (int t = 0; t < horizon_steps; ++t) {
    if (agent.valid[static_cast<std::size_t>(t)]) {
      points.push_back(agent.positions[static_cast<std::size_t>(t)]);
    }
  }
  if (points.size() < 2) {
    throw Error(ErrorCode::kTooFewValidSteps,
                "trajectory shape needs at least two valid steps");
  }
  const Vec2 anchor = agent.reference.position;
  if ((points.back() - anchor).Norm() < cfg.stationary_displacement) {
    return ShapeBucket::kStationary;
  }
  std::vector<Vec2> sequence;
  sequence.reserve(points.size() + 1);
  sequence.push_back(anchor);
  sequence.insert(sequence.end(), points.begin(), points.end());
  const std::vector<double> headings =
      InferHeadings(sequence, agent.reference.heading);
  double delta_heading = 0.0;
  for (std::size_t i = 1; i < headings.size(); ++i) {
    delta_heading += NormalizeAngle(headings[i] - headings[i - 1]);
  }
  double max_abs_lateral = 0.0;
  double lateral_sum = 0.0;
  for (const Vec2& point : points) {
    const double lateral = ToAgentFrame(point - anchor, agent.reference).y;
    max_abs_lateral = std::max(max_abs_lateral, std::abs(lateral));
    lateral_sum += lateral;
  }
  const double magnitude = std::abs(delta_heading);
  if (magnitude >= cfg.uturn_heading) {
    return delta_heading > 0.0 ? ShapeBucket::kLeftUTurn
                               : ShapeBucket::kRightUTurn;
  }
  if (magnitude >= cfg.turn_heading) {
    return delta_heading > 0.0 ? ShapeBucket::kLeft : ShapeBucket::kRight;
  }
  if (max_abs_lateral >= cfg.lateral_deviation) {
    return lateral_sum >= 0.0 ? ShapeBucket::kStraightLeft
                              : ShapeBucket::kStraightRight;
  }
  return ShapeBucket::kStraight;
}

std::vector<ApRecord> AssignMatches(std::span<const double> confidences,
                                    const std::vector<bool>& matched,
                                    bool argmax_only) {
  if (confidences.size() != matched.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "confidence and match vectors disagree in length");
  }
  const std::size_t n = confidences.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return confidences[a] > confidences[b];
                   });
  std::size_t winner = n;
  if (argmax_only) {
    if (n > 0 && matched[order[0]]) winner = order[0];
  } else {
    for (std::size_t idx : order) {
      if (matched[idx]) {
        winner = idx;
        break;
      }
    }
  }
  std::vector<ApRecord> records(n);
  for (std::size_t k = 0; k < n; ++k) {
    records[k].confidence = confidences[k];
    records[k].true_positive = (k == winner);
    records[k].false_positive = (k != winner);
  }
  return records;
}

double AveragePrecision(std::span<const ApRecord> records,
                        std::size_t num_ground_truth,
                        std::vector<PrPoint>* curve) {
  if (num_ground_truth == 0) {
    throw Error(ErrorCode::kZeroGroundTruth,
                "average precision needs at least one ground-truth object");
  }
  if (curve != nullptr) curve->clear();
  if (records.empty()) return 0.0;

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return records[a].confidence > records[b].confidence;
                   });

  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> confidence;
  precision.reserve(records.size());
  recall.reserve(records.size());
  confidence.reserve(records.size());
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t idx : order) {
    tp += records[idx].true_positive;
    fp += records[idx].false_positive;
    const std::size_t counted = std::max<std::size_t>(tp + fp, 1);
    precision.push_back(static_cast<double>(tp) /
                        static_cast<double>(counted));
    recall.push_back(static_cast<double>(tp) /
                     static_cast<double>(num_ground_truth));
    confidence.push_back(records[idx].confidence);
  }
  for (std::size_t i = precision.size() - 1; i > 0; --i) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0;
  double previous_recall = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - previous_recall) * precision[i];
    previous_recall = recall[i];
  }
  if (curve != nullptr) {
    curve->reserve(precision.size());
    for (std::size_t i = 0; i < precision.size(); ++i) {
      curve->push_back({confidence[i], precision[i], recall[i]});
    }
  }
  return ap;
}

double MeanAp(std::span<const double> ap,
              std::span<const std::size_t> support) {
  if (ap.size() != support.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "ap and support vectors disagree in length");
  }
  double sum = 0.0;
  std::size_t populated = 0;
  for (std::size_t i = 0; i < ap.size(); ++i) {
    if (support[i] == 0) continue;
    sum += ap[i];
    ++populated;
  }
  if (populated == 0) {
    throw Error(ErrorCode::kEmptyEvaluation, "every bucket is empty");
  }
  return sum / static_cast<double>(populated);
}

namespace {

struct CellAccum {
  double ade_sum = 0.0;
  std::size_t ade_n = 0;
  double fde_sum = 0.0;
  std::size_t fde_n = 0;
  std::size_t miss_hits = 0;
  std::size_t miss_n = 0;
  std::size_t overlap_hits = 0;
  std::size_t overlap_n = 0;
  std::array<std::vector<ApRecord>, kNumShapeBuckets> records;
  std::array<std::size_t, kNumShapeBuckets> ground_truth = {};
};

struct ScenarioAccum {
  std::vector<CellAccum> cells;
  std::vector<MissingPrediction> missing;
  std::size_t samples = 0;
};

std::size_t CountValidSteps(const AgentGroundTruth& agent, int horizon_steps) {
  std::size_t count = 0;
  for (int t = 0; t < horizon_steps; ++t) {
    count += agent.valid[static_cast<std::size_t>(t)];
  }
  return count;
}

bool AnyValidStep(const AgentGroundTruth& agent, int horizon_steps) {
  for (int t = 0; t < horizon_steps; ++t) {
    if (agent.valid[static_cast<std::size_t>(t)]) return true;
  }
  return false;
}

std::vector<double> Confidences(const JointPredictionSet& p) {
  std::vector<double> out;
  out.reserve(p.hypotheses.size());
  for (const Hypothesis& hyp : p.hypotheses) out.push_back(hyp.confidence);
  return out;
}

// Accumulates one evaluated sample into the cells named by (type, horizon)
// for each listed agent. Joint samples list both members, so shared values
// land in each member's object-type row.
class SampleScorer {
 public:
  SampleScorer(const Scenario& scene, const JointPredictionSet& p,
               const MetricsConfig& cfg, ScenarioAccum& acc)
      : scene_(scene), prediction_(p), cfg_(cfg), acc_(acc) {}

  void Score() {
    const int available =
        scene_.StepsPerTrack() - 1 - scene_.current_index;
    const int max_step =
        std::min(available, static_cast<int>(prediction_.NumSteps()));
    if (max_step < 1) return;
    const GroundTruthSlice gt =
        ExtractGroundTruth(scene_, prediction_.agent_ids, max_step);
    const std::vector<double> confidences = Confidences(prediction_);
    const std::size_t horizon_count = cfg_.horizons.size();
    for (std::size_t hi = 0; hi < horizon_count; ++hi) {
      const HorizonSpec& horizon = cfg_.horizons[hi];
      if (horizon.step > max_step) continue;
      ScoreHorizon(gt, confidences, hi, horizon, horizon_count);
    }
  }

 private:
  CellAccum& Cell(ObjectType type, std::size_t hi, std::size_t horizons) {
    return acc_.cells[static_cast<std::size_t>(type) * horizons + hi];
  }

  void ScoreHorizon(const GroundTruthSlice& gt,
                    const std::vector<double>& confidences, std::size_t hi,
                    const HorizonSpec& horizon, std::size_t horizon_count) {
    bool any_valid = false;
    for (const AgentGroundTruth& agent : gt.agents) {
      any_valid = any_valid || AnyValidStep(agent, horizon.step);
    }
    double ade = 0.0;
    if (any_valid) ade = MinAde(gt, prediction_, horizon.step);

    const auto matched = MatchVector(gt, prediction_, horizon, cfg_);
    double fde = 0.0;
    bool miss = false;
    if (matched.has_value()) {
      fde = MinFde(gt, prediction_, horizon.step);
      miss = std::none_of(matched->begin(), matched->end(),
                          [](bool m) { return m; });
    }
    const bool overlap =
        OverlapIndicator(scene_, prediction_, horizon.step, cfg_);

    for (const AgentGroundTruth& agent : gt.agents) {
      CellAccum& cell = Cell(agent.type, hi, horizon_count);
      if (any_valid) {
        cell.ade_sum += ade;
        ++cell.ade_n;
      }
      if (matched.has_value()) {
        cell.fde_sum += fde;
        ++cell.fde_n;
        ++cell.miss_n;
        cell.miss_hits += miss;
        if (CountValidSteps(agent, horizon.step) >= 2) {
          const ShapeBucket bucket = ClassifyShape(agent, horizon.step, cfg_);
          const std::size_t b = static_cast<std::size_t>(bucket);
          ++cell.ground_truth[b];
          const std::vector<ApRecord> records =
              AssignMatches(confidences, *matched, cfg_.argmax_only_tp);
          cell.records[b].insert(cell.records[b].end(), records.begin(),
                                 records.end());
        }
      }
      ++cell.overlap_n;
      cell.overlap_hits += overlap;
    }
  }

  const Scenario& scene_;
  const JointPredictionSet& prediction_;
  const MetricsConfig& cfg_;
  ScenarioAccum& acc_;
};

bool ValidAtPredictionTime(const Scenario& scene, const std::string& id) {
  const Track* track = scene.FindTrack(id);
  if (track == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "predict list references unknown object " + id);
  }
  return track->states[static_cast<std::size_t>(scene.current_index)].valid;
}

ScenarioAccum EvaluateMarginal(
    const Scenario& scene,
    std::span<const JointPredictionSet* const> predictions,
    const MetricsConfig& cfg) {
  ScenarioAccum acc;
  acc.cells.resize(kNumObjectTypes * cfg.horizons.size());
  std::unordered_map<std::string_view, const JointPredictionSet*> per_agent;
  for (const JointPredictionSet* p : predictions) {
    if (p->NumAgents() != 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "marginal evaluation expects single-agent prediction sets "
                  "(scenario " +
                      scene.scenario_id + ")");
    }
    if (!per_agent.emplace(p->agent_ids[0], p).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate prediction for object " + p->agent_ids[0] +
                      " in scenario " + scene.scenario_id);
    }
  }
  for (const PredictEntry& entry : scene.predict_list) {
    if (!ValidAtPredictionTime(scene, entry.id)) {
      acc.missing.push_back(
          {scene.scenario_id, entry.id, "agent invalid at prediction time"});
      continue;
    }
    const auto it = per_agent.find(entry.id);
    if (it == per_agent.end()) {
      acc.missing.push_back({scene.scenario_id, entry.id, "no prediction"});
      continue;
    }
    ++acc.samples;
    SampleScorer(scene, *it->second, cfg, acc).Score();
  }
  return acc;
}

ScenarioAccum EvaluateJoint(
    const Scenario& scene,
    std::span<const JointPredictionSet* const> predictions,
    const MetricsConfig& cfg) {
  ScenarioAccum acc;
  acc.cells.resize(kNumObjectTypes * cfg.horizons.size());
  if (!scene.interactive_pair.has_value()) return acc;
  const InteractivePair& pair = *scene.interactive_pair;
  const std::string pair_label = pair.first + "+" + pair.second;

  const JointPredictionSet* joint = nullptr;
  for (const JointPredictionSet* p : predictions) {
    if (p->NumAgents() != 2) continue;
    const bool covers =
        (p->agent_ids[0] == pair.first && p->agent_ids[1] == pair.second) ||
        (p->agent_ids[0] == pair.second && p->agent_ids[1] == pair.first);
    if (!covers) continue;
    if (joint != nullptr) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate joint prediction for scenario " +
                      scene.scenario_id);
    }
    joint = p;
  }
  if (joint == nullptr) {
    acc.missing.push_back({scene.scenario_id, pair_label, "no prediction"});
    return acc;
  }
  if (!ValidAtPredictionTime(scene, pair.first) ||
      !ValidAtPredictionTime(scene, pair.second)) {
    acc.missing.push_back(
        {scene.scenario_id, pair_label, "agent invalid at prediction time"});
    return acc;
  }
  ++acc.samples;
  SampleScorer(scene, *joint, cfg, acc).Score();
  return acc;
}

}  // namespace

MetricsReport Evaluate(std::span<const Scenario> scenarios,
                       std::span<const JointPredictionSet> predictions,
                       const MetricsConfig& cfg, EvalMode mode) {
  if (cfg.horizons.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no horizons configured");
  }
  for (const JointPredictionSet& p : predictions) ValidatePrediction(p);

  std::unordered_map<std::string_view, std::vector<const JointPredictionSet*>>
      by_scenario;
  for (const JointPredictionSet& p : predictions) {
    by_scenario[p.scenario_id].push_back(&p);
  }
  static const std::vector<const JointPredictionSet*> kNone;

  std::vector<std::size_t> order(scenarios.size());
  std::iota(order.begin(), order.end(), 0);
  const std::vector<ScenarioAccum> partials =
      ParallelMap(order, [&](std::size_t i) {
        const Scenario& scene = scenarios[i];
        const auto it = by_scenario.find(scene.scenario_id);
        const auto& list = it == by_scenario.end() ? kNone : it->second;
        return mode == EvalMode::kMarginal
                   ? EvaluateMarginal(scene, list, cfg)
                   : EvaluateJoint(scene, list, cfg);
      });

  const std::size_t horizon_count = cfg.horizons.size();
  std::vector<CellAccum> merged(kNumObjectTypes * horizon_count);
  MetricsReport report;
  report.mode = mode;
  report.scenario_count = scenarios.size();
  for (const ScenarioAccum& partial : partials) {
    report.evaluated_samples += partial.samples;
    report.missing.insert(report.missing.end(), partial.missing.begin(),
                          partial.missing.end());
    for (std::size_t c = 0; c < merged.size(); ++c) {
      CellAccum& into = merged[c];
      const CellAccum& from = partial.cells[c];
      into.ade_sum += from.ade_sum;
      into.ade_n += from.ade_n;
      into.fde_sum += from.fde_sum;
      into.fde_n += from.fde_n;
      into.miss_hits += from.miss_hits;
      into.miss_n += from.miss_n;
      into.overlap_hits += from.overlap_hits;
      into.overlap_n += from.overlap_n;
      for (int b = 0; b < kNumShapeBuckets; ++b) {
        into.ground_truth[b] += from.ground_truth[b];
        into.records[b].insert(into.records[b].end(), from.records[b].begin(),
                               from.records[b].end());
      }
    }
  }

  report.cells.resize(merged.size());
  for (std::size_t ti = 0; ti < kNumObjectTypes; ++ti) {
    for (std::size_t hi = 0; hi < horizon_count; ++hi) {
      const CellAccum& accum = merged[ti * horizon_count + hi];
      CellReport& cell = report.cells[ti * horizon_count + hi];
      cell.type = static_cast<ObjectType>(ti);
      cell.horizon = cfg.horizons[hi];
      cell.ade_samples = accum.ade_n;
      cell.min_ade =
          accum.ade_n > 0 ? accum.ade_sum / static_cast<double>(accum.ade_n)
                          : 0.0;
      cell.fde_samples = accum.fde_n;
      cell.min_fde =
          accum.fde_n > 0 ? accum.fde_sum / static_cast<double>(accum.fde_n)
                          : 0.0;
      cell.miss_samples = accum.miss_n;
      cell.miss_rate = accum.miss_n > 0
                           ? static_cast<double>(accum.miss_hits) /
                                 static_cast<double>(accum.miss_n)
                           : 0.0;
      cell.overlap_samples = accum.overlap_n;
      cell.overlap_rate = accum.overlap_n > 0
                              ? static_cast<double>(accum.overlap_hits) /
                                    static_cast<double>(accum.overlap_n)
                              : 0.0;
      std::array<double, kNumShapeBuckets> aps = {};
      for (int b = 0; b < kNumShapeBuckets; ++b) {
        BucketReport& bucket = cell.buckets[static_cast<std::size_t>(b)];
        bucket.bucket = static_cast<ShapeBucket>(b);
        bucket.support = accum.ground_truth[b];
        if (bucket.support > 0) {
          bucket.ap = AveragePrecision(accum.records[b], bucket.support,
                                       &bucket.curve);
          aps[static_cast<std::size_t>(b)] = bucket.ap;
        }
      }
      const bool any_support =
          std::any_of(accum.ground_truth.begin(), accum.ground_truth.end(),
                      [](std::size_t s) { return s > 0; });
      if (any_support) {
        cell.mean_ap = MeanAp(aps, accum.ground_truth);
        cell.mean_ap_defined = true;
      }
    }
  }
  return report;
}

}  // namespace trajeval
