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

#include "trajeval/pipeline.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "json.hpp"

#include "trajeval/error.h"
#include "trajeval/geometry.h"

namespace trajeval {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<int, 7> kTrainingOffsets = {0, 2, 4, 5, 6, 8, 10};
constexpr std::array<int, 3> kEvalOffsets = {0, 5, 10};
constexpr std::array<int, 3> kInteractiveOffsets = {4, 5, 6};

bool IsInteractive(WindowSet set) {
  return set == WindowSet::kValidationInteractive ||
         set == WindowSet::kTestInteractive;
}

// Valid at the prediction step with at least one valid later step.
bool UsableAtPrediction(const Track& track, int current_index) {
  const std::size_t cur = static_cast<std::size_t>(current_index);
  if (cur >= track.states.size() || !track.states[cur].valid) return false;
  for (std::size_t t = cur + 1; t < track.states.size(); ++t) {
    if (track.states[t].valid) return true;
  }
  return false;
}

}  // namespace

const char* SplitName(Split split) {
  switch (split) {
    case Split::kTraining:
      return "training";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "unknown";
}

std::uint64_t Fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

Split AssignSplit(std::string_view capture_date, std::string_view vehicle_id) {
  if (capture_date.empty() || vehicle_id.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "split key needs a capture date and a vehicle id");
  }
  std::string key;
  key.reserve(capture_date.size() + 1 + vehicle_id.size());
  key.append(capture_date);
  key.push_back('|');
  key.append(vehicle_id);
  const std::uint64_t bucket = Fnv1a64(key) % 100;
  if (bucket < 70) return Split::kTraining;
  if (bucket < 85) return Split::kValidation;
  return Split::kTest;
}

const char* WindowSetName(WindowSet set) {
  switch (set) {
    case WindowSet::kTraining:
      return "training";
    case WindowSet::kValidation:
      return "val";
    case WindowSet::kTest:
      return "test";
    case WindowSet::kValidationInteractive:
      return "val_interactive";
    case WindowSet::kTestInteractive:
      return "test_interactive";
  }
  return "unknown";
}

std::optional<WindowSet> ParseWindowSet(std::string_view name) {
  if (name == "training") return WindowSet::kTraining;
  if (name == "val") return WindowSet::kValidation;
  if (name == "test") return WindowSet::kTest;
  if (name == "val_interactive") return WindowSet::kValidationInteractive;
  if (name == "test_interactive") return WindowSet::kTestInteractive;
  return std::nullopt;
}

std::span<const int> WindowOffsetsSeconds(WindowSet set) {
  if (set == WindowSet::kTraining) return kTrainingOffsets;
  if (IsInteractive(set)) return kInteractiveOffsets;
  return kEvalOffsets;
}

double CvEndpointError(const Track& track, int current_index,
                       double step_period) {
  const std::size_t cur = static_cast<std::size_t>(current_index);
  if (current_index < 0 || cur >= track.states.size() ||
      !track.states[cur].valid) {
    return 0.0;
  }
  int furthest = -1;
  for (std::size_t t = track.states.size(); t-- > cur + 1;) {
    if (track.states[t].valid) {
      furthest = static_cast<int>(t);
      break;
    }
  }
  if (furthest < 0) return 0.0;
  const ObjectState& now = track.states[cur];
  const double dt = (furthest - current_index) * step_period;
  const Vec2 extrapolated = now.Position2() + now.Velocity() * dt;
  return (track.states[static_cast<std::size_t>(furthest)].Position2() -
          extrapolated)
      .Norm();
}

Difficulty ScoreDifficulty(const Track& track, int current_index,
                           const PipelineConfig& cfg) {
  const double error = CvEndpointError(track, current_index, cfg.step_period);
  if (error < cfg.easy_error) return Difficulty::kEasy;
  if (error < cfg.hard_error) return Difficulty::kMedium;
  return Difficulty::kHard;
}

std::vector<PredictEntry> SelectPredictObjects(const Scenario& window,
                                               const PipelineConfig& cfg) {
  struct Candidate {
    double score = 0.0;
    const Track* track = nullptr;
  };
  std::vector<Candidate> candidates;
  for (const Track& track : window.tracks) {
    if (!UsableAtPrediction(track, window.current_index)) continue;
    candidates.push_back(
        {CvEndpointError(track, window.current_index, cfg.step_period),
         &track});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.track->id < b.track->id;
            });

  const std::size_t cap = static_cast<std::size_t>(cfg.max_predict_objects);
  std::vector<bool> taken(candidates.size(), false);
  std::size_t total = 0;
  // Per-type quota first, then backfill by global rank.
  std::array<int, kNumObjectTypes> per_type{};
  for (std::size_t i = 0; i < candidates.size() && total < cap; ++i) {
    int& count = per_type[static_cast<std::size_t>(candidates[i].track->type)];
    if (count >= cfg.per_type_quota) continue;
    ++count;
    taken[i] = true;
    ++total;
  }
  for (std::size_t i = 0; i < candidates.size() && total < cap; ++i) {
    if (taken[i]) continue;
    taken[i] = true;
    ++total;
  }

  std::vector<PredictEntry> entries;
  entries.reserve(total);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!taken[i]) continue;
    entries.push_back({candidates[i].track->id,
                       ScoreDifficulty(*candidates[i].track,
                                       window.current_index, cfg)});
  }
  return entries;
}

std::vector<Scenario> ExtractWindows(const Scenario& parent, WindowSet set,
                                     const PipelineConfig& cfg) {
  const int parent_steps = parent.StepsPerTrack();
  std::vector<Scenario> windows;
  bool any_fit = false;
  for (const int offset : WindowOffsetsSeconds(set)) {
    const int start = offset * cfg.steps_per_second;
    if (start + cfg.window_steps > parent_steps) continue;
    any_fit = true;

    Scenario w;
    w.scenario_id = parent.scenario_id + "_o" + std::to_string(offset);
    w.capture_date = parent.capture_date;
    w.vehicle_id = parent.vehicle_id;
    w.current_index = cfg.current_index;
    for (const Track& track : parent.tracks) {
      Track sliced;
      sliced.id = track.id;
      sliced.type = track.type;
      sliced.states.assign(
          track.states.begin() + start,
          track.states.begin() + start + cfg.window_steps);
      const bool any_valid =
          std::any_of(sliced.states.begin(), sliced.states.end(),
                      [](const ObjectState& s) { return s.valid; });
      if (any_valid) w.tracks.push_back(std::move(sliced));
    }
    w.map_features = parent.map_features;
    for (const TrafficSignalFrame& frame : parent.signal_frames) {
      if (frame.timestep < start || frame.timestep >= start + cfg.window_steps)
        continue;
      TrafficSignalFrame local = frame;
      local.timestep = frame.timestep - start;
      w.signal_frames.push_back(std::move(local));
    }

    if (IsInteractive(set)) {
      if (!parent.interactive_pair.has_value()) continue;
      const InteractivePair& pair = *parent.interactive_pair;
      const Track* first = w.FindTrack(pair.first);
      const Track* second = w.FindTrack(pair.second);
      if (first == nullptr || second == nullptr ||
          !UsableAtPrediction(*first, w.current_index) ||
          !UsableAtPrediction(*second, w.current_index)) {
        continue;
      }
      w.predict_list = {
          {pair.first, ScoreDifficulty(*first, w.current_index, cfg)},
          {pair.second, ScoreDifficulty(*second, w.current_index, cfg)}};
      w.interactive_pair = pair;
    } else {
      w.predict_list = SelectPredictObjects(w, cfg);
      if (parent.interactive_pair.has_value() &&
          w.FindTrack(parent.interactive_pair->first) != nullptr &&
          w.FindTrack(parent.interactive_pair->second) != nullptr) {
        w.interactive_pair = parent.interactive_pair;
      }
    }
    windows.push_back(std::move(w));
  }
  if (!any_fit) {
    throw Error(ErrorCode::kParentTooShort,
                parent.scenario_id + ": no window offset fits in " +
                    std::to_string(parent_steps) + " steps");
  }
  return windows;
}

const char* AgentBucketLabel(std::size_t bucket) {
  static constexpr std::array<const char*, kNumAgentBuckets> kLabels = {
      "0", "1", "2-3", "4-7", "8-15", "16-31", "32-63", "64-127", "128+"};
  return bucket < kLabels.size() ? kLabels[bucket] : "invalid";
}

namespace {

std::size_t AgentBucketIndex(std::size_t agents) {
  if (agents == 0) return 0;
  std::size_t bucket = 1;
  while (bucket < kNumAgentBuckets - 1 && agents >= (1ull << bucket)) ++bucket;
  return bucket;
}

}  // namespace

CorpusStats ComputeCorpusStats(std::span<const Scenario> scenarios,
                               const PipelineConfig& cfg) {
  CorpusStats stats;
  std::vector<Vec2> ego_poses;
  for (const Scenario& scenario : scenarios) {
    ++stats.scenario_count;
    ++stats.agents_per_scene[AgentBucketIndex(scenario.tracks.size())];
    for (const Track& track : scenario.tracks) {
      ++stats.agent_count;
      double max_speed = 0.0;
      for (const ObjectState& s : track.states) {
        if (s.valid) max_speed = std::max(max_speed, s.Velocity().Norm());
      }
      const std::size_t bin = std::min(
          kNumSpeedBins - 1, static_cast<std::size_t>(std::floor(max_speed)));
      ++stats.max_speed[bin];
    }
    for (const PredictEntry& entry : scenario.predict_list) {
      const Track* track = scenario.FindTrack(entry.id);
      if (track != nullptr) {
        ++stats.predict_counts[static_cast<std::size_t>(track->type)];
      }
    }
    const Track* ego = scenario.FindTrack(scenario.vehicle_id);
    if (ego != nullptr) {
      ++stats.ego_scenario_count;
      for (const ObjectState& s : ego->states) {
        if (s.valid) ego_poses.push_back(s.Position2());
      }
    }
  }
  stats.roadway_voxels = CountUniqueVoxels(ego_poses, cfg.voxel_size);
  return stats;
}

std::string CorpusStatsToJson(const CorpusStats& stats) {
  Json doc;
  doc["scenario_count"] = stats.scenario_count;
  doc["agent_count"] = stats.agent_count;
  Json agents = Json::object();
  for (std::size_t i = 0; i < kNumAgentBuckets; ++i) {
    agents[AgentBucketLabel(i)] = stats.agents_per_scene[i];
  }
  doc["agents_per_scene"] = std::move(agents);
  Json predict = Json::object();
  Json shares = Json::object();
  std::size_t predict_total = 0;
  for (const std::size_t count : stats.predict_counts) predict_total += count;
  for (int type = 0; type < kNumObjectTypes; ++type) {
    const char* name = ObjectTypeName(static_cast<ObjectType>(type));
    const std::size_t count =
        stats.predict_counts[static_cast<std::size_t>(type)];
    predict[name] = count;
    shares[name] = predict_total == 0
                       ? 0.0
                       : static_cast<double>(count) /
                             static_cast<double>(predict_total);
  }
  doc["predict_counts"] = std::move(predict);
  doc["predict_shares"] = std::move(shares);
  doc["max_speed_histogram"] = stats.max_speed;
  doc["roadway_voxel_count"] = stats.roadway_voxels;
  doc["ego_scenario_count"] = stats.ego_scenario_count;
  return doc.dump(2) + "\n";
}

std::string CorpusStatsToCsv(const CorpusStats& stats) {
  std::string out = "table,bin,count\n";
  for (std::size_t i = 0; i < kNumAgentBuckets; ++i) {
    out += "agents_per_scene,";
    out += AgentBucketLabel(i);
    out += ',' + std::to_string(stats.agents_per_scene[i]) + '\n';
  }
  for (int type = 0; type < kNumObjectTypes; ++type) {
    out += "predict_counts,";
    out += ObjectTypeName(static_cast<ObjectType>(type));
    out += ',' +
           std::to_string(stats.predict_counts[static_cast<std::size_t>(type)]) +
           '\n';
  }
  for (std::size_t i = 0; i < kNumSpeedBins; ++i) {
    out += "max_speed,";
    out += i + 1 < kNumSpeedBins ? std::to_string(i) : std::string("41+");
    out += ',' + std::to_string(stats.max_speed[i]) + '\n';
  }
  return out;
}

}  // namespace trajeval
