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

// Dataset assembly: deterministic capture-key splits, 9.1 s windowing of
// 20 s parents, predict-object selection, difficulty scoring, and corpus
// statistics.

#ifndef TRAJEVAL_PIPELINE_H_
#define TRAJEVAL_PIPELINE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajeval/scenario.h"

namespace trajeval {

enum class Split { kTraining, kValidation, kTest };

const char* SplitName(Split split);

// FNV-1a over the UTF-8 bytes, 64-bit variant.
std::uint64_t Fnv1a64(std::string_view text);

// Hashes "date|vehicle" and buckets mod 100: < 70 training, < 85
// validation, else test. Pure function of the two strings. Throws
// kEmptyInput when either is empty.
Split AssignSplit(std::string_view capture_date, std::string_view vehicle_id);

enum class WindowSet {
  kTraining,
  kValidation,
  kTest,
  kValidationInteractive,
  kTestInteractive,
};

const char* WindowSetName(WindowSet set);

// Accepts training|val|test|val_interactive|test_interactive.
std::optional<WindowSet> ParseWindowSet(std::string_view name);

// Window start offsets in seconds for a target set.
std::span<const int> WindowOffsetsSeconds(WindowSet set);

struct PipelineConfig {
  int window_steps = 91;      // 9.1 s at 10 Hz, one current + 90 future
  int current_index = 10;     // 1 s of history inside each window
  int steps_per_second = 10;
  double step_period = 0.1;   // seconds
  // Difficulty thresholds on the constant-velocity endpoint error: easy
  // below easy_error, hard at hard_error and above. Stand-ins for a learned
  // extrapolator.
  double easy_error = 2.0;    // meters
  double hard_error = 6.0;
  int max_predict_objects = 8;
  int per_type_quota = 2;
  double voxel_size = 25.0;   // meters, roadway statistic
};

// Distance between the track's furthest valid state after current_index and
// a constant-velocity extrapolation from the current state. Zero when the
// current state is invalid or nothing valid follows.
double CvEndpointError(const Track& track, int current_index,
                       double step_period = 0.1);

// Thresholded constant-velocity endpoint error.
Difficulty ScoreDifficulty(const Track& track, int current_index,
                           const PipelineConfig& cfg = {});

// Up to max_predict_objects entries: candidates are tracks valid at
// current_index with at least one valid later step, scored by
// CvEndpointError. Each type keeps up to per_type_quota of its best before
// remaining slots fill by global score. Ordered by (score desc, id asc);
// independent of input track order.
std::vector<PredictEntry> SelectPredictObjects(const Scenario& window,
                                               const PipelineConfig& cfg = {});

// Slices the parent into windows at the set's offsets (those that fit),
// re-basing signal-frame timesteps and dropping tracks with no valid state
// inside the window. Standard sets run SelectPredictObjects per window and
// inherit the parent's interactive pair when both members survive;
// interactive sets predict exactly the pair members and skip windows where
// either member is unusable at prediction time. Throws kParentTooShort when
// no offset fits.
std::vector<Scenario> ExtractWindows(const Scenario& parent, WindowSet set,
                                     const PipelineConfig& cfg = {});

inline constexpr std::size_t kNumAgentBuckets = 9;
inline constexpr std::size_t kNumSpeedBins = 42;  // 1 m/s bins, last is 41+

// Label for agents-per-scene bucket i, e.g. "2-3" or "128+".
const char* AgentBucketLabel(std::size_t bucket);

struct CorpusStats {
  std::size_t scenario_count = 0;
  std::size_t agent_count = 0;
  // Power-of-two buckets 0, 1, 2-3, 4-7, ..., 64-127, 128+.
  std::array<std::size_t, kNumAgentBuckets> agents_per_scene{};
  std::array<std::size_t, kNumObjectTypes> predict_counts{};
  // Per-agent maximum speed over valid steps; agents with no valid step
  // count as 0 so the histogram total stays agent_count.
  std::array<std::size_t, kNumSpeedBins> max_speed{};
  // Unique voxels covered by valid ego poses, pooled across the corpus.
  std::size_t roadway_voxels = 0;
  std::size_t ego_scenario_count = 0;
};

CorpusStats ComputeCorpusStats(std::span<const Scenario> scenarios,
                               const PipelineConfig& cfg = {});

// Key-ordered JSON document.
std::string CorpusStatsToJson(const CorpusStats& stats);

// Long-form histogram table: table,bin,count.
std::string CorpusStatsToCsv(const CorpusStats& stats);

}  // namespace trajeval

#endif  // TRAJEVAL_PIPELINE_H_
