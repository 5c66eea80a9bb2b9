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

// In-memory scenario and prediction model with a canonical newline-delimited
// JSON text format: parsing, validation, serialization, and ground-truth
// extraction.

#ifndef TRAJEVAL_SCENARIO_H_
#define TRAJEVAL_SCENARIO_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajeval/geometry.h"

namespace trajeval {

// Consecutive curve vertices may exceed the nominal 0.5 m sampling by this
// much before validation rejects them.
inline constexpr double kCurveSpacing = 0.5;        // meters
inline constexpr double kSpacingTolerance = 1e-3;   // meters

enum class ObjectType { kVehicle, kPedestrian, kCyclist };
inline constexpr int kNumObjectTypes = 3;

enum class FeatureKind {
  kLaneCenter,
  kLaneBoundary,
  kRoadEdge,
  kStopSign,
  kCrosswalk,
  kSpeedBump,
};

enum class SignalState {
  kUnknown,
  kStop,
  kCaution,
  kGo,
  kArrowStop,
  kArrowGo,
  kFlashingStop,
  kFlashingCaution,
};

enum class Difficulty { kEasy, kMedium, kHard };

enum class InteractionKind {
  kMerge,
  kLaneChange,
  kUnprotectedTurn,
  kIntersectionLeftTurn,
  kIntersectionRightTurn,
  kPedestrianVehicle,
  kCyclistVehicle,
  kCloseProximity,
  kHighAcceleration,
};

// One 10 Hz sample of an object. Fields other than `valid` are meaningful
// only when `valid` is set; serialization still requires finite numbers
// everywhere (write zeros for padding).
struct ObjectState {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double heading = 0.0;  // radians in (-pi, pi] when valid
  double vx = 0.0;       // m/s, world frame
  double vy = 0.0;
  double length = 0.0;   // box extent along heading, meters
  double width = 0.0;
  double height = 0.0;
  bool valid = false;

  Vec2 Position2() const { return {x, y}; }
  Vec2 Velocity() const { return {vx, vy}; }
};

struct Track {
  std::string id;
  ObjectType type = ObjectType::kVehicle;
  std::vector<ObjectState> states;
};

struct MapFeature {
  std::string id;
  FeatureKind kind = FeatureKind::kLaneCenter;
  std::vector<Vec3> polyline;
  std::map<std::string, std::string> attributes;
};

struct TrafficSignalFrame {
  int timestep = 0;
  std::map<std::string, SignalState> states;  // lane_center id -> state
};

struct PredictEntry {
  std::string id;
  Difficulty difficulty = Difficulty::kEasy;
};

struct InteractivePair {
  std::string first;
  std::string second;
  InteractionKind kind = InteractionKind::kCloseProximity;
};

struct Scenario {
  std::string scenario_id;
  std::string capture_date;  // ISO date, split-hash key component
  std::string vehicle_id;    // capture vehicle; a track with this id is ego
  int current_index = 0;     // prediction timestep
  std::vector<Track> tracks;
  std::vector<MapFeature> map_features;
  std::vector<TrafficSignalFrame> signal_frames;
  std::vector<PredictEntry> predict_list;
  std::optional<InteractivePair> interactive_pair;

  const Track* FindTrack(std::string_view object_id) const;
  int StepsPerTrack() const;  // 0 when there are no tracks
};

// One scored hypothesis covering all agents of a prediction set.
struct Hypothesis {
  double confidence = 0.0;
  // waypoints[a][t]: agent a's predicted position t+1 steps past prediction
  // time.
  std::vector<std::vector<Vec2>> waypoints;
};

struct JointPredictionSet {
  std::string scenario_id;
  std::vector<std::string> agent_ids;
  std::vector<Hypothesis> hypotheses;

  std::size_t NumAgents() const { return agent_ids.size(); }
  std::size_t NumSteps() const;  // T shared by all hypotheses
};

// Per-agent future ground truth relative to prediction time.
struct AgentGroundTruth {
  std::string object_id;
  ObjectType type = ObjectType::kVehicle;
  // positions[t] / valid[t]: state at current_index + t + 1.
  std::vector<Vec2> positions;
  std::vector<bool> valid;
  Pose2 reference;       // pose at prediction time
  Vec2 frame_velocity;   // (v_x, v_y) at prediction time, agent frame
  double length = 0.0;   // box extents at prediction time
  double width = 0.0;
  double height = 0.0;
};

struct GroundTruthSlice {
  std::vector<AgentGroundTruth> agents;
};

const char* ObjectTypeName(ObjectType type);
const char* FeatureKindName(FeatureKind kind);
const char* SignalStateName(SignalState state);
const char* DifficultyName(Difficulty difficulty);
const char* InteractionKindName(InteractionKind kind);

std::optional<ObjectType> ParseObjectType(std::string_view name);
std::optional<FeatureKind> ParseFeatureKind(std::string_view name);
// Unrecognized names map to kUnknown rather than failing, so newer signal
// vocabularies stay readable.
SignalState ParseSignalState(std::string_view name);
std::optional<Difficulty> ParseDifficulty(std::string_view name);
std::optional<InteractionKind> ParseInteractionKind(std::string_view name);

// Throws Error with kMalformedSyntax / kSchemaViolation /
// kInvariantViolation; messages name the offending path.
Scenario ParseScenario(std::string_view line);
JointPredictionSet ParsePrediction(std::string_view line);

// Canonical single-line form: fixed key order, shortest round-trip float
// formatting, byte-identical across runs. Validates first, so non-finite
// numbers or invariant violations throw instead of emitting a bad record.
std::string SerializeScenario(const Scenario& scenario);
std::string SerializePrediction(const JointPredictionSet& prediction);

// Full invariant checks, independent of parsing.
void ValidateScenario(const Scenario& scenario);
void ValidatePrediction(const JointPredictionSet& prediction);

// Futures for `agent_ids` over `horizon_steps` steps past current_index.
// Throws kInvalidArgument for unknown ids or a horizon past the track end,
// kAgentInvalidAtPredictionTime when an agent is invalid at current_index.
GroundTruthSlice ExtractGroundTruth(const Scenario& scenario,
                                    std::span<const std::string> agent_ids,
                                    int horizon_steps);

// Line-oriented file IO. Parsing is parallelized across lines; errors gain a
// "path:line:" prefix. Throws kIoError when the file cannot be opened.
std::vector<Scenario> ReadScenarioFile(const std::string& path);
std::vector<JointPredictionSet> ReadPredictionFile(const std::string& path);
void WriteScenarioFile(const std::string& path,
                       std::span<const Scenario> scenarios);
void WritePredictionFile(const std::string& path,
                         std::span<const JointPredictionSet> predictions);

}  // namespace trajeval

#endif  // TRAJEVAL_SCENARIO_H_
