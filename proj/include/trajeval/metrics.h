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

// Evaluation suite for joint and marginal trajectory predictions: minADE,
// minFDE, miss rate, overlap rate, trajectory-shape classification, average
// precision, and the aggregated per-type / per-horizon report.

#ifndef TRAJEVAL_METRICS_H_
#define TRAJEVAL_METRICS_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajeval/geometry.h"
#include "trajeval/scenario.h"

namespace trajeval {

// One evaluation horizon with its base miss thresholds in meters.
struct HorizonSpec {
  double seconds = 8.0;
  int step = 80;      // future step index, 1-based
  double lat0 = 3.0;  // lateral threshold before speed scaling
  double lon0 = 6.0;  // longitudinal threshold before speed scaling
};

struct MetricsConfig {
  std::vector<HorizonSpec> horizons = {{3.0, 30, 1.0, 2.0},
                                       {5.0, 50, 1.8, 3.6},
                                       {8.0, 80, 3.0, 6.0}};
  double speed_lower = 1.4;  // m/s, below this thresholds halve
  double speed_upper = 11.0; // m/s, above this thresholds are unscaled
  double step_period = 0.1;  // seconds per step
  double iou_threshold = 1e-6;

  // Trajectory bucket rule constants.
  double stationary_displacement = 2.0;  // meters
  double turn_heading = kPi / 4;         // radians
  double uturn_heading = 3 * kPi / 4;    // radians
  double lateral_deviation = 3.0;        // meters

  // When set, only the highest-confidence hypothesis may claim an object's
  // true positive; otherwise the best-ranked matching hypothesis does.
  bool argmax_only_tp = false;
};

enum class ShapeBucket {
  kStationary,
  kStraight,
  kStraightLeft,
  kStraightRight,
  kLeft,
  kRight,
  kLeftUTurn,
  kRightUTurn,
};
inline constexpr int kNumShapeBuckets = 8;
const char* ShapeBucketName(ShapeBucket bucket);

// Clamped linear speed scaling in [0.5, 1.0].
double SpeedScale(double speed, const MetricsConfig& cfg);

// Whether a predicted waypoint matches ground truth at the given horizon.
// The displacement is rotated into the agent frame of `ref`; the thresholds
// scale with the magnitudes of the agent-frame velocity components at
// prediction time.
bool IsMatch(const Vec2& ground_truth, const Vec2& predicted,
             const Pose2& ref, double vx, double vy,
             const HorizonSpec& horizon, const MetricsConfig& cfg);

// Minimum over hypotheses of the displacement error averaged over valid
// (agent, step) pairs within the horizon. Ties pick the lowest hypothesis
// index. Throws kNoValidGroundTruthSteps when nothing is valid.
double MinAde(const GroundTruthSlice& gt, const JointPredictionSet& p,
              int horizon_steps);

// Minimum over hypotheses of the mean final displacement at the horizon
// step. Throws kGroundTruthInvalidAtHorizon when any agent lacks ground
// truth there.
double MinFde(const GroundTruthSlice& gt, const JointPredictionSet& p,
              int horizon_steps);

// True when every hypothesis leaves at least one agent unmatched at the
// horizon step; disengaged when any agent's ground truth is invalid there.
std::optional<bool> MissIndicator(const GroundTruthSlice& gt,
                                  const JointPredictionSet& p,
                                  const HorizonSpec& horizon,
                                  const MetricsConfig& cfg);

// Whether the highest-confidence hypothesis collides with the scene: its
// boxes (current box extents, headings inferred from consecutive waypoints)
// are tested per step against the other predicted agents' boxes and against
// ground-truth boxes of every other object that is valid at prediction time.
// With a single-agent prediction set this is the per-agent marginal overlap
// indicator.
bool OverlapIndicator(const Scenario& scene, const JointPredictionSet& p,
                      int horizon_steps, const MetricsConfig& cfg);

// Overlapping agents divided by predicted agents, each set covering one
// agent. Throws kEmptyInput for an empty span.
double OverlapRateMarginal(const Scenario& scene,
                           std::span<const JointPredictionSet> sets,
                           int horizon_steps, const MetricsConfig& cfg);

// Deterministic bucket from net displacement, accumulated heading change,
// and peak lateral deviation over the valid steps within the horizon.
// Throws kTooFewValidSteps with fewer than two valid steps.
ShapeBucket ClassifyShape(const AgentGroundTruth& agent, int horizon_steps,
                          const MetricsConfig& cfg);

struct ApRecord {
  double confidence = 0.0;
  bool true_positive = false;
  bool false_positive = false;
};

struct PrPoint {
  double confidence = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// One-true-positive-per-object assignment. Hypotheses are scanned in
// descending confidence (stable in index); the first matching one is the
// object's true positive and every other hypothesis is a false positive.
// With argmax_only only the top-ranked hypothesis may match. Records are
// returned in hypothesis order.
std::vector<ApRecord> AssignMatches(std::span<const double> confidences,
                                    const std::vector<bool>& matched,
                                    bool argmax_only);

// Area under the interpolated precision envelope, records sorted by
// descending confidence with stable ties. Optionally emits the enveloped
// curve points. Throws kZeroGroundTruth when num_ground_truth is zero.
double AveragePrecision(std::span<const ApRecord> records,
                        std::size_t num_ground_truth,
                        std::vector<PrPoint>* curve = nullptr);

// Unweighted mean over buckets with nonzero support. Throws
// kEmptyEvaluation when every bucket is empty.
double MeanAp(std::span<const double> ap,
              std::span<const std::size_t> support);

enum class EvalMode { kMarginal, kJoint };
const char* EvalModeName(EvalMode mode);

struct BucketReport {
  ShapeBucket bucket = ShapeBucket::kStationary;
  std::size_t support = 0;
  double ap = 0.0;  // meaningful iff support > 0
  std::vector<PrPoint> curve;
};

struct CellReport {
  ObjectType type = ObjectType::kVehicle;
  HorizonSpec horizon;
  std::size_t ade_samples = 0;
  double min_ade = 0.0;
  std::size_t fde_samples = 0;
  double min_fde = 0.0;
  std::size_t miss_samples = 0;
  double miss_rate = 0.0;
  std::size_t overlap_samples = 0;
  double overlap_rate = 0.0;
  bool mean_ap_defined = false;
  double mean_ap = 0.0;
  std::array<BucketReport, kNumShapeBuckets> buckets;
};

struct MissingPrediction {
  std::string scenario_id;
  std::string agent_ids;  // "id" or "id+id"
  std::string reason;
};

struct MetricsReport {
  EvalMode mode = EvalMode::kMarginal;
  std::size_t scenario_count = 0;
  std::size_t evaluated_samples = 0;
  std::vector<CellReport> cells;  // object type major, horizons ascending
  std::vector<MissingPrediction> missing;
};

// Corpus evaluation. Marginal mode matches single-agent prediction sets to
// predict-list entries; joint mode matches one two-agent set per scenario
// against the interactive pair, and the joint sample contributes to each
// member's object-type row. Missing or unusable predictions are reported in
// `missing` while evaluation continues. Per-scenario work is pure and merged
// in input order, so results are independent of the worker count.
MetricsReport Evaluate(std::span<const Scenario> scenarios,
                       std::span<const JointPredictionSet> predictions,
                       const MetricsConfig& cfg, EvalMode mode);

}  // namespace trajeval

#endif  // TRAJEVAL_METRICS_H_
