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

// Semantic predicates over scenarios (lane changes, path crossings,
// proximity, acceleration), a small composable query DSL, and interactive
// pair mining.

#ifndef TRAJEVAL_MINING_H_
#define TRAJEVAL_MINING_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajeval/geometry.h"
#include "trajeval/scenario.h"

namespace trajeval {

// Gate constants for the built-in predicates and pair mining. The scenario
// kinds are named but not defined anywhere authoritative, so the
// compositions below are heuristics with every constant tunable here.
struct MiningConfig {
  double lane_assignment_max_dist = 3.0;   // meters, half a lane width-ish
  double close_proximity_max_dist = 3.0;   // meters
  double pedestrian_vehicle_max_dist = 5.0;
  double cyclist_vehicle_max_dist = 5.0;
  double high_accel_threshold = 4.0;       // m/s^2
  double pairing_max_dist = 10.0;          // partner search radius, meters
  double crossing_max_gap = 5.0;           // seconds
  // Crossing heading-difference bands: (merge_min, merge_max] is a merge,
  // [unprotected_min, pi] an unprotected turn, in between an intersection
  // turn when the turning agent bends at least turn_min_net_heading.
  double merge_min_heading = 0.05;
  double merge_max_heading = kPi / 4;
  double unprotected_min_heading = 3 * kPi / 4;
  double turn_min_net_heading = kPi / 6;
  double anchor_time = 10.0;               // seconds, pair-selection target
  double step_period = 0.1;                // seconds
};

// Steps (indices into track.states) at which the nearest lane-center
// assignment changes between consecutive valid steps, both assignments
// within max_dist. Ties go to the lower feature id. Throws kNoLanes when
// `features` holds no lane centers.
std::vector<int> DetectLaneChanges(const Track& track,
                                   std::span<const MapFeature> features,
                                   double max_dist);

struct CrossingInfo {
  double time_gap = 0.0;      // |time_a - time_b| in seconds
  double heading_diff = 0.0;  // radians in [0, pi]
  Vec2 point;
  double time_a = 0.0;        // arrival at the crossing, seconds from start
  double time_b = 0.0;
};

// Earliest spatial intersection of the two piecewise-linear paths through
// each track's valid states, including collinear-overlap endpoints. Arrival
// times interpolate linearly along segments. Empty when the paths never
// intersect or either track has fewer than two valid steps.
std::optional<CrossingInfo> CrossedPaths(const Track& a, const Track& b,
                                         double step_period = 0.1);

// Steps where both tracks are valid and their centers are at most max_dist
// apart.
std::vector<int> StepsWithin(const Track& a, const Track& b, double max_dist);

// Steps whose central-difference acceleration of the stored velocity channel
// reaches min_accel. A step qualifies only when it and both neighbors are
// valid.
std::vector<int> HighAccelerationSteps(const Track& track, double min_accel,
                                       double step_period = 0.1);

// --- Query DSL ---
//
//   expr  := and(expr, expr, ...) | or(expr, expr, ...) | not(expr) | atom
//   atom  := lane_change(agent)
//          | crossed_paths(agent, agent [, gap<SECONDS] [, heading>RADIANS])
//          | close_proximity(agent, agent [, dist<METERS])
//          | high_acceleration(agent [, accel>MPS2])
//          | type(agent, vehicle|pedestrian|cyclist)
//   agent := $name (variable) | name (literal object id)
//
// Parameter bounds are inclusive, matching the event detectors (distance <=,
// acceleration >=, gap <=, heading difference >=). Pair atoms are false when
// both slots bind the same object; unknown literal ids make an atom false.

enum class PredicateOp { kAnd, kOr, kNot, kAtom };

enum class AtomKind {
  kLaneChange,
  kCrossedPaths,
  kCloseProximity,
  kHighAcceleration,
  kType,
};

struct AtomTerm {
  std::string name;         // variable name or literal object id
  bool is_variable = false;
};

struct Atom {
  AtomKind kind = AtomKind::kLaneChange;
  std::vector<AtomTerm> terms;
  std::optional<double> max_gap;      // crossed_paths
  std::optional<double> min_heading;  // crossed_paths
  std::optional<double> max_dist;     // close_proximity
  std::optional<double> min_accel;    // high_acceleration
  ObjectType type = ObjectType::kVehicle;  // type atom
};

struct PredicateExpr {
  PredicateOp op = PredicateOp::kAtom;
  std::vector<PredicateExpr> children;  // kAnd/kOr: >= 1, kNot: exactly 1
  Atom atom;                            // meaningful when op == kAtom
};

// Throws kMalformedSyntax with a character position on bad input.
PredicateExpr ParsePredicate(std::string_view text);

struct Binding {
  std::map<std::string, std::string> assignment;  // variable -> object id
  // Earliest event time (seconds) among the satisfied time-bearing atoms,
  // when any exist.
  std::optional<double> witness_time;
};

// Exhaustive evaluation over all assignments of variables to scenario
// object ids, in lexicographic order of (variable, id). Throws
// kUnboundNegation when a variable occurs only under negation and
// kInvalidArgument when the assignment space exceeds 1e6.
std::vector<Binding> EvaluatePredicate(const PredicateExpr& expr,
                                       const Scenario& scenario,
                                       const MiningConfig& cfg);

struct InteractionLabel {
  std::string first;
  std::string second;
  InteractionKind kind = InteractionKind::kCloseProximity;
  double time_seconds = 0.0;  // event time from scenario start
};

// Runs the built-in predicate library per interaction kind and keeps, for
// each kind, the pair whose event time is nearest cfg.anchor_time. At most
// one label per kind, ordered by kind.
std::vector<InteractionLabel> MineInteractivePairs(const Scenario& scenario,
                                                   const MiningConfig& cfg);

}  // namespace trajeval

#endif  // TRAJEVAL_MINING_H_
