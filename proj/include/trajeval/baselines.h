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

// Reference predictors, marginal-to-joint conversion, and a deterministic
// synthetic scenario generator for tests and demos.

#ifndef TRAJEVAL_BASELINES_H_
#define TRAJEVAL_BASELINES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "trajeval/scenario.h"

namespace trajeval {

// Single-hypothesis extrapolation holding the current velocity: waypoint i
// (i+1 steps past prediction time) sits at position + velocity*(i+1)*period.
// A=1, K=1, confidence 1.0. Throws kAgentInvalidAtPredictionTime.
JointPredictionSet ConstantVelocityPredict(const Track& track,
                                           int current_index,
                                           int horizon_steps,
                                           std::string_view scenario_id = {},
                                           double step_period = 0.1);

// Combines per-agent marginal sets (each A=1, same scenario and step count)
// into one joint set: every hypothesis tuple in the cross product is scored
// by the product of member confidences, and the top K survive, ties broken
// by lexicographic member indices. Confidences are unnormalized scores and
// the products are kept as-is. Throws kEmptyMarginalSet for a hypothesis-less
// member and kInvalidArgument for fewer than two members, mismatched
// scenarios or step counts, or a cross product beyond 1e6 tuples.
JointPredictionSet JointFromMarginal(
    std::span<const JointPredictionSet> marginals, std::size_t k);

// Synthetic scene families with analytically known trajectories. Each yields
// a 91-step scenario with current_index 10, an ego track, lane-center
// polylines, a selected predict list, and, where the family is inherently
// two-agent, an interactive pair annotation.
enum class ScenarioTemplate {
  kStraightCv,       // constant-velocity vehicles in parallel lanes
  kTurning,          // one vehicle on a quarter-circle left turn
  kCrossingPair,     // turning vehicle crossing a through vehicle, 2 s gap
  kYieldPedestrian,  // vehicle braking to a stop while a pedestrian crosses
  kBraking,          // lead vehicle braking hard ahead of a follower
};

const char* ScenarioTemplateName(ScenarioTemplate t);

// Accepts straight_cv|turning|crossing_pair|yield_pedestrian|braking.
std::optional<ScenarioTemplate> ParseScenarioTemplate(std::string_view name);

// Deterministic in (seed, template): repeated calls serialize identically.
Scenario GenerateSyntheticScenario(std::uint64_t seed, ScenarioTemplate t);

}  // namespace trajeval

#endif  // TRAJEVAL_BASELINES_H_
