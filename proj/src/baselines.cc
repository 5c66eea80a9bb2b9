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

#include "trajeval/baselines.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "trajeval/error.h"
#include "trajeval/geometry.h"
#include "trajeval/pipeline.h"
#include "trajeval/prng.h"

namespace trajeval {

JointPredictionSet ConstantVelocityPredict(const Track& track,
                                           int current_index,
                                           int horizon_steps,
                                           std::string_view scenario_id,
                                           double step_period) {
  const std::size_t cur = static_cast<std::size_t>(current_index);
  if (current_index < 0 || cur >= track.states.size() ||
      !track.states[cur].valid) {
    throw Error(ErrorCode::kAgentInvalidAtPredictionTime,
                track.id + " is invalid at the prediction step");
  }
  const ObjectState& now = track.states[cur];
  JointPredictionSet set;
  set.scenario_id = std::string(scenario_id);
  set.agent_ids = {track.id};
  Hypothesis hyp;
  hyp.confidence = 1.0;
  hyp.waypoints.resize(1);
  hyp.waypoints[0].reserve(static_cast<std::size_t>(horizon_steps));
  for (int i = 0; i < horizon_steps; ++i) {
    hyp.waypoints[0].push_back(now.Position2() +
                               now.Velocity() * ((i + 1) * step_period));
  }
  set.hypotheses.push_back(std::move(hyp));
  return set;
}

JointPredictionSet JointFromMarginal(
    std::span<const JointPredictionSet> marginals, std::size_t k) {
  if (marginals.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "joint conversion needs at least two marginal sets");
  }
  if (k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  }
  double tuples = 1.0;
  for (const JointPredictionSet& marginal : marginals) {
    if (marginal.hypotheses.empty()) {
      throw Error(ErrorCode::kEmptyMarginalSet,
                  marginal.scenario_id + ": marginal set has no hypotheses");
    }
    if (marginal.NumAgents() != 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "marginal sets must cover exactly one agent");
    }
    if (marginal.scenario_id != marginals.front().scenario_id) {
      throw Error(ErrorCode::kInvalidArgument,
                  "marginal sets span different scenarios");
    }
    if (marginal.NumSteps() != marginals.front().NumSteps()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "marginal sets have mismatched horizons");
    }
    tuples *= static_cast<double>(marginal.hypotheses.size());
  }
  if (tuples > 1e6) {
    throw Error(ErrorCode::kInvalidArgument,
                "cross product exceeds 1e6 hypothesis tuples");
  }

  const std::size_t num_agents = marginals.size();
  const std::size_t total = static_cast<std::size_t>(tuples);
  // Tuples in lexicographic index order; a stable sort then breaks score
  // ties toward smaller tuples.
  std::vector<std::vector<std::size_t>> index_tuples;
  index_tuples.reserve(total);
  std::vector<std::size_t> odometer(num_agents, 0);
  for (std::size_t n = 0; n < total; ++n) {
    index_tuples.push_back(odometer);
    for (std::size_t i = num_agents; i-- > 0;) {
      if (++odometer[i] < marginals[i].hypotheses.size()) break;
      odometer[i] = 0;
    }
  }
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  auto score = [&](const std::vector<std::size_t>& tuple) {
    double product = 1.0;
    for (std::size_t a = 0; a < num_agents; ++a) {
      product *= marginals[a].hypotheses[tuple[a]].confidence;
    }
    return product;
  };
  std::vector<double> scores;
  scores.reserve(total);
  for (const auto& tuple : index_tuples) scores.push_back(score(tuple));
  std::stable_sort(order.begin(), order.end(),
                   [&scores](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });

  JointPredictionSet joint;
  joint.scenario_id = marginals.front().scenario_id;
  for (const JointPredictionSet& marginal : marginals) {
    joint.agent_ids.push_back(marginal.agent_ids.front());
  }
  const std::size_t keep = std::min(k, total);
  for (std::size_t n = 0; n < keep; ++n) {
    const std::vector<std::size_t>& tuple = index_tuples[order[n]];
    Hypothesis hyp;
    hyp.confidence = scores[order[n]];
    hyp.waypoints.reserve(num_agents);
    for (std::size_t a = 0; a < num_agents; ++a) {
      hyp.waypoints.push_back(marginals[a].hypotheses[tuple[a]].waypoints[0]);
    }
    joint.hypotheses.push_back(std::move(hyp));
  }
  return joint;
}

const char* ScenarioTemplateName(ScenarioTemplate t) {
  switch (t) {
    case ScenarioTemplate::kStraightCv:
      return "straight_cv";
    case ScenarioTemplate::kTurning:
      return "turning";
    case ScenarioTemplate::kCrossingPair:
      return "crossing_pair";
    case ScenarioTemplate::kYieldPedestrian:
      return "yield_pedestrian";
    case ScenarioTemplate::kBraking:
      return "braking";
  }
  return "unknown";
}

std::optional<ScenarioTemplate> ParseScenarioTemplate(std::string_view name) {
  if (name == "straight_cv") return ScenarioTemplate::kStraightCv;
  if (name == "turning") return ScenarioTemplate::kTurning;
  if (name == "crossing_pair") return ScenarioTemplate::kCrossingPair;
  if (name == "yield_pedestrian") return ScenarioTemplate::kYieldPedestrian;
  if (name == "braking") return ScenarioTemplate::kBraking;
  return std::nullopt;
}

namespace {

constexpr int kSteps = 91;
constexpr int kCurrentIndex = 10;
constexpr double kPeriod = 0.1;

ObjectState State(Vec2 position, double heading, Vec2 velocity,
                  double length = 4.8, double width = 2.1,
                  double height = 1.7) {
  ObjectState s;
  s.x = position.x;
  s.y = position.y;
  s.z = 0.0;
  s.heading = NormalizeAngle(heading);
  s.vx = velocity.x;
  s.vy = velocity.y;
  s.length = length;
  s.width = width;
  s.height = height;
  s.valid = true;
  return s;
}

// Constant-velocity track along +x at ordinate y.
Track CvTrack(const std::string& id, double x0, double y, double speed,
              ObjectType type = ObjectType::kVehicle, double length = 4.8,
              double width = 2.1) {
  Track track;
  track.id = id;
  track.type = type;
  for (int t = 0; t < kSteps; ++t) {
    track.states.push_back(State({x0 + speed * (kPeriod * t), y}, 0.0,
                                 {speed, 0.0}, length, width));
  }
  return track;
}

// Lane centers sampled at the canonical 0.5 m so validation accepts them.
MapFeature LaneAlongX(const std::string& id, double y, double x0, double x1) {
  MapFeature lane;
  lane.id = id;
  lane.kind = FeatureKind::kLaneCenter;
  const int count = static_cast<int>(std::lround((x1 - x0) / 0.5)) + 1;
  for (int i = 0; i < count; ++i) lane.polyline.push_back({x0 + 0.5 * i, y, 0});
  return lane;
}

MapFeature LaneAlongY(const std::string& id, double x, double y0, double y1) {
  MapFeature lane;
  lane.id = id;
  lane.kind = FeatureKind::kLaneCenter;
  const int count = static_cast<int>(std::lround((y1 - y0) / 0.5)) + 1;
  for (int i = 0; i < count; ++i) lane.polyline.push_back({x, y0 + 0.5 * i, 0});
  return lane;
}

std::string CaptureDate(std::uint64_t seed) {
  const int month = static_cast<int>(1 + seed % 12);
  const int day = static_cast<int>(1 + (seed / 12) % 28);
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "2019-%02d-%02d", month, day);
  return buffer;
}

Track EgoTrack(SplitMix64& rng, double y = -7.0) {
  return CvTrack("ego", rng.NextUniform(-30.0, -10.0), y,
                 rng.NextUniform(5.0, 10.0));
}

Scenario StraightCvScene(std::uint64_t seed, SplitMix64& rng) {
  Scenario s;
  s.scenario_id = std::string("straight_cv_") + std::to_string(seed);
  s.tracks.push_back(EgoTrack(rng));
  for (int lane = 0; lane < 3; ++lane) {
    s.tracks.push_back(CvTrack("veh_" + std::to_string(lane),
                               rng.NextUniform(-20.0, 0.0), 3.5 * lane,
                               rng.NextUniform(5.0, 12.0)));
  }
  for (int lane = 0; lane < 3; ++lane) {
    s.map_features.push_back(LaneAlongX("lane_" + std::to_string(lane),
                                        3.5 * lane, -40, 120));
  }
  s.map_features.push_back(LaneAlongX("lane_ego", -7.0, -40, 120));
  return s;
}

// Quarter-circle left turn entered at the prediction step.
Track TurningTrack(const std::string& id, double radius) {
  const double speed = kPi * radius / 16.0;  // quarter arc over 8 s
  Track track;
  track.id = id;
  track.type = ObjectType::kVehicle;
  for (int t = 0; t < kSteps; ++t) {
    if (t <= kCurrentIndex) {
      const double x = speed * kPeriod * (t - kCurrentIndex);
      track.states.push_back(State({x, 0.0}, 0.0, {speed, 0.0}));
    } else {
      const double phi =
          (kPi / 2) * std::min(1.0, (t - kCurrentIndex) * kPeriod / 8.0);
      track.states.push_back(State(
          {radius * std::sin(phi), radius * (1.0 - std::cos(phi))}, phi,
          {speed * std::cos(phi), speed * std::sin(phi)}));
    }
  }
  return track;
}

Scenario TurningScene(std::uint64_t seed, SplitMix64& rng) {
  Scenario s;
  s.scenario_id = std::string("turning_") + std::to_string(seed);
  s.tracks.push_back(EgoTrack(rng));
  s.tracks.push_back(TurningTrack("turner", rng.NextUniform(8.0, 12.0)));
  s.tracks.push_back(
      CvTrack("cruiser", rng.NextUniform(-15.0, 5.0), 7.0,
              rng.NextUniform(5.0, 12.0)));
  s.map_features.push_back(LaneAlongX("lane_in", 0.0, -30, 0));
  s.map_features.push_back(LaneAlongY("lane_out", 12.0, 0, 40));
  s.map_features.push_back(LaneAlongX("lane_through", 7.0, -40, 120));
  s.map_features.push_back(LaneAlongX("lane_ego", -7.0, -40, 120));
  return s;
}

// Through vehicle east over the origin at t=4 s; second vehicle north over
// the origin at t=6 s, turning west (a left turn) well after the crossing.
Scenario CrossingPairScene(std::uint64_t seed, SplitMix64& rng) {
  Scenario s;
  s.scenario_id = std::string("crossing_pair_") + std::to_string(seed);
  s.tracks.push_back(EgoTrack(rng, -10.5));
  const double speed_a = rng.NextUniform(5.0, 12.0);
  const double speed_b = rng.NextUniform(5.0, 12.0);
  s.tracks.push_back(CvTrack("agent_a", -4.0 * speed_a, 0.0, speed_a));

  Track b;
  b.id = "agent_b";
  b.type = ObjectType::kVehicle;
  constexpr int kTurnStep = 75;
  const double turn_y = speed_b * kPeriod * (kTurnStep - 60);
  for (int t = 0; t < kSteps; ++t) {
    if (t <= kTurnStep) {
      b.states.push_back(State({0.0, speed_b * kPeriod * (t - 60)}, kPi / 2,
                               {0.0, speed_b}));
    } else {
      b.states.push_back(State({-speed_b * kPeriod * (t - kTurnStep), turn_y},
                               kPi, {-speed_b, 0.0}));
    }
  }
  s.tracks.push_back(std::move(b));

  s.map_features.push_back(LaneAlongX("lane_ew", 0.0, -60, 80));
  s.map_features.push_back(LaneAlongY("lane_ns", 0.0, -80, 20));
  s.map_features.push_back(LaneAlongX("lane_ego", -10.5, -60, 80));
  s.interactive_pair =
      InteractivePair{"agent_b", "agent_a",
                      InteractionKind::kIntersectionLeftTurn};
  return s;
}

// Decelerating track along +x that brakes from `speed` at `brake_step` with
// constant `decel` until it stops.
Track BrakingTrack(const std::string& id, double x0, double y, double speed,
                   int brake_step, double decel) {
  Track track;
  track.id = id;
  track.type = ObjectType::kVehicle;
  double x = x0;
  double v = speed;
  for (int t = 0; t < kSteps; ++t) {
    if (t > 0) {
      if (t > brake_step) v = std::max(0.0, v - decel * kPeriod);
      x += v * kPeriod;
    }
    track.states.push_back(State({x, y}, 0.0, {v, 0.0}));
  }
  return track;
}

Scenario YieldPedestrianScene(std::uint64_t seed, SplitMix64& rng) {
  Scenario s;
  s.scenario_id = std::string("yield_pedestrian_") + std::to_string(seed);
  s.tracks.push_back(EgoTrack(rng));
  const double speed = rng.NextUniform(5.0, 9.0);
  // Brake at 3 m/s^2 from the prediction step so the nose stops short of
  // the crossing at x=14.
  const double stop_x = 10.0;
  const double x0 = stop_x - speed - speed * speed / 6.0;
  s.tracks.push_back(
      BrakingTrack("vehicle", x0, 0.0, speed, kCurrentIndex, 3.0));

  Track ped;
  ped.id = "walker";
  ped.type = ObjectType::kPedestrian;
  for (int t = 0; t < kSteps; ++t) {
    ped.states.push_back(State({14.0, -6.0 + 1.2 * kPeriod * t}, kPi / 2,
                               {0.0, 1.2}, 0.8, 0.8, 1.8));
  }
  s.tracks.push_back(std::move(ped));

  s.map_features.push_back(LaneAlongX("lane_main", 0.0, -40, 60));
  s.map_features.push_back(LaneAlongX("lane_ego", -7.0, -40, 60));
  MapFeature crosswalk;
  crosswalk.id = "crosswalk";
  crosswalk.kind = FeatureKind::kCrosswalk;
  crosswalk.polyline = {{14, -4, 0}, {14, 4, 0}};
  s.map_features.push_back(std::move(crosswalk));
  s.interactive_pair = InteractivePair{"vehicle", "walker",
                                       InteractionKind::kPedestrianVehicle};
  return s;
}

Scenario BrakingScene(std::uint64_t seed, SplitMix64& rng) {
  Scenario s;
  s.scenario_id = std::string("braking_") + std::to_string(seed);
  s.tracks.push_back(EgoTrack(rng));
  // Capped so the follower always stops with clearance behind the lead.
  const double speed = rng.NextUniform(8.0, 11.0);
  // Lead brakes hard at t=3.1 s; the follower reacts 1.5 s later.
  s.tracks.push_back(BrakingTrack("lead", 0.0, 0.0, speed, 31, 5.0));
  s.tracks.push_back(
      BrakingTrack("follower", -8.7, 0.0, speed - 2.0, 46, 5.0));
  s.map_features.push_back(LaneAlongX("lane_main", 0.0, -40, 120));
  s.map_features.push_back(LaneAlongX("lane_ego", -7.0, -40, 120));
  s.interactive_pair =
      InteractivePair{"lead", "follower", InteractionKind::kHighAcceleration};
  return s;
}

}  // namespace

Scenario GenerateSyntheticScenario(std::uint64_t seed, ScenarioTemplate t) {
  SplitMix64 rng(seed ^ Fnv1a64(ScenarioTemplateName(t)));
  Scenario s;
  switch (t) {
    case ScenarioTemplate::kStraightCv:
      s = StraightCvScene(seed, rng);
      break;
    case ScenarioTemplate::kTurning:
      s = TurningScene(seed, rng);
      break;
    case ScenarioTemplate::kCrossingPair:
      s = CrossingPairScene(seed, rng);
      break;
    case ScenarioTemplate::kYieldPedestrian:
      s = YieldPedestrianScene(seed, rng);
      break;
    case ScenarioTemplate::kBraking:
      s = BrakingScene(seed, rng);
      break;
  }
  s.capture_date = CaptureDate(seed);
  s.vehicle_id = "ego";
  s.current_index = kCurrentIndex;
  s.predict_list = SelectPredictObjects(s);
  return s;
}

}  // namespace trajeval
