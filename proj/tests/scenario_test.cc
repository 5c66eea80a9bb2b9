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

#include "trajeval/scenario.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "trajeval/error.h"
#include "trajeval/prng.h"
#include "test_util.h"

namespace trajeval {
namespace {

using json = nlohmann::ordered_json;

Track MakeCvTrack(const std::string& id, ObjectType type, Vec2 start,
                  Vec2 velocity, int steps) {
  Track track;
  track.id = id;
  track.type = type;
  track.states.reserve(steps);
  for (int t = 0; t < steps; ++t) {
    ObjectState state;
    state.x = start.x + velocity.x * 0.1 * t;
    state.y = start.y + velocity.y * 0.1 * t;
    state.z = 0.0;
    state.heading = std::atan2(velocity.y, velocity.x);
    state.vx = velocity.x;
    state.vy = velocity.y;
    state.length = 4.5;
    state.width = 2.0;
    state.height = 1.6;
    state.valid = true;
    track.states.push_back(state);
  }
  return track;
}

Scenario MakeTestScenario() {
  Scenario s;
  s.scenario_id = "scene_1";
  s.capture_date = "2019-03-04";
  s.vehicle_id = "av_17";
  s.current_index = 10;
  s.tracks.push_back(
      MakeCvTrack("av_17", ObjectType::kVehicle, {0, 0}, {5, 0}, 91));
  s.tracks.push_back(
      MakeCvTrack("veh_1", ObjectType::kVehicle, {10, 3.5}, {4, 0}, 91));
  s.tracks.push_back(
      MakeCvTrack("ped_1", ObjectType::kPedestrian, {20, -2}, {0, 1.2}, 91));

  MapFeature lane;
  lane.id = "lane_1";
  lane.kind = FeatureKind::kLaneCenter;
  for (int i = 0; i <= 200; ++i) {
    lane.polyline.push_back({-10.0 + 0.5 * i, 0.0, 0.0});
  }
  lane.attributes["speed_limit_mps"] = "15";
  s.map_features.push_back(lane);

  MapFeature sign;
  sign.id = "sign_1";
  sign.kind = FeatureKind::kStopSign;
  sign.polyline.push_back({30.0, 4.0, 0.0});
  s.map_features.push_back(sign);

  TrafficSignalFrame frame;
  frame.timestep = 10;
  frame.states["lane_1"] = SignalState::kGo;
  s.signal_frames.push_back(frame);

  s.predict_list.push_back({"veh_1", Difficulty::kEasy});
  s.predict_list.push_back({"ped_1", Difficulty::kMedium});
  s.interactive_pair = InteractivePair{
      "veh_1", "ped_1", InteractionKind::kPedestrianVehicle};
  return s;
}

JointPredictionSet MakeTestPrediction() {
  JointPredictionSet p;
  p.scenario_id = "scene_1";
  p.agent_ids = {"veh_1"};
  Hypothesis h1;
  h1.confidence = 0.75;
  h1.waypoints = {{{11.0, 3.5}, {11.5, 3.5}, {12.0, 3.5}}};
  Hypothesis h2;
  h2.confidence = 0.25;
  h2.waypoints = {{{11.0, 3.6}, {11.4, 3.7}, {11.9, 3.8}}};
  p.hypotheses = {h1, h2};
  return p;
}

TEST(ParseScenarioTest, MinimalRecord) {
  json state = {{"x", 0.0},      {"y", 0.0},     {"z", 0.0},
                {"heading", 0.0}, {"vx", 1.0},    {"vy", 0.0},
                {"length", 4.0},  {"width", 2.0}, {"height", 1.5},
                {"valid", true}};
  json states = json::array();
  for (int t = 0; t < 91; ++t) {
    json step = state;
    step["x"] = 0.1 * t;
    states.push_back(step);
  }
  const json record = {
      {"scenario_id", "minimal"},
      {"capture_date", "2019-01-01"},
      {"vehicle_id", "av_0"},
      {"current_index", 10},
      {"tracks", json::array({{{"id", "veh_0"},
                               {"type", "vehicle"},
                               {"states", states}}})},
      {"map_features", json::array()},
      {"signal_frames", json::array()},
      {"predict_list", json::array()},
  };
  const Scenario s = ParseScenario(record.dump());
  EXPECT_EQ(s.scenario_id, "minimal");
  ASSERT_EQ(s.tracks.size(), 1u);
  EXPECT_EQ(s.tracks[0].states.size(), 91u);
  EXPECT_EQ(s.current_index, 10);
  EXPECT_FALSE(s.interactive_pair.has_value());
}

TEST(ParseScenarioTest, UnequalTrackLengthsRejected) {
  Scenario s = MakeTestScenario();
  s.tracks[1].states.pop_back();
  try {
    ParseScenario(SerializeScenario(s));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvariantViolation);
    EXPECT_NE(std::string(e.what()).find("tracks[1]"), std::string::npos);
  }
}

TEST(SerializeScenarioTest, DeterministicBytes) {
  const Scenario s = MakeTestScenario();
  EXPECT_EQ(SerializeScenario(s), SerializeScenario(s));
}

TEST(SerializeScenarioTest, RoundTripPreservesScenario) {
  const Scenario s = MakeTestScenario();
  const std::string text = SerializeScenario(s);
  const Scenario parsed = ParseScenario(text);
  EXPECT_EQ(SerializeScenario(parsed), text);
}

TEST(SerializeScenarioTest, CoordinateFlipChangesExactlyThatField) {
  const Scenario s = MakeTestScenario();
  Scenario altered = s;
  altered.tracks[0].states[5].x += 0.25;
  const json a = json::parse(SerializeScenario(s));
  const json b = json::parse(SerializeScenario(altered));
  const json diff = json::diff(a, b);
  ASSERT_EQ(diff.size(), 1u);
  EXPECT_EQ(diff[0]["path"], "/tracks/0/states/5/x");
}

TEST(SerializeScenarioTest, NanPositionRejected) {
  Scenario s = MakeTestScenario();
  s.tracks[0].states[3].x = std::nan("");
  try {
    SerializeScenario(s);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvariantViolation);
    EXPECT_NE(std::string(e.what()).find("states[3]"), std::string::npos);
  }
}

TEST(ParseScenarioTest, MalformedSyntaxReported) {
  try {
    ParseScenario("{not json");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedSyntax);
  }
}

TEST(ParseScenarioTest, MissingFieldNamesPath) {
  json record = json::parse(SerializeScenario(MakeTestScenario()));
  record.erase("capture_date");
  try {
    ParseScenario(record.dump());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaViolation);
    EXPECT_NE(std::string(e.what()).find("capture_date"), std::string::npos);
  }
}

TEST(ParseScenarioTest, SchemaAndInvariantMutationsAllRejected) {
  const std::string canonical = SerializeScenario(MakeTestScenario());

  const std::vector<std::pair<std::string, json>> patches = {
      {"/tracks/0/states/0/valid", json("yes")},
      {"/tracks/0/states/0/length", json(-1.0)},
      {"/tracks/0/states/0/heading", json(7.0)},
      {"/tracks/0/type", json("train")},
      {"/tracks/1/id", json("av_17")},
      {"/current_index", json(91)},
      {"/current_index", json(-1)},
      {"/predict_list/0/id", json("ghost")},
      {"/predict_list/0/difficulty", json("impossible")},
      {"/map_features/0/kind", json("runway")},
      {"/map_features/0/polyline/3", json::array({5.0, 0.0})},
      {"/signal_frames/0/timestep", json(400)},
      {"/interactive_pair/second", json("veh_1")},
      {"/interactive_pair/kind", json("tailgating")},
  };
  for (const auto& [pointer, value] : patches) {
    json record = json::parse(canonical);
    record[json::json_pointer(pointer)] = value;
    EXPECT_THROW(ParseScenario(record.dump()), Error)
        << "patch " << pointer << " = " << value.dump();
  }

  {
    json record = json::parse(canonical);
    json frame = {{"timestep", 0}, {"states", {{"ghost_lane", "go"}}}};
    record["signal_frames"].push_back(frame);
    EXPECT_THROW(ParseScenario(record.dump()), Error);
  }
  {
    json record = json::parse(canonical);
    json dense = json::array();
    dense.push_back(json::array({0.0, 0.0, 0.0}));
    dense.push_back(json::array({5.0, 0.0, 0.0}));
    record["map_features"][0]["polyline"] = dense;
    EXPECT_THROW(ParseScenario(record.dump()), Error);
  }
}

TEST(ParseScenarioTest, AcceptedMutationsStayValid) {
  const std::string canonical = SerializeScenario(MakeTestScenario());
  SplitMix64 rng(41);
  int accepted = 0;
  for (int trial = 0; trial < 300; ++trial) {
    json record = json::parse(canonical);
    const int kind = static_cast<int>(rng.NextBelow(4));
    const int track = static_cast<int>(rng.NextBelow(3));
    const int step = static_cast<int>(rng.NextBelow(91));
    auto& state = record["tracks"][track]["states"][step];
    switch (kind) {
      case 0:
        state["x"] = rng.NextUniform(-1000, 1000);
        break;
      case 1:
        state["heading"] = rng.NextUniform(-10, 10);
        break;
      case 2:
        state["valid"] = false;
        break;
      default:
        state["length"] = rng.NextUniform(-2, 6);
        break;
    }
    try {
      const Scenario parsed = ParseScenario(record.dump());
      ValidateScenario(parsed);
      ++accepted;
    } catch (const Error&) {
    }
  }
  EXPECT_GT(accepted, 0);
}

TEST(ParseScenarioTest, UnknownSignalStateMapsToUnknown) {
  json record = json::parse(SerializeScenario(MakeTestScenario()));
  record["signal_frames"][0]["states"]["lane_1"] = "purple";
  const Scenario s = ParseScenario(record.dump());
  EXPECT_EQ(s.signal_frames[0].states.at("lane_1"), SignalState::kUnknown);
}

TEST(ExtractGroundTruthTest, IdentityRotation) {
  const Scenario s = MakeTestScenario();
  const std::vector<std::string> ids = {"veh_1"};
  const GroundTruthSlice slice = ExtractGroundTruth(s, ids, 80);
  ASSERT_EQ(slice.agents.size(), 1u);
  const AgentGroundTruth& agent = slice.agents[0];
  EXPECT_EQ(agent.positions.size(), 80u);
  EXPECT_NEAR(agent.frame_velocity.x, 4.0, 1e-12);
  EXPECT_NEAR(agent.frame_velocity.y, 0.0, 1e-12);
  EXPECT_NEAR(agent.reference.position.x, 10.0 + 4.0 * 0.1 * 10, 1e-12);
}

TEST(ExtractGroundTruthTest, QuarterTurnRotation) {
  Scenario s = MakeTestScenario();
  Track track = MakeCvTrack("veh_q", ObjectType::kVehicle, {0, 0}, {3, 0}, 91);
  for (ObjectState& state : track.states) {
    state.heading = kPi / 2;
  }
  s.tracks.push_back(track);
  const std::vector<std::string> ids = {"veh_q"};
  const GroundTruthSlice slice = ExtractGroundTruth(s, ids, 10);
  EXPECT_NEAR(slice.agents[0].frame_velocity.x, 0.0, 1e-12);
  EXPECT_NEAR(slice.agents[0].frame_velocity.y, -3.0, 1e-12);
}

TEST(ExtractGroundTruthTest, FrameVelocityInvariantUnderRigidTransform) {
  const Scenario s = MakeTestScenario();
  const Scenario moved = testing::TransformScenario(s, 0.7, {25.0, -12.0});
  const std::vector<std::string> ids = {"veh_1", "ped_1"};
  const GroundTruthSlice base = ExtractGroundTruth(s, ids, 40);
  const GroundTruthSlice transformed = ExtractGroundTruth(moved, ids, 40);
  for (std::size_t a = 0; a < ids.size(); ++a) {
    EXPECT_NEAR(base.agents[a].frame_velocity.x,
                transformed.agents[a].frame_velocity.x, 1e-9);
    EXPECT_NEAR(base.agents[a].frame_velocity.y,
                transformed.agents[a].frame_velocity.y, 1e-9);
  }
}

TEST(ExtractGroundTruthTest, InvalidAtPredictionTimeThrows) {
  Scenario s = MakeTestScenario();
  s.tracks[1].states[10].valid = false;
  const std::vector<std::string> ids = {"veh_1"};
  try {
    ExtractGroundTruth(s, ids, 10);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAgentInvalidAtPredictionTime);
  }
}

TEST(ExtractGroundTruthTest, HorizonPastTrackEndThrows) {
  const Scenario s = MakeTestScenario();
  const std::vector<std::string> ids = {"veh_1"};
  EXPECT_THROW(ExtractGroundTruth(s, ids, 81), Error);
}

TEST(ParsePredictionTest, RoundTrip) {
  const JointPredictionSet p = MakeTestPrediction();
  const std::string text = SerializePrediction(p);
  const JointPredictionSet parsed = ParsePrediction(text);
  EXPECT_EQ(SerializePrediction(parsed), text);
  EXPECT_EQ(parsed.NumAgents(), 1u);
  EXPECT_EQ(parsed.NumSteps(), 3u);
}

TEST(ParsePredictionTest, InvariantsEnforced) {
  const std::string canonical = SerializePrediction(MakeTestPrediction());

  {
    json record = json::parse(canonical);
    record["hypotheses"] = json::array();
    EXPECT_THROW(ParsePrediction(record.dump()), Error);
  }
  {
    json record = json::parse(canonical);
    record["hypotheses"][1]["waypoints"][0].erase(2);
    EXPECT_THROW(ParsePrediction(record.dump()), Error);
  }
  {
    json record = json::parse(canonical);
    record["hypotheses"][0]["confidence"] = -0.5;
    EXPECT_THROW(ParsePrediction(record.dump()), Error);
  }
  {
    json record = json::parse(canonical);
    record["agent_ids"] = json::array({"veh_1", "veh_1"});
    record["hypotheses"][0]["waypoints"].push_back(
        record["hypotheses"][0]["waypoints"][0]);
    record["hypotheses"][1]["waypoints"].push_back(
        record["hypotheses"][1]["waypoints"][0]);
    EXPECT_THROW(ParsePrediction(record.dump()), Error);
  }
}

TEST(ScenarioFileTest, WriteReadRoundTripAndLineNumbers) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "trajeval_scenario_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "scenarios.jsonl").string();

  const std::vector<Scenario> scenarios = {MakeTestScenario()};
  WriteScenarioFile(path, scenarios);
  const std::vector<Scenario> loaded = ReadScenarioFile(path);
  ASSERT_EQ(loaded.size(), 1u);
  EXPECT_EQ(SerializeScenario(loaded[0]), SerializeScenario(scenarios[0]));

  {
    std::FILE* f = std::fopen(path.c_str(), "a");
    ASSERT_NE(f, nullptr);
    std::fputs("\n{broken\n", f);
    std::fclose(f);
  }
  try {
    ReadScenarioFile(path);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedSyntax);
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
  }

  EXPECT_THROW(ReadScenarioFile((dir / "missing.jsonl").string()), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace trajeval
