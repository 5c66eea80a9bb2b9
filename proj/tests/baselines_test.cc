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
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "trajeval/error.h"
#include "trajeval/geometry.h"
#include "trajeval/metrics.h"
#include "trajeval/mining.h"
#include "trajeval/pipeline.h"
#include "trajeval/prng.h"
#include "trajeval/scenario.h"

namespace trajeval {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kIoError;
}

Track MovingTrack(std::string id, int steps, Vec2 origin, Vec2 velocity) {
  Track track;
  track.id = std::move(id);
  track.states.resize(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    ObjectState& s = track.states[static_cast<std::size_t>(t)];
    s.x = origin.x + velocity.x * 0.1 * t;
    s.y = origin.y + velocity.y * 0.1 * t;
    s.vx = velocity.x;
    s.vy = velocity.y;
    s.length = 4.5;
    s.width = 2.0;
    s.height = 1.6;
    s.valid = true;
  }
  return track;
}

TEST(ConstantVelocityPredictTest, ExtrapolatesFromCurrentState) {
  const Track track = MovingTrack("agent", 91, {0.0, 0.0}, {2.0, 1.0});
  const JointPredictionSet set =
      ConstantVelocityPredict(track, 0, 10, "scene");
  EXPECT_EQ(set.scenario_id, "scene");
  ASSERT_EQ(set.agent_ids.size(), 1u);
  EXPECT_EQ(set.agent_ids[0], "agent");
  ASSERT_EQ(set.hypotheses.size(), 1u);
  EXPECT_DOUBLE_EQ(set.hypotheses[0].confidence, 1.0);
  ASSERT_EQ(set.hypotheses[0].waypoints.size(), 1u);
  const std::vector<Vec2>& points = set.hypotheses[0].waypoints[0];
  ASSERT_EQ(points.size(), 10u);
  // Waypoint 4 sits 5 steps (0.5 s) past the prediction time.
  EXPECT_DOUBLE_EQ(points[4].x, 1.0);
  EXPECT_DOUBLE_EQ(points[4].y, 0.5);
}

TEST(ConstantVelocityPredictTest, ZeroVelocityStaysPut) {
  const Track track = MovingTrack("parked", 91, {3.0, -2.0}, {0.0, 0.0});
  const JointPredictionSet set = ConstantVelocityPredict(track, 10, 80);
  for (const Vec2& p : set.hypotheses[0].waypoints[0]) {
    EXPECT_DOUBLE_EQ(p.x, 3.0);
    EXPECT_DOUBLE_EQ(p.y, -2.0);
  }
}

TEST(ConstantVelocityPredictTest, MatchesConstantVelocityGroundTruth) {
  const Track track = MovingTrack("cv", 91, {4.0, -1.0}, {6.0, 2.5});
  const JointPredictionSet set = ConstantVelocityPredict(track, 10, 80);
  const std::vector<Vec2>& points = set.hypotheses[0].waypoints[0];
  ASSERT_EQ(points.size(), 80u);
  for (int i = 0; i < 80; ++i) {
    const ObjectState& truth = track.states[static_cast<std::size_t>(11 + i)];
    EXPECT_NEAR(points[static_cast<std::size_t>(i)].x, truth.x, 1e-9);
    EXPECT_NEAR(points[static_cast<std::size_t>(i)].y, truth.y, 1e-9);
  }
}

TEST(ConstantVelocityPredictTest, InvalidCurrentStateThrows) {
  Track track = MovingTrack("gap", 91, {0.0, 0.0}, {1.0, 0.0});
  track.states[10].valid = false;
  EXPECT_EQ(CodeOf([&] { ConstantVelocityPredict(track, 10, 80); }),
            ErrorCode::kAgentInvalidAtPredictionTime);
  EXPECT_EQ(CodeOf([&] { ConstantVelocityPredict(track, 91, 10); }),
            ErrorCode::kAgentInvalidAtPredictionTime);
}

// Marginal set for one agent with one-step waypoints at distinct markers so
// tests can identify which hypothesis a joint tuple selected.
JointPredictionSet Marginal(const std::string& agent_id, double marker,
                            const std::vector<double>& confidences,
                            const std::string& scenario_id = "scene") {
  JointPredictionSet set;
  set.scenario_id = scenario_id;
  set.agent_ids = {agent_id};
  for (std::size_t k = 0; k < confidences.size(); ++k) {
    Hypothesis hyp;
    hyp.confidence = confidences[k];
    hyp.waypoints = {{Vec2{marker + static_cast<double>(k), 0.0}}};
    set.hypotheses.push_back(std::move(hyp));
  }
  return set;
}

TEST(JointFromMarginalTest, ProductRuleOrdersTuples) {
  const std::vector<JointPredictionSet> marginals = {
      Marginal("a", 0.0, {0.6, 0.4}), Marginal("b", 100.0, {0.7, 0.3})};
  const JointPredictionSet joint = JointFromMarginal(marginals, 2);
  EXPECT_EQ(joint.scenario_id, "scene");
  ASSERT_EQ(joint.agent_ids.size(), 2u);
  EXPECT_EQ(joint.agent_ids[0], "a");
  EXPECT_EQ(joint.agent_ids[1], "b");
  ASSERT_EQ(joint.hypotheses.size(), 2u);
  // Products: (0,0)=0.42, (0,1)=0.18, (1,0)=0.28, (1,1)=0.12.
  EXPECT_DOUBLE_EQ(joint.hypotheses[0].confidence, 0.6 * 0.7);
  EXPECT_DOUBLE_EQ(joint.hypotheses[1].confidence, 0.4 * 0.7);
  EXPECT_DOUBLE_EQ(joint.hypotheses[0].waypoints[0][0].x, 0.0);
  EXPECT_DOUBLE_EQ(joint.hypotheses[0].waypoints[1][0].x, 100.0);
  EXPECT_DOUBLE_EQ(joint.hypotheses[1].waypoints[0][0].x, 1.0);
  EXPECT_DOUBLE_EQ(joint.hypotheses[1].waypoints[1][0].x, 100.0);
}

TEST(JointFromMarginalTest, TiesBreakTowardSmallerTuples) {
  const std::vector<JointPredictionSet> marginals = {
      Marginal("a", 0.0, {0.5, 0.5}), Marginal("b", 100.0, {0.5, 0.5})};
  const JointPredictionSet joint = JointFromMarginal(marginals, 4);
  ASSERT_EQ(joint.hypotheses.size(), 4u);
  const std::vector<std::pair<double, double>> expected = {
      {0.0, 100.0}, {0.0, 101.0}, {1.0, 100.0}, {1.0, 101.0}};
  for (std::size_t n = 0; n < expected.size(); ++n) {
    EXPECT_DOUBLE_EQ(joint.hypotheses[n].waypoints[0][0].x, expected[n].first);
    EXPECT_DOUBLE_EQ(joint.hypotheses[n].waypoints[1][0].x,
                     expected[n].second);
  }
}

TEST(JointFromMarginalTest, KeepsAtMostTheCrossProduct) {
  const std::vector<JointPredictionSet> marginals = {
      Marginal("a", 0.0, {0.9}), Marginal("b", 100.0, {0.8})};
  const JointPredictionSet joint = JointFromMarginal(marginals, 6);
  ASSERT_EQ(joint.hypotheses.size(), 1u);
  EXPECT_DOUBLE_EQ(joint.hypotheses[0].confidence, 0.9 * 0.8);
}

TEST(JointFromMarginalTest, MatchesBruteForceTopK) {
  SplitMix64 rng(0x9a3f5e1d);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t members = 2 + rng.NextBelow(2);
    std::vector<JointPredictionSet> marginals;
    std::vector<std::size_t> sizes;
    for (std::size_t m = 0; m < members; ++m) {
      const std::size_t hyps = 1 + rng.NextBelow(3);
      sizes.push_back(hyps);
      std::vector<double> confidences;
      for (std::size_t k = 0; k < hyps; ++k) {
        confidences.push_back(rng.NextUniform());
      }
      marginals.push_back(Marginal("agent_" + std::to_string(m),
                                   100.0 * static_cast<double>(m),
                                   confidences));
    }

    // Every tuple in lexicographic order with its product score.
    struct Entry {
      double score;
      std::vector<std::size_t> tuple;
    };
    std::vector<Entry> all;
    std::vector<std::size_t> tuple(members, 0);
    bool done = false;
    while (!done) {
      double product = 1.0;
      for (std::size_t m = 0; m < members; ++m) {
        product *= marginals[m].hypotheses[tuple[m]].confidence;
      }
      all.push_back({product, tuple});
      done = true;
      for (std::size_t m = members; m-- > 0;) {
        if (++tuple[m] < sizes[m]) {
          done = false;
          break;
        }
        tuple[m] = 0;
      }
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const Entry& a, const Entry& b) {
                       return a.score > b.score;
                     });

    const std::size_t k = 1 + rng.NextBelow(all.size());
    const JointPredictionSet joint = JointFromMarginal(marginals, k);
    ASSERT_EQ(joint.hypotheses.size(), std::min(k, all.size()));
    for (std::size_t n = 0; n < joint.hypotheses.size(); ++n) {
      EXPECT_DOUBLE_EQ(joint.hypotheses[n].confidence, all[n].score);
      for (std::size_t m = 0; m < members; ++m) {
        EXPECT_DOUBLE_EQ(
            joint.hypotheses[n].waypoints[m][0].x,
            100.0 * static_cast<double>(m) +
                static_cast<double>(all[n].tuple[m]));
      }
      if (n > 0) {
        EXPECT_GE(joint.hypotheses[n - 1].confidence,
                  joint.hypotheses[n].confidence);
      }
    }
  }
}

TEST(JointFromMarginalTest, RejectsBadInputs) {
  const std::vector<JointPredictionSet> one = {Marginal("a", 0.0, {1.0})};
  EXPECT_EQ(CodeOf([&] { JointFromMarginal(one, 1); }),
            ErrorCode::kInvalidArgument);

  const std::vector<JointPredictionSet> two = {
      Marginal("a", 0.0, {0.6, 0.4}), Marginal("b", 100.0, {0.7, 0.3})};
  EXPECT_EQ(CodeOf([&] { JointFromMarginal(two, 0); }),
            ErrorCode::kInvalidArgument);

  std::vector<JointPredictionSet> hollow = two;
  hollow[1].hypotheses.clear();
  EXPECT_EQ(CodeOf([&] { JointFromMarginal(hollow, 1); }),
            ErrorCode::kEmptyMarginalSet);

  std::vector<JointPredictionSet> mismatched = two;
  mismatched[1].scenario_id = "other";
  EXPECT_EQ(CodeOf([&] { JointFromMarginal(mismatched, 1); }),
            ErrorCode::kInvalidArgument);

  std::vector<JointPredictionSet> pair_agent = two;
  pair_agent[0].agent_ids.push_back("extra");
  pair_agent[0].hypotheses[0].waypoints.push_back(
      pair_agent[0].hypotheses[0].waypoints[0]);
  pair_agent[0].hypotheses[1].waypoints.push_back(
      pair_agent[0].hypotheses[1].waypoints[0]);
  EXPECT_EQ(CodeOf([&] { JointFromMarginal(pair_agent, 1); }),
            ErrorCode::kInvalidArgument);

  std::vector<JointPredictionSet> ragged = two;
  ragged[1].hypotheses[0].waypoints[0].push_back(Vec2{0.0, 0.0});
  ragged[1].hypotheses[1].waypoints[0].push_back(Vec2{0.0, 0.0});
  EXPECT_EQ(CodeOf([&] { JointFromMarginal(ragged, 1); }),
            ErrorCode::kInvalidArgument);
}

TEST(ScenarioTemplateTest, NameParseRoundTrip) {
  for (const ScenarioTemplate t :
       {ScenarioTemplate::kStraightCv, ScenarioTemplate::kTurning,
        ScenarioTemplate::kCrossingPair, ScenarioTemplate::kYieldPedestrian,
        ScenarioTemplate::kBraking}) {
    EXPECT_EQ(ParseScenarioTemplate(ScenarioTemplateName(t)), t);
  }
  EXPECT_FALSE(ParseScenarioTemplate("roundabout").has_value());
}

TEST(GenerateSyntheticScenarioTest, ValidatesAndSerializesDeterministically) {
  for (const ScenarioTemplate t :
       {ScenarioTemplate::kStraightCv, ScenarioTemplate::kTurning,
        ScenarioTemplate::kCrossingPair, ScenarioTemplate::kYieldPedestrian,
        ScenarioTemplate::kBraking}) {
    for (const std::uint64_t seed : {1ull, 42ull, 12345ull}) {
      const Scenario scenario = GenerateSyntheticScenario(seed, t);
      EXPECT_NO_THROW(ValidateScenario(scenario));
      EXPECT_EQ(scenario.StepsPerTrack(), 91);
      EXPECT_EQ(scenario.current_index, 10);
      EXPECT_EQ(scenario.vehicle_id, "ego");
      EXPECT_NE(scenario.FindTrack("ego"), nullptr);
      EXPECT_FALSE(scenario.predict_list.empty());
      EXPECT_EQ(scenario.capture_date.size(), 10u);
      EXPECT_EQ(scenario.capture_date.substr(0, 5), "2019-");

      const std::string bytes = SerializeScenario(scenario);
      EXPECT_EQ(bytes, SerializeScenario(GenerateSyntheticScenario(seed, t)));
    }
    EXPECT_NE(SerializeScenario(GenerateSyntheticScenario(1, t)),
              SerializeScenario(GenerateSyntheticScenario(2, t)));
  }
}

TEST(GenerateSyntheticScenarioTest, StraightCvIsExactlyConstantVelocity) {
  const Scenario scenario =
      GenerateSyntheticScenario(7, ScenarioTemplate::kStraightCv);
  for (const Track& track : scenario.tracks) {
    EXPECT_LT(CvEndpointError(track, scenario.current_index), 1e-9)
        << track.id;
  }
  for (const PredictEntry& entry : scenario.predict_list) {
    EXPECT_EQ(entry.difficulty, Difficulty::kEasy);
    const Track* track = scenario.FindTrack(entry.id);
    ASSERT_NE(track, nullptr);
    const JointPredictionSet set =
        ConstantVelocityPredict(*track, scenario.current_index, 80,
                                scenario.scenario_id);
    for (int i = 0; i < 80; ++i) {
      const ObjectState& truth =
          track->states[static_cast<std::size_t>(11 + i)];
      EXPECT_NEAR(set.hypotheses[0].waypoints[0][static_cast<std::size_t>(i)]
                      .x,
                  truth.x, 1e-9);
      EXPECT_NEAR(set.hypotheses[0].waypoints[0][static_cast<std::size_t>(i)]
                      .y,
                  truth.y, 1e-9);
    }
  }
}

TEST(GenerateSyntheticScenarioTest, TurningSceneBendsLeft) {
  const Scenario scenario =
      GenerateSyntheticScenario(3, ScenarioTemplate::kTurning);
  const std::vector<std::string> ids = {"turner"};
  const GroundTruthSlice slice = ExtractGroundTruth(scenario, ids, 80);
  EXPECT_EQ(ClassifyShape(slice.agents[0], 80, MetricsConfig{}),
            ShapeBucket::kLeft);
  // A quarter-circle defeats straight-line extrapolation, so the turner
  // heads the predict list.
  ASSERT_FALSE(scenario.predict_list.empty());
  EXPECT_EQ(scenario.predict_list[0].id, "turner");
  EXPECT_EQ(scenario.predict_list[0].difficulty, Difficulty::kHard);
}

TEST(GenerateSyntheticScenarioTest, CrossingPairHasClosedFormGeometry) {
  for (const std::uint64_t seed : {0ull, 5ull, 11ull, 77ull, 2026ull}) {
    const Scenario scenario =
        GenerateSyntheticScenario(seed, ScenarioTemplate::kCrossingPair);
    const Track* a = scenario.FindTrack("agent_a");
    const Track* b = scenario.FindTrack("agent_b");
    ASSERT_NE(a, nullptr);
    ASSERT_NE(b, nullptr);
    const std::optional<CrossingInfo> info = CrossedPaths(*a, *b);
    ASSERT_TRUE(info.has_value());
    EXPECT_NEAR(info->time_a, 4.0, 1e-9);
    EXPECT_NEAR(info->time_b, 6.0, 1e-9);
    EXPECT_NEAR(info->time_gap, 2.0, 1e-9);
    EXPECT_NEAR(info->heading_diff, kPi / 2, 1e-9);
    EXPECT_NEAR(info->point.x, 0.0, 1e-9);
    EXPECT_NEAR(info->point.y, 0.0, 1e-9);

    ASSERT_TRUE(scenario.interactive_pair.has_value());
    EXPECT_EQ(scenario.interactive_pair->first, "agent_b");
    EXPECT_EQ(scenario.interactive_pair->second, "agent_a");
    EXPECT_EQ(scenario.interactive_pair->kind,
              InteractionKind::kIntersectionLeftTurn);
  }
}

TEST(GenerateSyntheticScenarioTest, CrossingPairMinesAsLeftTurn) {
  const Scenario scenario =
      GenerateSyntheticScenario(4, ScenarioTemplate::kCrossingPair);
  const std::vector<InteractionLabel> labels =
      MineInteractivePairs(scenario, MiningConfig{});
  int left_turns = 0;
  for (const InteractionLabel& label : labels) {
    if (label.kind == InteractionKind::kIntersectionLeftTurn) {
      ++left_turns;
      // The turner leads the pair whichever partner wins.
      EXPECT_EQ(label.first, "agent_b");
    }
  }
  EXPECT_EQ(left_turns, 1);
}

TEST(GenerateSyntheticScenarioTest, YieldingVehicleStopsShortOfCrossing) {
  for (const std::uint64_t seed : {2ull, 9ull, 31ull}) {
    const Scenario scenario =
        GenerateSyntheticScenario(seed, ScenarioTemplate::kYieldPedestrian);
    const Track* vehicle = scenario.FindTrack("vehicle");
    const Track* walker = scenario.FindTrack("walker");
    ASSERT_NE(vehicle, nullptr);
    ASSERT_NE(walker, nullptr);
    EXPECT_EQ(walker->type, ObjectType::kPedestrian);
    // The nose (half the 4.8 m length past center) never reaches x = 14.
    EXPECT_LT(vehicle->states.back().x + 2.4, 14.0);
    EXPECT_NEAR(vehicle->states.back().vx, 0.0, 1e-9);
    // Close enough for a pedestrian-vehicle interaction, never a 3 m pass.
    EXPECT_FALSE(StepsWithin(*vehicle, *walker, 5.0).empty());
    EXPECT_TRUE(StepsWithin(*vehicle, *walker, 3.0).empty());
    ASSERT_TRUE(scenario.interactive_pair.has_value());
    EXPECT_EQ(scenario.interactive_pair->kind,
              InteractionKind::kPedestrianVehicle);
  }
}

TEST(GenerateSyntheticScenarioTest, BrakingLeadDeceleratesHard) {
  for (const std::uint64_t seed : {1ull, 8ull, 64ull}) {
    const Scenario scenario =
        GenerateSyntheticScenario(seed, ScenarioTemplate::kBraking);
    const Track* lead = scenario.FindTrack("lead");
    const Track* follower = scenario.FindTrack("follower");
    ASSERT_NE(lead, nullptr);
    ASSERT_NE(follower, nullptr);
    EXPECT_FALSE(HighAccelerationSteps(*lead, 4.0).empty());
    ASSERT_TRUE(scenario.interactive_pair.has_value());
    EXPECT_EQ(scenario.interactive_pair->first, "lead");
    EXPECT_EQ(scenario.interactive_pair->second, "follower");
    EXPECT_EQ(scenario.interactive_pair->kind,
              InteractionKind::kHighAcceleration);
    // The follower closes in but never reaches the lead's box.
    for (int t = 0; t < 91; ++t) {
      const double gap = lead->states[static_cast<std::size_t>(t)].x -
                         follower->states[static_cast<std::size_t>(t)].x;
      EXPECT_GT(gap, 4.8) << "step " << t;
    }
  }
}

}  // namespace
}  // namespace trajeval
