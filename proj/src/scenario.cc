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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "trajeval/error.h"
#include "trajeval/parallel.h"

namespace trajeval {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void SchemaError(const std::string& path,
                              const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, path + ": " + what);
}

[[noreturn]] void InvariantError(const std::string& path,
                                 const std::string& what) {
  throw Error(ErrorCode::kInvariantViolation, path + ": " + what);
}

const json& GetMember(const json& j, const char* key,
                      const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) {
    SchemaError(path + "." + key, "missing field");
  }
  return *it;
}

double AsDouble(const json& v, const std::string& path) {
  if (!v.is_number()) {
    SchemaError(path, "expected a number");
  }
  return v.get<double>();
}

int AsInt(const json& v, const std::string& path) {
  if (!v.is_number_integer()) {
    SchemaError(path, "expected an integer");
  }
  return v.get<int>();
}

bool AsBool(const json& v, const std::string& path) {
  if (!v.is_boolean()) {
    SchemaError(path, "expected a boolean");
  }
  return v.get<bool>();
}

std::string AsString(const json& v, const std::string& path) {
  if (!v.is_string()) {
    SchemaError(path, "expected a string");
  }
  return v.get<std::string>();
}

const json& AsArray(const json& v, const std::string& path) {
  if (!v.is_array()) {
    SchemaError(path, "expected an array");
  }
  return v;
}

const json& AsObject(const json& v, const std::string& path) {
  if (!v.is_object()) {
    SchemaError(path, "expected an object");
  }
  return v;
}

std::string Indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void CheckFinite(double v, const std::string& path) {
  if (!std::isfinite(v)) {
    InvariantError(path, "must be finite");
  }
}

ObjectState ParseState(const json& j, const std::string& path) {
  AsObject(j, path);
  ObjectState s;
  s.x = AsDouble(GetMember(j, "x", path), path + ".x");
  s.y = AsDouble(GetMember(j, "y", path), path + ".y");
  s.z = AsDouble(GetMember(j, "z", path), path + ".z");
  s.heading = AsDouble(GetMember(j, "heading", path), path + ".heading");
  s.vx = AsDouble(GetMember(j, "vx", path), path + ".vx");
  s.vy = AsDouble(GetMember(j, "vy", path), path + ".vy");
  s.length = AsDouble(GetMember(j, "length", path), path + ".length");
  s.width = AsDouble(GetMember(j, "width", path), path + ".width");
  s.height = AsDouble(GetMember(j, "height", path), path + ".height");
  s.valid = AsBool(GetMember(j, "valid", path), path + ".valid");
  return s;
}

json StateToJson(const ObjectState& s) {
  json j = json::object();
  j["x"] = s.x;
  j["y"] = s.y;
  j["z"] = s.z;
  j["heading"] = s.heading;
  j["vx"] = s.vx;
  j["vy"] = s.vy;
  j["length"] = s.length;
  j["width"] = s.width;
  j["height"] = s.height;
  j["valid"] = s.valid;
  return j;
}

void ValidateState(const ObjectState& s, const std::string& path) {
  CheckFinite(s.x, path + ".x");
  CheckFinite(s.y, path + ".y");
  CheckFinite(s.z, path + ".z");
  CheckFinite(s.heading, path + ".heading");
  CheckFinite(s.vx, path + ".vx");
  CheckFinite(s.vy, path + ".vy");
  CheckFinite(s.length, path + ".length");
  CheckFinite(s.width, path + ".width");
  CheckFinite(s.height, path + ".height");
  if (!s.valid) {
    return;
  }
  if (s.length <= 0.0 || s.width <= 0.0 || s.height <= 0.0) {
    InvariantError(path, "box_dims must be positive on valid states");
  }
  if (s.heading <= -kPi || s.heading > kPi) {
    InvariantError(path + ".heading", "must lie in (-pi, pi]");
  }
}

}  // namespace

const Track* Scenario::FindTrack(std::string_view object_id) const {
  for (const Track& track : tracks) {
    if (track.id == object_id) {
      return &track;
    }
  }
  return nullptr;
}

int Scenario::StepsPerTrack() const {
  return tracks.empty() ? 0 : static_cast<int>(tracks.front().states.size());
}

std::size_t JointPredictionSet::NumSteps() const {
  if (hypotheses.empty() || hypotheses.front().waypoints.empty()) {
    return 0;
  }
  return hypotheses.front().waypoints.front().size();
}

const char* ObjectTypeName(ObjectType type) {
  switch (type) {
    case ObjectType::kVehicle:
      return "vehicle";
    case ObjectType::kPedestrian:
      return "pedestrian";
    case ObjectType::kCyclist:
      return "cyclist";
  }
  return "vehicle";
}

const char* FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kLaneCenter:
      return "lane_center";
    case FeatureKind::kLaneBoundary:
      return "lane_boundary";
    case FeatureKind::kRoadEdge:
      return "road_edge";
    case FeatureKind::kStopSign:
      return "stop_sign";
    case FeatureKind::kCrosswalk:
      return "crosswalk";
    case FeatureKind::kSpeedBump:
      return "speed_bump";
  }
  return "lane_center";
}

const char* SignalStateName(SignalState state) {
  switch (state) {
    case SignalState::kUnknown:
      return "unknown";
    case SignalState::kStop:
      return "stop";
    case SignalState::kCaution:
      return "caution";
    case SignalState::kGo:
      return "go";
    case SignalState::kArrowStop:
      return "arrow_stop";
    case SignalState::kArrowGo:
      return "arrow_go";
    case SignalState::kFlashingStop:
      return "flashing_stop";
    case SignalState::kFlashingCaution:
      return "flashing_caution";
  }
  return "unknown";
}

const char* DifficultyName(Difficulty difficulty) {
  switch (difficulty) {
    case Difficulty::kEasy:
      return "easy";
    case Difficulty::kMedium:
      return "medium";
    case Difficulty::kHard:
      return "hard";
  }
  return "easy";
}

const char* InteractionKindName(InteractionKind kind) {
  switch (kind) {
    case InteractionKind::kMerge:
      return "merge";
    case InteractionKind::kLaneChange:
      return "lane_change";
    case InteractionKind::kUnprotectedTurn:
      return "unprotected_turn";
    case InteractionKind::kIntersectionLeftTurn:
      return "intersection_left_turn";
    case InteractionKind::kIntersectionRightTurn:
      return "intersection_right_turn";
    case InteractionKind::kPedestrianVehicle:
      return "pedestrian_vehicle";
    case InteractionKind::kCyclistVehicle:
      return "cyclist_vehicle";
    case InteractionKind::kCloseProximity:
      return "close_proximity";
    case InteractionKind::kHighAcceleration:
      return "high_acceleration";
  }
  return "close_proximity";
}

std::optional<ObjectType> ParseObjectType(std::string_view name) {
  if (name == "vehicle") return ObjectType::kVehicle;
  if (name == "pedestrian") return ObjectType::kPedestrian;
  if (name == "cyclist") return ObjectType::kCyclist;
  return std::nullopt;
}

std::optional<FeatureKind> ParseFeatureKind(std::string_view name) {
  if (name == "lane_center") return FeatureKind::kLaneCenter;
  if (name == "lane_boundary") return FeatureKind::kLaneBoundary;
  if (name == "road_edge") return FeatureKind::kRoadEdge;
  if (name == "stop_sign") return FeatureKind::kStopSign;
  if (name == "crosswalk") return FeatureKind::kCrosswalk;
  if (name == "speed_bump") return FeatureKind::kSpeedBump;
  return std::nullopt;
}

SignalState ParseSignalState(std::string_view name) {
  if (name == "stop") return SignalState::kStop;
  if (name == "caution") return SignalState::kCaution;
  if (name == "go") return SignalState::kGo;
  if (name == "arrow_stop") return SignalState::kArrowStop;
  if (name == "arrow_go") return SignalState::kArrowGo;
  if (name == "flashing_stop") return SignalState::kFlashingStop;
  if (name == "flashing_caution") return SignalState::kFlashingCaution;
  return SignalState::kUnknown;
}

std::optional<Difficulty> ParseDifficulty(std::string_view name) {
  if (name == "easy") return Difficulty::kEasy;
  if (name == "medium") return Difficulty::kMedium;
  if (name == "hard") return Difficulty::kHard;
  return std::nullopt;
}

std::optional<InteractionKind> ParseInteractionKind(std::string_view name) {
  if (name == "merge") return InteractionKind::kMerge;
  if (name == "lane_change") return InteractionKind::kLaneChange;
  if (name == "unprotected_turn") return InteractionKind::kUnprotectedTurn;
  if (name == "intersection_left_turn")
    return InteractionKind::kIntersectionLeftTurn;
  if (name == "intersection_right_turn")
    return InteractionKind::kIntersectionRightTurn;
  if (name == "pedestrian_vehicle") return InteractionKind::kPedestrianVehicle;
  if (name == "cyclist_vehicle") return InteractionKind::kCyclistVehicle;
  if (name == "close_proximity") return InteractionKind::kCloseProximity;
  if (name == "high_acceleration") return InteractionKind::kHighAcceleration;
  return std::nullopt;
}

void ValidateScenario(const Scenario& s) {
  if (s.scenario_id.empty()) {
    InvariantError("scenario_id", "must be non-empty");
  }
  if (s.current_index < 0) {
    InvariantError("current_index", "must be non-negative");
  }

  std::set<std::string> track_ids;
  std::size_t track_steps = 0;
  for (std::size_t i = 0; i < s.tracks.size(); ++i) {
    const Track& track = s.tracks[i];
    const std::string path = Indexed("tracks", i);
    if (track.id.empty()) {
      InvariantError(path + ".id", "must be non-empty");
    }
    if (!track_ids.insert(track.id).second) {
      InvariantError(path + ".id", "duplicate object id '" + track.id + "'");
    }
    if (track.states.empty()) {
      InvariantError(path + ".states", "must be non-empty");
    }
    if (i == 0) {
      track_steps = track.states.size();
    } else if (track.states.size() != track_steps) {
      InvariantError(path + ".states",
                     "length " + std::to_string(track.states.size()) +
                         " differs from tracks[0] length " +
                         std::to_string(track_steps));
    }
    bool any_valid = false;
    for (std::size_t t = 0; t < track.states.size(); ++t) {
      ValidateState(track.states[t], Indexed(path + ".states", t));
      any_valid = any_valid || track.states[t].valid;
    }
    if (!any_valid) {
      InvariantError(path + ".states", "needs at least one valid state");
    }
  }
  if (!s.tracks.empty() &&
      s.current_index >= static_cast<int>(track_steps)) {
    InvariantError("current_index",
                   "must be less than the track length " +
                       std::to_string(track_steps));
  }

  std::set<std::string> feature_ids;
  std::set<std::string> lane_ids;
  for (std::size_t i = 0; i < s.map_features.size(); ++i) {
    const MapFeature& f = s.map_features[i];
    const std::string path = Indexed("map_features", i);
    if (f.id.empty()) {
      InvariantError(path + ".id", "must be non-empty");
    }
    if (!feature_ids.insert(f.id).second) {
      InvariantError(path + ".id", "duplicate feature id '" + f.id + "'");
    }
    if (f.kind == FeatureKind::kLaneCenter) {
      lane_ids.insert(f.id);
    }
    if (f.polyline.empty()) {
      InvariantError(path + ".polyline", "must be non-empty");
    }
    for (std::size_t p = 0; p < f.polyline.size(); ++p) {
      const std::string vertex = Indexed(path + ".polyline", p);
      CheckFinite(f.polyline[p].x, vertex);
      CheckFinite(f.polyline[p].y, vertex);
      CheckFinite(f.polyline[p].z, vertex);
    }
    const bool is_curve = f.kind == FeatureKind::kLaneCenter ||
                          f.kind == FeatureKind::kLaneBoundary ||
                          f.kind == FeatureKind::kRoadEdge;
    if (is_curve) {
      for (std::size_t p = 1; p < f.polyline.size(); ++p) {
        const Vec3& a = f.polyline[p - 1];
        const Vec3& b = f.polyline[p];
        const double gap = std::sqrt(
            (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y) +
            (b.z - a.z) * (b.z - a.z));
        if (gap > kCurveSpacing + kSpacingTolerance) {
          InvariantError(Indexed(path + ".polyline", p),
                         "curve vertices must be at most 0.5 m apart");
        }
      }
    }
  }

  for (std::size_t i = 0; i < s.signal_frames.size(); ++i) {
    const TrafficSignalFrame& frame = s.signal_frames[i];
    const std::string path = Indexed("signal_frames", i);
    if (frame.timestep < 0 ||
        (!s.tracks.empty() &&
         frame.timestep >= static_cast<int>(track_steps))) {
      InvariantError(path + ".timestep", "outside the track step range");
    }
    for (const auto& [lane_id, state] : frame.states) {
      (void)state;
      if (lane_ids.find(lane_id) == lane_ids.end()) {
        InvariantError(path + ".states",
                       "lane '" + lane_id + "' is not a lane_center feature");
      }
    }
  }

  std::set<std::string> predict_ids;
  for (std::size_t i = 0; i < s.predict_list.size(); ++i) {
    const std::string path = Indexed("predict_list", i);
    const std::string& id = s.predict_list[i].id;
    if (track_ids.find(id) == track_ids.end()) {
      InvariantError(path + ".id", "'" + id + "' is not a track id");
    }
    if (!predict_ids.insert(id).second) {
      InvariantError(path + ".id", "duplicate predict id '" + id + "'");
    }
  }

  if (s.interactive_pair) {
    const InteractivePair& pair = *s.interactive_pair;
    if (pair.first == pair.second) {
      InvariantError("interactive_pair", "ids must be distinct");
    }
    for (const std::string& id : {pair.first, pair.second}) {
      if (track_ids.find(id) == track_ids.end()) {
        InvariantError("interactive_pair",
                       "'" + id + "' is not a track id");
      }
    }
  }
}

void ValidatePrediction(const JointPredictionSet& p) {
  if (p.scenario_id.empty()) {
    InvariantError("scenario_id", "must be non-empty");
  }
  if (p.agent_ids.empty()) {
    InvariantError("agent_ids", "must be non-empty");
  }
  std::set<std::string> ids;
  for (std::size_t a = 0; a < p.agent_ids.size(); ++a) {
    if (p.agent_ids[a].empty()) {
      InvariantError(Indexed("agent_ids", a), "must be non-empty");
    }
    if (!ids.insert(p.agent_ids[a]).second) {
      InvariantError(Indexed("agent_ids", a),
                     "duplicate agent id '" + p.agent_ids[a] + "'");
    }
  }
  if (p.hypotheses.empty()) {
    InvariantError("hypotheses", "need at least one hypothesis");
  }
  std::size_t steps = 0;
  for (std::size_t k = 0; k < p.hypotheses.size(); ++k) {
    const Hypothesis& h = p.hypotheses[k];
    const std::string path = Indexed("hypotheses", k);
    CheckFinite(h.confidence, path + ".confidence");
    if (h.confidence < 0.0) {
      InvariantError(path + ".confidence", "must be non-negative");
    }
    if (h.waypoints.size() != p.agent_ids.size()) {
      InvariantError(path + ".waypoints",
                     "agent arity differs from agent_ids");
    }
    for (std::size_t a = 0; a < h.waypoints.size(); ++a) {
      const std::string agent_path = Indexed(path + ".waypoints", a);
      if (h.waypoints[a].empty()) {
        InvariantError(agent_path, "must be non-empty");
      }
      if (k == 0 && a == 0) {
        steps = h.waypoints[a].size();
      } else if (h.waypoints[a].size() != steps) {
        InvariantError(agent_path,
                       "step count differs across hypotheses or agents");
      }
      for (std::size_t t = 0; t < h.waypoints[a].size(); ++t) {
        const std::string point = Indexed(agent_path, t);
        CheckFinite(h.waypoints[a][t].x, point);
        CheckFinite(h.waypoints[a][t].y, point);
      }
    }
  }
}

Scenario ParseScenario(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedSyntax, e.what());
  }
  AsObject(j, "record");

  Scenario s;
  s.scenario_id =
      AsString(GetMember(j, "scenario_id", "record"), "scenario_id");
  s.capture_date =
      AsString(GetMember(j, "capture_date", "record"), "capture_date");
  s.vehicle_id = AsString(GetMember(j, "vehicle_id", "record"), "vehicle_id");
  s.current_index =
      AsInt(GetMember(j, "current_index", "record"), "current_index");

  const json& tracks = AsArray(GetMember(j, "tracks", "record"), "tracks");
  s.tracks.reserve(tracks.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const std::string path = Indexed("tracks", i);
    const json& jt = AsObject(tracks[i], path);
    Track track;
    track.id = AsString(GetMember(jt, "id", path), path + ".id");
    const std::string type_name =
        AsString(GetMember(jt, "type", path), path + ".type");
    const auto type = ParseObjectType(type_name);
    if (!type) {
      SchemaError(path + ".type", "unknown object type '" + type_name + "'");
    }
    track.type = *type;
    const json& states =
        AsArray(GetMember(jt, "states", path), path + ".states");
    track.states.reserve(states.size());
    for (std::size_t t = 0; t < states.size(); ++t) {
      track.states.push_back(
          ParseState(states[t], Indexed(path + ".states", t)));
    }
    s.tracks.push_back(std::move(track));
  }

  const json& features =
      AsArray(GetMember(j, "map_features", "record"), "map_features");
  s.map_features.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const std::string path = Indexed("map_features", i);
    const json& jf = AsObject(features[i], path);
    MapFeature f;
    f.id = AsString(GetMember(jf, "id", path), path + ".id");
    const std::string kind_name =
        AsString(GetMember(jf, "kind", path), path + ".kind");
    const auto kind = ParseFeatureKind(kind_name);
    if (!kind) {
      SchemaError(path + ".kind", "unknown feature kind '" + kind_name + "'");
    }
    f.kind = *kind;
    const json& polyline =
        AsArray(GetMember(jf, "polyline", path), path + ".polyline");
    f.polyline.reserve(polyline.size());
    for (std::size_t p = 0; p < polyline.size(); ++p) {
      const std::string vertex = Indexed(path + ".polyline", p);
      const json& jp = AsArray(polyline[p], vertex);
      if (jp.size() != 3) {
        SchemaError(vertex, "expected [x, y, z]");
      }
      f.polyline.push_back({AsDouble(jp[0], vertex + "[0]"),
                            AsDouble(jp[1], vertex + "[1]"),
                            AsDouble(jp[2], vertex + "[2]")});
    }
    const json& attributes =
        AsObject(GetMember(jf, "attributes", path), path + ".attributes");
    for (const auto& [key, value] : attributes.items()) {
      f.attributes[key] = AsString(value, path + ".attributes." + key);
    }
    s.map_features.push_back(std::move(f));
  }

  const json& frames =
      AsArray(GetMember(j, "signal_frames", "record"), "signal_frames");
  s.signal_frames.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string path = Indexed("signal_frames", i);
    const json& jf = AsObject(frames[i], path);
    TrafficSignalFrame frame;
    frame.timestep =
        AsInt(GetMember(jf, "timestep", path), path + ".timestep");
    const json& states =
        AsObject(GetMember(jf, "states", path), path + ".states");
    for (const auto& [lane_id, value] : states.items()) {
      frame.states[lane_id] =
          ParseSignalState(AsString(value, path + ".states." + lane_id));
    }
    s.signal_frames.push_back(std::move(frame));
  }

  const json& predict =
      AsArray(GetMember(j, "predict_list", "record"), "predict_list");
  s.predict_list.reserve(predict.size());
  for (std::size_t i = 0; i < predict.size(); ++i) {
    const std::string path = Indexed("predict_list", i);
    const json& jp = AsObject(predict[i], path);
    PredictEntry entry;
    entry.id = AsString(GetMember(jp, "id", path), path + ".id");
    const std::string difficulty_name =
        AsString(GetMember(jp, "difficulty", path), path + ".difficulty");
    const auto difficulty = ParseDifficulty(difficulty_name);
    if (!difficulty) {
      SchemaError(path + ".difficulty",
                  "unknown difficulty '" + difficulty_name + "'");
    }
    entry.difficulty = *difficulty;
    s.predict_list.push_back(std::move(entry));
  }

  if (auto it = j.find("interactive_pair"); it != j.end() && !it->is_null()) {
    const json& jp = AsObject(*it, "interactive_pair");
    InteractivePair pair;
    pair.first = AsString(GetMember(jp, "first", "interactive_pair"),
                          "interactive_pair.first");
    pair.second = AsString(GetMember(jp, "second", "interactive_pair"),
                           "interactive_pair.second");
    const std::string kind_name =
        AsString(GetMember(jp, "kind", "interactive_pair"),
                 "interactive_pair.kind");
    const auto kind = ParseInteractionKind(kind_name);
    if (!kind) {
      SchemaError("interactive_pair.kind",
                  "unknown interaction kind '" + kind_name + "'");
    }
    pair.kind = *kind;
    s.interactive_pair = pair;
  }

  ValidateScenario(s);
  return s;
}

JointPredictionSet ParsePrediction(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedSyntax, e.what());
  }
  AsObject(j, "record");

  JointPredictionSet p;
  p.scenario_id =
      AsString(GetMember(j, "scenario_id", "record"), "scenario_id");
  const json& agents =
      AsArray(GetMember(j, "agent_ids", "record"), "agent_ids");
  p.agent_ids.reserve(agents.size());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    p.agent_ids.push_back(AsString(agents[a], Indexed("agent_ids", a)));
  }
  const json& hypotheses =
      AsArray(GetMember(j, "hypotheses", "record"), "hypotheses");
  p.hypotheses.reserve(hypotheses.size());
  for (std::size_t k = 0; k < hypotheses.size(); ++k) {
    const std::string path = Indexed("hypotheses", k);
    const json& jh = AsObject(hypotheses[k], path);
    Hypothesis h;
    h.confidence =
        AsDouble(GetMember(jh, "confidence", path), path + ".confidence");
    const json& waypoints =
        AsArray(GetMember(jh, "waypoints", path), path + ".waypoints");
    h.waypoints.reserve(waypoints.size());
    for (std::size_t a = 0; a < waypoints.size(); ++a) {
      const std::string agent_path = Indexed(path + ".waypoints", a);
      const json& ja = AsArray(waypoints[a], agent_path);
      std::vector<Vec2> points;
      points.reserve(ja.size());
      for (std::size_t t = 0; t < ja.size(); ++t) {
        const std::string point = Indexed(agent_path, t);
        const json& jt = AsArray(ja[t], point);
        if (jt.size() != 2) {
          SchemaError(point, "expected [x, y]");
        }
        points.push_back(
            {AsDouble(jt[0], point + "[0]"), AsDouble(jt[1], point + "[1]")});
      }
      h.waypoints.push_back(std::move(points));
    }
    p.hypotheses.push_back(std::move(h));
  }

  ValidatePrediction(p);
  return p;
}

std::string SerializeScenario(const Scenario& s) {
  ValidateScenario(s);

  json j = json::object();
  j["scenario_id"] = s.scenario_id;
  j["capture_date"] = s.capture_date;
  j["vehicle_id"] = s.vehicle_id;
  j["current_index"] = s.current_index;

  json tracks = json::array();
  for (const Track& track : s.tracks) {
    json jt = json::object();
    jt["id"] = track.id;
    jt["type"] = ObjectTypeName(track.type);
    json states = json::array();
    for (const ObjectState& state : track.states) {
      states.push_back(StateToJson(state));
    }
    jt["states"] = std::move(states);
    tracks.push_back(std::move(jt));
  }
  j["tracks"] = std::move(tracks);

  json features = json::array();
  for (const MapFeature& f : s.map_features) {
    json jf = json::object();
    jf["id"] = f.id;
    jf["kind"] = FeatureKindName(f.kind);
    json polyline = json::array();
    for (const Vec3& v : f.polyline) {
      polyline.push_back(json::array({v.x, v.y, v.z}));
    }
    jf["polyline"] = std::move(polyline);
    json attributes = json::object();
    for (const auto& [key, value] : f.attributes) {
      attributes[key] = value;
    }
    jf["attributes"] = std::move(attributes);
    features.push_back(std::move(jf));
  }
  j["map_features"] = std::move(features);

  json frames = json::array();
  for (const TrafficSignalFrame& frame : s.signal_frames) {
    json jf = json::object();
    jf["timestep"] = frame.timestep;
    json states = json::object();
    for (const auto& [lane_id, state] : frame.states) {
      states[lane_id] = SignalStateName(state);
    }
    jf["states"] = std::move(states);
    frames.push_back(std::move(jf));
  }
  j["signal_frames"] = std::move(frames);

  json predict = json::array();
  for (const PredictEntry& entry : s.predict_list) {
    json jp = json::object();
    jp["id"] = entry.id;
    jp["difficulty"] = DifficultyName(entry.difficulty);
    predict.push_back(std::move(jp));
  }
  j["predict_list"] = std::move(predict);

  if (s.interactive_pair) {
    json jp = json::object();
    jp["first"] = s.interactive_pair->first;
    jp["second"] = s.interactive_pair->second;
    jp["kind"] = InteractionKindName(s.interactive_pair->kind);
    j["interactive_pair"] = std::move(jp);
  }

  return j.dump();
}

std::string SerializePrediction(const JointPredictionSet& p) {
  ValidatePrediction(p);

  json j = json::object();
  j["scenario_id"] = p.scenario_id;
  j["agent_ids"] = p.agent_ids;
  json hypotheses = json::array();
  for (const Hypothesis& h : p.hypotheses) {
    json jh = json::object();
    jh["confidence"] = h.confidence;
    json waypoints = json::array();
    for (const std::vector<Vec2>& agent : h.waypoints) {
      json points = json::array();
      for (const Vec2& point : agent) {
        points.push_back(json::array({point.x, point.y}));
      }
      waypoints.push_back(std::move(points));
    }
    jh["waypoints"] = std::move(waypoints);
    hypotheses.push_back(std::move(jh));
  }
  j["hypotheses"] = std::move(hypotheses);
  return j.dump();
}

GroundTruthSlice ExtractGroundTruth(const Scenario& scenario,
                                    std::span<const std::string> agent_ids,
                                    int horizon_steps) {
  if (horizon_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "horizon_steps must be positive");
  }
  const int steps = scenario.StepsPerTrack();
  if (scenario.current_index + horizon_steps >= steps) {
    throw Error(ErrorCode::kInvalidArgument,
                "horizon extends past the track end");
  }

  GroundTruthSlice slice;
  slice.agents.reserve(agent_ids.size());
  for (const std::string& id : agent_ids) {
    const Track* track = scenario.FindTrack(id);
    if (track == nullptr) {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown agent id '" + id + "'");
    }
    const ObjectState& current =
        track->states[static_cast<std::size_t>(scenario.current_index)];
    if (!current.valid) {
      throw Error(ErrorCode::kAgentInvalidAtPredictionTime,
                  "agent '" + id + "' is invalid at the prediction step");
    }
    AgentGroundTruth agent;
    agent.object_id = id;
    agent.type = track->type;
    agent.reference = {current.Position2(), current.heading};
    agent.frame_velocity = ToAgentFrame(current.Velocity(), agent.reference);
    agent.length = current.length;
    agent.width = current.width;
    agent.height = current.height;
    agent.positions.reserve(static_cast<std::size_t>(horizon_steps));
    agent.valid.reserve(static_cast<std::size_t>(horizon_steps));
    for (int t = 1; t <= horizon_steps; ++t) {
      const ObjectState& state =
          track->states[static_cast<std::size_t>(scenario.current_index + t)];
      agent.positions.push_back(state.Position2());
      agent.valid.push_back(state.valid);
    }
    slice.agents.push_back(std::move(agent));
  }
  return slice;
}

namespace {

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

bool IsBlank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

template <typename T, typename ParseFn>
std::vector<T> ReadRecords(const std::string& path, ParseFn parse) {
  struct NumberedLine {
    std::size_t number = 0;
    std::string text;
  };
  std::vector<NumberedLine> records;
  {
    std::vector<std::string> lines = ReadLines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (!IsBlank(lines[i])) {
        records.push_back({i + 1, std::move(lines[i])});
      }
    }
  }
  return ParallelMap(records, [&](const NumberedLine& line) -> T {
    try {
      return parse(line.text);
    } catch (const Error& e) {
      throw Error(e.code(), path + ":" + std::to_string(line.number) + ": " +
                                e.what());
    }
  });
}

template <typename T, typename SerializeFn>
void WriteRecords(const std::string& path, std::span<const T> records,
                  SerializeFn serialize) {
  const std::filesystem::path fs_path(path);
  if (fs_path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(fs_path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  }
  for (const T& record : records) {
    out << serialize(record) << '\n';
  }
  if (!out) {
    throw Error(ErrorCode::kIoError, "failed writing '" + path + "'");
  }
}

}  // namespace

std::vector<Scenario> ReadScenarioFile(const std::string& path) {
  return ReadRecords<Scenario>(
      path, [](const std::string& line) { return ParseScenario(line); });
}

std::vector<JointPredictionSet> ReadPredictionFile(const std::string& path) {
  return ReadRecords<JointPredictionSet>(
      path, [](const std::string& line) { return ParsePrediction(line); });
}

void WriteScenarioFile(const std::string& path,
                       std::span<const Scenario> scenarios) {
  WriteRecords(path, scenarios,
               [](const Scenario& s) { return SerializeScenario(s); });
}

void WritePredictionFile(const std::string& path,
                         std::span<const JointPredictionSet> predictions) {
  WriteRecords(path, predictions, [](const JointPredictionSet& p) {
    return SerializePrediction(p);
  });
}

}  // namespace trajeval
