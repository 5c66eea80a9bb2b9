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

#include "trajeval/mining.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "trajeval/error.h"

namespace trajeval {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Tolerance for segment-intersection predicates (cross products and
// point-on-segment distances). Coordinates are meters.
constexpr double kIntersectEps = 1e-9;

double PointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.SquaredNorm();
  if (len2 <= 0.0) return (p - a).Norm();
  const double t = std::clamp((p - a).Dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).Norm();
}

double PolylineDistance(const Vec2& p, std::span<const Vec3> polyline) {
  if (polyline.empty()) return kInf;
  if (polyline.size() == 1) return (p - polyline.front().xy()).Norm();
  double best = kInf;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    best = std::min(best, PointSegmentDistance(p, polyline[i].xy(),
                                               polyline[i + 1].xy()));
  }
  return best;
}

struct PathPoint {
  Vec2 position;
  double time = 0.0;     // seconds from scenario start
  double heading = 0.0;  // stored state heading
};

std::vector<PathPoint> ValidPath(const Track& track, double step_period) {
  std::vector<PathPoint> path;
  for (std::size_t t = 0; t < track.states.size(); ++t) {
    const ObjectState& s = track.states[t];
    if (!s.valid) continue;
    path.push_back({s.Position2(), static_cast<double>(t) * step_period,
                    s.heading});
  }
  return path;
}

// Fraction of `p` along a->b, clamped to [0, 1]. Callers only pass points
// already known to lie on the segment.
double SegmentFraction(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.SquaredNorm();
  if (len2 <= 0.0) return 0.0;
  return std::clamp((p - a).Dot(ab) / len2, 0.0, 1.0);
}

struct CrossingCandidate {
  Vec2 point;
  double frac_a = 0.0;  // fraction along segment i of path a
  double frac_b = 0.0;
};

// All intersection points of two segments, including collinear-overlap
// endpoints and degenerate (zero-length) segments.
void SegmentIntersections(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                          const Vec2& b1,
                          std::vector<CrossingCandidate>* out) {
  const Vec2 ra = a1 - a0;
  const Vec2 rb = b1 - b0;
  const bool degenerate_a = ra.Norm() <= kIntersectEps;
  const bool degenerate_b = rb.Norm() <= kIntersectEps;
  if (degenerate_a && degenerate_b) {
    if ((a0 - b0).Norm() <= kIntersectEps) out->push_back({a0, 0.0, 0.0});
    return;
  }
  if (degenerate_a) {
    if (PointSegmentDistance(a0, b0, b1) <= kIntersectEps) {
      out->push_back({a0, 0.0, SegmentFraction(a0, b0, b1)});
    }
    return;
  }
  if (degenerate_b) {
    if (PointSegmentDistance(b0, a0, a1) <= kIntersectEps) {
      out->push_back({b0, SegmentFraction(b0, a0, a1), 0.0});
    }
    return;
  }
  const double denom = ra.Cross(rb);
  if (std::abs(denom) > kIntersectEps) {
    const double t = (b0 - a0).Cross(rb) / denom;
    const double u = (b0 - a0).Cross(ra) / denom;
    if (t >= -kIntersectEps && t <= 1.0 + kIntersectEps &&
        u >= -kIntersectEps && u <= 1.0 + kIntersectEps) {
      const double tc = std::clamp(t, 0.0, 1.0);
      const double uc = std::clamp(u, 0.0, 1.0);
      out->push_back({a0 + ra * tc, tc, uc});
    }
    return;
  }
  // Parallel. Only collinear segments can touch; report every endpoint that
  // lies on the other segment so overlap boundaries become candidates.
  if (std::abs((b0 - a0).Cross(ra)) > kIntersectEps * std::max(1.0, ra.Norm()))
    return;
  if (PointSegmentDistance(b0, a0, a1) <= kIntersectEps) {
    out->push_back({b0, SegmentFraction(b0, a0, a1), 0.0});
  }
  if (PointSegmentDistance(b1, a0, a1) <= kIntersectEps) {
    out->push_back({b1, SegmentFraction(b1, a0, a1), 1.0});
  }
  if (PointSegmentDistance(a0, b0, b1) <= kIntersectEps) {
    out->push_back({a0, 0.0, SegmentFraction(a0, b0, b1)});
  }
  if (PointSegmentDistance(a1, b0, b1) <= kIntersectEps) {
    out->push_back({a1, 1.0, SegmentFraction(a1, b0, b1)});
  }
}

double SegmentHeading(const PathPoint& from, const PathPoint& to) {
  const Vec2 d = to.position - from.position;
  if (d.Norm() > kMotionEpsilon) return std::atan2(d.y, d.x);
  return from.heading;
}

// Signed net heading change over a track's valid states, summed as
// normalized successive differences so multi-turn paths accumulate.
double NetHeadingChange(const Track& track) {
  double net = 0.0;
  bool have_prev = false;
  double prev = 0.0;
  for (const ObjectState& s : track.states) {
    if (!s.valid) continue;
    if (have_prev) net += NormalizeAngle(s.heading - prev);
    prev = s.heading;
    have_prev = true;
  }
  return net;
}

}  // namespace

std::vector<int> DetectLaneChanges(const Track& track,
                                   std::span<const MapFeature> features,
                                   double max_dist) {
  std::vector<const MapFeature*> lanes;
  for (const MapFeature& f : features) {
    if (f.kind == FeatureKind::kLaneCenter && !f.polyline.empty()) {
      lanes.push_back(&f);
    }
  }
  if (lanes.empty()) {
    throw Error(ErrorCode::kNoLanes, "map has no lane centers");
  }
  std::vector<int> events;
  bool prev_assigned = false;
  std::string prev_lane;
  for (std::size_t t = 0; t < track.states.size(); ++t) {
    const ObjectState& s = track.states[t];
    if (!s.valid) continue;
    double best = kInf;
    const std::string* best_id = nullptr;
    for (const MapFeature* lane : lanes) {
      const double d = PolylineDistance(s.Position2(), lane->polyline);
      if (d < best || (d == best && best_id != nullptr && lane->id < *best_id)) {
        best = d;
        best_id = &lane->id;
      }
    }
    const bool assigned = best_id != nullptr && best <= max_dist;
    if (assigned && prev_assigned && *best_id != prev_lane) {
      events.push_back(static_cast<int>(t));
    }
    prev_assigned = assigned;
    if (assigned) prev_lane = *best_id;
  }
  return events;
}

std::optional<CrossingInfo> CrossedPaths(const Track& a, const Track& b,
                                         double step_period) {
  const std::vector<PathPoint> pa = ValidPath(a, step_period);
  const std::vector<PathPoint> pb = ValidPath(b, step_period);
  if (pa.size() < 2 || pb.size() < 2) return std::nullopt;

  std::optional<CrossingInfo> best;
  // Earliest-arrival selection key, symmetric in the two tracks.
  auto key = [](const CrossingInfo& c) {
    return std::make_tuple(std::min(c.time_a, c.time_b),
                           std::max(c.time_a, c.time_b), c.point.x, c.point.y);
  };
  std::vector<CrossingCandidate> candidates;
  for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
    for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
      candidates.clear();
      SegmentIntersections(pa[i].position, pa[i + 1].position, pb[j].position,
                           pb[j + 1].position, &candidates);
      for (const CrossingCandidate& c : candidates) {
        CrossingInfo info;
        info.point = c.point;
        info.time_a = pa[i].time + c.frac_a * (pa[i + 1].time - pa[i].time);
        info.time_b = pb[j].time + c.frac_b * (pb[j + 1].time - pb[j].time);
        info.time_gap = std::abs(info.time_a - info.time_b);
        const double ha = SegmentHeading(pa[i], pa[i + 1]);
        const double hb = SegmentHeading(pb[j], pb[j + 1]);
        info.heading_diff = std::abs(NormalizeAngle(ha - hb));
        if (!best.has_value() || key(info) < key(*best)) best = info;
      }
    }
  }
  return best;
}

std::vector<int> StepsWithin(const Track& a, const Track& b, double max_dist) {
  std::vector<int> steps;
  const std::size_t n = std::min(a.states.size(), b.states.size());
  for (std::size_t t = 0; t < n; ++t) {
    if (!a.states[t].valid || !b.states[t].valid) continue;
    if ((a.states[t].Position2() - b.states[t].Position2()).Norm() <=
        max_dist) {
      steps.push_back(static_cast<int>(t));
    }
  }
  return steps;
}

std::vector<int> HighAccelerationSteps(const Track& track, double min_accel,
                                       double step_period) {
  std::vector<int> steps;
  if (track.states.size() < 3) return steps;
  for (std::size_t t = 1; t + 1 < track.states.size(); ++t) {
    if (!track.states[t - 1].valid || !track.states[t].valid ||
        !track.states[t + 1].valid) {
      continue;
    }
    const Vec2 dv =
        track.states[t + 1].Velocity() - track.states[t - 1].Velocity();
    if (dv.Norm() / (2.0 * step_period) >= min_accel) {
      steps.push_back(static_cast<int>(t));
    }
  }
  return steps;
}

namespace {

class PredicateParser {
 public:
  explicit PredicateParser(std::string_view text) : text_(text) {}

  PredicateExpr Parse() {
    PredicateExpr expr = ParseExpr();
    SkipWs();
    if (pos_ != text_.size()) Fail("trailing input");
    return expr;
  }

 private:
  [[noreturn]] void Fail(const std::string& message) const {
    throw Error(ErrorCode::kMalformedSyntax,
                "predicate:" + std::to_string(pos_) + ": " + message);
  }

  void SkipWs() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool Peek(char c) {
    SkipWs();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void Expect(char c) {
    SkipWs();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      Fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  static bool IsIdentChar(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_';
  }

  std::string ParseIdent() {
    SkipWs();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && IsIdentChar(text_[pos_])) ++pos_;
    if (pos_ == start) Fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  double ParseNumber() {
    SkipWs();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) Fail("expected number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    if (!std::isfinite(value) || value <= 0.0) {
      Fail("parameter must be positive");
    }
    return value;
  }

  AtomTerm ParseTerm() {
    SkipWs();
    AtomTerm term;
    if (pos_ < text_.size() && text_[pos_] == '$') {
      ++pos_;
      term.is_variable = true;
    }
    term.name = ParseIdent();
    return term;
  }

  void ParseParam(Atom* atom) {
    const std::string name = ParseIdent();
    SkipWs();
    if (pos_ >= text_.size() || (text_[pos_] != '<' && text_[pos_] != '>')) {
      Fail("expected '<' or '>'");
    }
    const char op = text_[pos_++];
    const double value = ParseNumber();
    auto set = [&](std::optional<double>* slot, AtomKind kind, char want) {
      if (atom->kind != kind) Fail("parameter '" + name + "' not allowed here");
      if (op != want) Fail(std::string("expected '") + want + "' after '" +
                           name + "'");
      if (slot->has_value()) Fail("duplicate parameter '" + name + "'");
      *slot = value;
    };
    if (name == "gap") {
      set(&atom->max_gap, AtomKind::kCrossedPaths, '<');
    } else if (name == "heading") {
      set(&atom->min_heading, AtomKind::kCrossedPaths, '>');
    } else if (name == "dist") {
      set(&atom->max_dist, AtomKind::kCloseProximity, '<');
    } else if (name == "accel") {
      set(&atom->min_accel, AtomKind::kHighAcceleration, '>');
    } else {
      Fail("unknown parameter '" + name + "'");
    }
  }

  PredicateExpr ParseAtom(const std::string& head) {
    PredicateExpr expr;
    expr.op = PredicateOp::kAtom;
    Atom& atom = expr.atom;
    std::size_t num_terms = 0;
    if (head == "lane_change") {
      atom.kind = AtomKind::kLaneChange;
      num_terms = 1;
    } else if (head == "crossed_paths") {
      atom.kind = AtomKind::kCrossedPaths;
      num_terms = 2;
    } else if (head == "close_proximity") {
      atom.kind = AtomKind::kCloseProximity;
      num_terms = 2;
    } else if (head == "high_acceleration") {
      atom.kind = AtomKind::kHighAcceleration;
      num_terms = 1;
    } else if (head == "type") {
      atom.kind = AtomKind::kType;
      num_terms = 1;
    } else {
      Fail("unknown predicate '" + head + "'");
    }
    Expect('(');
    for (std::size_t i = 0; i < num_terms; ++i) {
      if (i > 0) Expect(',');
      atom.terms.push_back(ParseTerm());
    }
    if (atom.kind == AtomKind::kType) {
      Expect(',');
      const std::string type_name = ParseIdent();
      const std::optional<ObjectType> type = ParseObjectType(type_name);
      if (!type.has_value()) Fail("unknown object type '" + type_name + "'");
      atom.type = *type;
    }
    while (Peek(',')) {
      Expect(',');
      ParseParam(&atom);
    }
    Expect(')');
    return expr;
  }

  PredicateExpr ParseExpr() {
    const std::string head = ParseIdent();
    if (head == "and" || head == "or") {
      PredicateExpr expr;
      expr.op = head == "and" ? PredicateOp::kAnd : PredicateOp::kOr;
      Expect('(');
      expr.children.push_back(ParseExpr());
      while (Peek(',')) {
        Expect(',');
        expr.children.push_back(ParseExpr());
      }
      Expect(')');
      return expr;
    }
    if (head == "not") {
      PredicateExpr expr;
      expr.op = PredicateOp::kNot;
      Expect('(');
      expr.children.push_back(ParseExpr());
      Expect(')');
      return expr;
    }
    return ParseAtom(head);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

struct AtomOutcome {
  bool satisfied = false;
  std::optional<double> event_time;
};

class PredicateEvaluator {
 public:
  PredicateEvaluator(const Scenario& scenario, const MiningConfig& cfg)
      : scenario_(scenario), cfg_(cfg) {}

  AtomOutcome EvalAtom(const Atom& atom,
                       const std::map<std::string, std::string>& assignment) {
    std::string key = std::to_string(static_cast<int>(atom.kind));
    std::vector<std::string> ids;
    ids.reserve(atom.terms.size());
    for (const AtomTerm& term : atom.terms) {
      std::string id =
          term.is_variable ? assignment.at(term.name) : term.name;
      key += '|';
      key += id;
      ids.push_back(std::move(id));
    }
    auto append = [&key](const std::optional<double>& v) {
      key += '|';
      if (v.has_value()) key += std::to_string(*v);
    };
    append(atom.max_gap);
    append(atom.min_heading);
    append(atom.max_dist);
    append(atom.min_accel);
    if (atom.kind == AtomKind::kType) {
      key += '|';
      key += ObjectTypeName(atom.type);
    }
    const auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const AtomOutcome outcome = EvalAtomUncached(atom, ids);
    memo_.emplace(std::move(key), outcome);
    return outcome;
  }

 private:
  AtomOutcome EvalAtomUncached(const Atom& atom,
                               const std::vector<std::string>& ids) {
    for (const std::string& id : ids) {
      if (scenario_.FindTrack(id) == nullptr) return {};
    }
    if (ids.size() == 2 && ids[0] == ids[1]) return {};
    switch (atom.kind) {
      case AtomKind::kLaneChange: {
        const Track& track = *scenario_.FindTrack(ids[0]);
        std::vector<int> events;
        try {
          events = DetectLaneChanges(track, scenario_.map_features,
                                     cfg_.lane_assignment_max_dist);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kNoLanes) return {};
          throw;
        }
        if (events.empty()) return {};
        return {true, events.front() * cfg_.step_period};
      }
      case AtomKind::kCrossedPaths: {
        const std::optional<CrossingInfo> info =
            CrossedPaths(*scenario_.FindTrack(ids[0]),
                         *scenario_.FindTrack(ids[1]), cfg_.step_period);
        if (!info.has_value()) return {};
        if (atom.max_gap.has_value() && info->time_gap > *atom.max_gap) {
          return {};
        }
        if (atom.min_heading.has_value() &&
            info->heading_diff < *atom.min_heading) {
          return {};
        }
        return {true, std::min(info->time_a, info->time_b)};
      }
      case AtomKind::kCloseProximity: {
        const std::vector<int> steps = StepsWithin(
            *scenario_.FindTrack(ids[0]), *scenario_.FindTrack(ids[1]),
            atom.max_dist.value_or(cfg_.close_proximity_max_dist));
        if (steps.empty()) return {};
        return {true, steps.front() * cfg_.step_period};
      }
      case AtomKind::kHighAcceleration: {
        const std::vector<int> steps = HighAccelerationSteps(
            *scenario_.FindTrack(ids[0]),
            atom.min_accel.value_or(cfg_.high_accel_threshold),
            cfg_.step_period);
        if (steps.empty()) return {};
        return {true, steps.front() * cfg_.step_period};
      }
      case AtomKind::kType: {
        const Track& track = *scenario_.FindTrack(ids[0]);
        return {track.type == atom.type, std::nullopt};
      }
    }
    return {};
  }

  const Scenario& scenario_;
  const MiningConfig& cfg_;
  std::map<std::string, AtomOutcome> memo_;
};

struct ExprOutcome {
  bool satisfied = false;
  std::optional<double> witness;
};

void MergeWitness(std::optional<double>* into, const std::optional<double>& w) {
  if (!w.has_value()) return;
  if (!into->has_value() || *w < **into) *into = w;
}

ExprOutcome EvalExpr(const PredicateExpr& expr, PredicateEvaluator* eval,
                     const std::map<std::string, std::string>& assignment) {
  switch (expr.op) {
    case PredicateOp::kAtom: {
      const AtomOutcome a = eval->EvalAtom(expr.atom, assignment);
      if (!a.satisfied) return {};
      return {true, a.event_time};
    }
    case PredicateOp::kAnd: {
      ExprOutcome out{true, std::nullopt};
      for (const PredicateExpr& child : expr.children) {
        const ExprOutcome c = EvalExpr(child, eval, assignment);
        if (!c.satisfied) return {};
        MergeWitness(&out.witness, c.witness);
      }
      return out;
    }
    case PredicateOp::kOr: {
      ExprOutcome out;
      for (const PredicateExpr& child : expr.children) {
        const ExprOutcome c = EvalExpr(child, eval, assignment);
        if (!c.satisfied) continue;
        out.satisfied = true;
        MergeWitness(&out.witness, c.witness);
      }
      return out;
    }
    case PredicateOp::kNot: {
      const ExprOutcome c = EvalExpr(expr.children.front(), eval, assignment);
      return {!c.satisfied, std::nullopt};
    }
  }
  return {};
}

// variable name -> has at least one occurrence outside negation.
void CollectPolarity(const PredicateExpr& expr, bool negated,
                     std::map<std::string, bool>* vars) {
  if (expr.op == PredicateOp::kAtom) {
    for (const AtomTerm& term : expr.atom.terms) {
      if (!term.is_variable) continue;
      auto [it, inserted] = vars->emplace(term.name, !negated);
      if (!inserted && !negated) it->second = true;
    }
    return;
  }
  const bool child_negated =
      expr.op == PredicateOp::kNot ? !negated : negated;
  for (const PredicateExpr& child : expr.children) {
    CollectPolarity(child, child_negated, vars);
  }
}

}  // namespace

PredicateExpr ParsePredicate(std::string_view text) {
  return PredicateParser(text).Parse();
}

std::vector<Binding> EvaluatePredicate(const PredicateExpr& expr,
                                       const Scenario& scenario,
                                       const MiningConfig& cfg) {
  std::map<std::string, bool> polarity;
  CollectPolarity(expr, /*negated=*/false, &polarity);
  std::vector<std::string> vars;
  for (const auto& [name, positive] : polarity) {
    if (!positive) {
      throw Error(ErrorCode::kUnboundNegation,
                  "variable $" + name + " occurs only under negation");
    }
    vars.push_back(name);
  }

  std::vector<std::string> ids;
  ids.reserve(scenario.tracks.size());
  for (const Track& track : scenario.tracks) ids.push_back(track.id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  if (!vars.empty()) {
    double combos = 1.0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      combos *= static_cast<double>(ids.size());
    }
    if (combos > 1e6) {
      throw Error(ErrorCode::kInvalidArgument,
                  "assignment space exceeds 1e6 combinations");
    }
    if (ids.empty()) return {};
  }

  PredicateEvaluator evaluator(scenario, cfg);
  std::vector<Binding> bindings;
  std::vector<std::size_t> odometer(vars.size(), 0);
  while (true) {
    std::map<std::string, std::string> assignment;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      assignment[vars[i]] = ids[odometer[i]];
    }
    const ExprOutcome out = EvalExpr(expr, &evaluator, assignment);
    if (out.satisfied) {
      bindings.push_back({std::move(assignment), out.witness});
    }
    // Advance the odometer, last variable fastest.
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (++odometer[i] < ids.size()) break;
      odometer[i] = 0;
      if (i == 0) return bindings;
    }
    if (vars.empty()) break;
  }
  return bindings;
}

namespace {

struct PairCandidate {
  std::string first;
  std::string second;
  double time = 0.0;
};

// Keeps the candidate whose event time is nearest `anchor`, ties to the
// lexicographically smaller (first, second) tuple.
class NearestPicker {
 public:
  explicit NearestPicker(double anchor) : anchor_(anchor) {}

  void Offer(const PairCandidate& c) {
    if (!best_.has_value()) {
      best_ = c;
      return;
    }
    const double delta = std::abs(c.time - anchor_);
    const double best_delta = std::abs(best_->time - anchor_);
    if (delta < best_delta ||
        (delta == best_delta &&
         std::tie(c.first, c.second) < std::tie(best_->first, best_->second))) {
      best_ = c;
    }
  }

  const std::optional<PairCandidate>& best() const { return best_; }

 private:
  double anchor_;
  std::optional<PairCandidate> best_;
};

// Step with the minimum center distance among steps where both are valid;
// empty when never simultaneously valid.
std::optional<std::pair<int, double>> ClosestStep(const Track& a,
                                                  const Track& b) {
  std::optional<std::pair<int, double>> best;
  const std::size_t n = std::min(a.states.size(), b.states.size());
  for (std::size_t t = 0; t < n; ++t) {
    if (!a.states[t].valid || !b.states[t].valid) continue;
    const double d = (a.states[t].Position2() - b.states[t].Position2()).Norm();
    if (!best.has_value() || d < best->second) {
      best = {static_cast<int>(t), d};
    }
  }
  return best;
}

// Nearest other track valid at `step` within `max_dist`; ties to the
// smaller id.
const Track* NearestPartner(const Scenario& scenario, const Track& self,
                            int step, double max_dist) {
  const Track* best = nullptr;
  double best_dist = kInf;
  const Vec2 pos = self.states[static_cast<std::size_t>(step)].Position2();
  for (const Track& other : scenario.tracks) {
    if (other.id == self.id) continue;
    if (static_cast<std::size_t>(step) >= other.states.size()) continue;
    const ObjectState& s = other.states[static_cast<std::size_t>(step)];
    if (!s.valid) continue;
    const double d = (s.Position2() - pos).Norm();
    if (d > max_dist) continue;
    if (d < best_dist || (d == best_dist && best != nullptr &&
                          other.id < best->id)) {
      best = &other;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace

std::vector<InteractionLabel> MineInteractivePairs(const Scenario& scenario,
                                                   const MiningConfig& cfg) {
  std::map<InteractionKind, NearestPicker> pickers;
  auto offer = [&](InteractionKind kind, PairCandidate c) {
    pickers.try_emplace(kind, cfg.anchor_time).first->second.Offer(c);
  };

  const std::vector<Track>& tracks = scenario.tracks;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    for (std::size_t j = i + 1; j < tracks.size(); ++j) {
      const Track& a = tracks[i];
      const Track& b = tracks[j];

      // Vulnerable-user encounters: nearest-approach step within range,
      // vehicle listed first.
      const bool ped_veh =
          (a.type == ObjectType::kPedestrian && b.type == ObjectType::kVehicle) ||
          (a.type == ObjectType::kVehicle && b.type == ObjectType::kPedestrian);
      const bool cyc_veh =
          (a.type == ObjectType::kCyclist && b.type == ObjectType::kVehicle) ||
          (a.type == ObjectType::kVehicle && b.type == ObjectType::kCyclist);
      if (ped_veh || cyc_veh) {
        const double max_dist = ped_veh ? cfg.pedestrian_vehicle_max_dist
                                        : cfg.cyclist_vehicle_max_dist;
        const auto closest = ClosestStep(a, b);
        if (closest.has_value() && closest->second <= max_dist) {
          const Track& vehicle = a.type == ObjectType::kVehicle ? a : b;
          const Track& other = a.type == ObjectType::kVehicle ? b : a;
          offer(ped_veh ? InteractionKind::kPedestrianVehicle
                        : InteractionKind::kCyclistVehicle,
                {vehicle.id, other.id, closest->first * cfg.step_period});
        }
      }

      // Generic close approach, any types, ids in sorted order.
      const auto closest = ClosestStep(a, b);
      if (closest.has_value() && closest->second <= cfg.close_proximity_max_dist) {
        offer(InteractionKind::kCloseProximity,
              {std::min(a.id, b.id), std::max(a.id, b.id),
               closest->first * cfg.step_period});
      }

      // Path crossings within the arrival-gap window, classified by heading
      // difference at the crossing.
      const std::optional<CrossingInfo> crossing =
          CrossedPaths(a, b, cfg.step_period);
      if (crossing.has_value() && crossing->time_gap <= cfg.crossing_max_gap) {
        const double event = 0.5 * (crossing->time_a + crossing->time_b);
        const double hd = crossing->heading_diff;
        const double net_a = NetHeadingChange(a);
        const double net_b = NetHeadingChange(b);
        if (hd > cfg.merge_min_heading && hd <= cfg.merge_max_heading) {
          const bool a_first = crossing->time_a < crossing->time_b ||
                               (crossing->time_a == crossing->time_b &&
                                a.id < b.id);
          offer(InteractionKind::kMerge,
                {a_first ? a.id : b.id, a_first ? b.id : a.id, event});
        } else if (hd >= cfg.unprotected_min_heading) {
          const bool a_first = std::abs(net_a) > std::abs(net_b) ||
                               (std::abs(net_a) == std::abs(net_b) &&
                                a.id < b.id);
          offer(InteractionKind::kUnprotectedTurn,
                {a_first ? a.id : b.id, a_first ? b.id : a.id, event});
        } else if (hd > cfg.merge_max_heading &&
                   hd < cfg.unprotected_min_heading) {
          const bool a_turns = std::abs(net_a) > std::abs(net_b) ||
                               (std::abs(net_a) == std::abs(net_b) &&
                                a.id < b.id);
          const Track& turner = a_turns ? a : b;
          const Track& straight = a_turns ? b : a;
          const double net = a_turns ? net_a : net_b;
          if (std::abs(net) >= cfg.turn_min_net_heading) {
            offer(net > 0 ? InteractionKind::kIntersectionLeftTurn
                          : InteractionKind::kIntersectionRightTurn,
                  {turner.id, straight.id, event});
          }
        }
      }
    }
  }

  // Lane changes: the changer paired with its nearest neighbor at the event.
  bool lanes_available = true;
  for (const Track& track : tracks) {
    if (!lanes_available) break;
    std::vector<int> events;
    try {
      events = DetectLaneChanges(track, scenario.map_features,
                                 cfg.lane_assignment_max_dist);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNoLanes) {
        lanes_available = false;
        break;
      }
      throw;
    }
    for (const int step : events) {
      const Track* partner =
          NearestPartner(scenario, track, step, cfg.pairing_max_dist);
      if (partner == nullptr) continue;
      offer(InteractionKind::kLaneChange,
            {track.id, partner->id, step * cfg.step_period});
    }
  }

  // Hard braking or swerving: strongest-acceleration step, nearest neighbor
  // as witness partner.
  for (const Track& track : tracks) {
    const std::vector<int> steps = HighAccelerationSteps(
        track, cfg.high_accel_threshold, cfg.step_period);
    if (steps.empty()) continue;
    int peak_step = steps.front();
    double peak = -1.0;
    for (const int t : steps) {
      const Vec2 dv = track.states[static_cast<std::size_t>(t + 1)].Velocity() -
                      track.states[static_cast<std::size_t>(t - 1)].Velocity();
      const double accel = dv.Norm() / (2.0 * cfg.step_period);
      if (accel > peak) {
        peak = accel;
        peak_step = t;
      }
    }
    const Track* partner =
        NearestPartner(scenario, track, peak_step, cfg.pairing_max_dist);
    if (partner == nullptr) continue;
    offer(InteractionKind::kHighAcceleration,
          {track.id, partner->id, peak_step * cfg.step_period});
  }

  std::vector<InteractionLabel> labels;
  for (const auto& [kind, picker] : pickers) {
    if (!picker.best().has_value()) continue;
    labels.push_back({picker.best()->first, picker.best()->second, kind,
                      picker.best()->time});
  }
  return labels;
}

}  // namespace trajeval
