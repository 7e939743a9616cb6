// Copyright 2026 The qosjit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Synthetic vehicle-measurement traces: a vehicle moves along a 1-D track
// away from a base station, the deliverable link rate follows a
// rate-distance map, and a constant-rate UDP source is pushed through a
// FCFS queue whose service rate tracks the link. One log row per second.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qos/error.hpp"
#include "qos/log_format.hpp"
#include "qos/metrics.hpp"
#include "qos/queue_sim.hpp"
#include "qos/rng.hpp"

namespace qos {

enum class Interpolation { kStep, kLinear };

struct RateAnchor {
  double distance_m;
  double rate_Bps;
};

struct DistanceInterval {
  double begin_m;
  double end_m;
  bool Contains(double d) const { return d >= begin_m && d <= end_m; }
};

// Deliverable rate as a function of distance to the base station.
//
// Before the first anchor the first rate applies. Past the last anchor the
// rate is zero, unless `range_limit_m` is set, in which case the last
// anchor's rate holds out to that distance.
struct RateDistanceMap {
  std::vector<RateAnchor> anchors;
  Interpolation interpolation = Interpolation::kLinear;
  std::vector<DistanceInterval> mask_zones;
  std::optional<double> range_limit_m;

  void Validate() const {
    if (anchors.empty()) {
      throw Error(ErrorKind::kDomain, "rate map needs at least one anchor");
    }
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      if (!(anchors[i].rate_Bps >= 0.0) || !std::isfinite(anchors[i].rate_Bps)) {
        throw Error(ErrorKind::kDomain, "rate map anchor " + std::to_string(i) +
                                            " has a negative rate");
      }
      if (!(anchors[i].distance_m >= 0.0)) {
        throw Error(ErrorKind::kDomain, "rate map anchor " + std::to_string(i) +
                                            " has a negative distance");
      }
      if (i > 0 && !(anchors[i].distance_m > anchors[i - 1].distance_m)) {
        throw Error(ErrorKind::kDomain,
                    "rate map distances must be strictly increasing");
      }
      if (i > 0 && anchors[i].rate_Bps > anchors[i - 1].rate_Bps) {
        throw Error(ErrorKind::kDomain,
                    "rate map must be non-increasing in distance");
      }
    }
    for (const auto& z : mask_zones) {
      if (!(z.begin_m <= z.end_m)) {
        throw Error(ErrorKind::kDomain, "mask zone with begin > end");
      }
    }
    if (range_limit_m && !(*range_limit_m >= anchors.back().distance_m)) {
      throw Error(ErrorKind::kDomain,
                  "range limit must not precede the last anchor");
    }
  }
};

// Synthetic calibration: >800 kB/s close in, 200-800 kB/s at the far end
// of the 540-1570 m track, no service beyond 2 km.
inline RateDistanceMap DefaultRateMap() {
  RateDistanceMap m;
  m.anchors = {{540.0, 1'000'000.0},
               {800.0, 820'000.0},
               {1200.0, 450'000.0},
               {1570.0, 230'000.0}};
  m.interpolation = Interpolation::kLinear;
  m.range_limit_m = 2000.0;
  return m;
}

inline double RateAtDistance(const RateDistanceMap& map, double dist_m) {
  if (!(dist_m >= 0.0)) {
    throw Error(ErrorKind::kDomain, "distance must be non-negative");
  }
  for (const auto& z : map.mask_zones) {
    if (z.Contains(dist_m)) return 0.0;
  }
  const auto& a = map.anchors;
  if (a.empty()) return 0.0;
  if (dist_m <= a.front().distance_m) return a.front().rate_Bps;
  if (dist_m > a.back().distance_m) {
    return map.range_limit_m && dist_m <= *map.range_limit_m ? a.back().rate_Bps
                                                             : 0.0;
  }
  // First anchor strictly beyond dist_m.
  const auto hi = std::upper_bound(
      a.begin(), a.end(), dist_m,
      [](double d, const RateAnchor& anchor) { return d < anchor.distance_m; });
  if (hi == a.end()) return a.back().rate_Bps;  // exactly at the last anchor
  const auto lo = hi - 1;
  if (map.interpolation == Interpolation::kStep) return lo->rate_Bps;
  const double f = (dist_m - lo->distance_m) / (hi->distance_m - lo->distance_m);
  return lo->rate_Bps + f * (hi->rate_Bps - lo->rate_Bps);
}

struct SpeedStep {
  double start_s;
  double speed_kmh;
};

// Piecewise-constant: the last step starting at or before t.
inline double SpeedAt(std::span<const SpeedStep> profile, double t_s) {
  if (profile.empty()) {
    throw Error(ErrorKind::kDomain, "speed profile is empty");
  }
  if (t_s < profile.front().start_s) {
    throw Error(ErrorKind::kDomain, "time precedes the first speed step");
  }
  const auto it = std::upper_bound(
      profile.begin(), profile.end(), t_s,
      [](double t, const SpeedStep& s) { return t < s.start_s; });
  return (it - 1)->speed_kmh;
}

// 60 s steps cycling 10, 20, 30, 40, 50, 40, 30, 20, 10, ... km/h.
inline std::vector<SpeedStep> DefaultVariableSpeedProfile(double duration_s,
                                                          double step_s = 60.0) {
  static constexpr double kCycle[] = {10, 20, 30, 40, 50, 40, 30, 20};
  std::vector<SpeedStep> out;
  std::size_t k = 0;
  for (double t = 0.0; t < duration_s || out.empty(); t += step_s, ++k) {
    out.push_back({t, kCycle[k % std::size(kCycle)]});
  }
  return out;
}

// Back-and-forth motion between two distances.
class TrackWalker {
 public:
  TrackWalker(double min_m, double max_m, double start_m)
      : min_(min_m), max_(max_m), pos_(start_m) {}

  double position() const { return pos_; }

  // Moves `meters` along the track, reflecting at both ends.
  void Advance(double meters) {
    const double span = max_ - min_;
    if (span <= 0.0) return;
    double rem = std::fmod(meters, 2.0 * span);
    while (rem > 0.0) {
      const double room = dir_ > 0 ? max_ - pos_ : pos_ - min_;
      if (rem <= room) {
        pos_ += dir_ * rem;
        break;
      }
      pos_ = dir_ > 0 ? max_ : min_;
      rem -= room;
      dir_ = -dir_;
    }
  }

 private:
  double min_, max_, pos_;
  double dir_ = 1.0;
};

enum class ScenarioKind { kStatic, kConstantSpeed, kVariableSpeed };

inline const char* ToString(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::kStatic: return "static";
    case ScenarioKind::kConstantSpeed: return "constant_speed";
    case ScenarioKind::kVariableSpeed: return "variable_speed";
  }
  return "?";
}

struct MobilityScenario {
  ScenarioKind kind = ScenarioKind::kStatic;
  double duration_s = 600.0;
  double static_dist_m = 1570.0;
  std::vector<SpeedStep> speed_profile = {{0.0, 0.0}};
  double track_min_m = 540.0;
  double track_max_m = 1570.0;
  RateDistanceMap rate_map = DefaultRateMap();
  std::uint64_t seed = kDefaultSeed;

  // Traffic source and queue.
  double offered_Bps = 1'200'000.0;
  double packet_bytes = 1000.0;
  std::size_t buffer_packets = 64;

  // Log rendering.
  std::int64_t start_unix_s = 1'275'350'400;  // 2010-06-01T00:00:00Z
  double origin_lat_deg = 43.6291;
  double origin_lon_deg = 1.3638;
  double bearing_deg = 90.0;
  std::uint32_t integrity = 1;

  void Validate() const {
    if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) {
      throw Error(ErrorKind::kDomain, "duration must be finite and >= 0");
    }
    if (!(track_min_m > 0.0 && track_min_m < track_max_m)) {
      throw Error(ErrorKind::kDomain, "track bounds need 0 < min < max");
    }
    if (kind == ScenarioKind::kStatic && !(static_dist_m >= 0.0)) {
      throw Error(ErrorKind::kDomain, "static distance must be >= 0");
    }
    if (kind != ScenarioKind::kStatic) {
      if (speed_profile.empty()) {
        throw Error(ErrorKind::kDomain, "speed profile is empty");
      }
      for (std::size_t i = 0; i < speed_profile.size(); ++i) {
        if (!(speed_profile[i].speed_kmh >= 0.0)) {
          throw Error(ErrorKind::kDomain, "negative speed in profile");
        }
        if (i > 0 && !(speed_profile[i].start_s > speed_profile[i - 1].start_s)) {
          throw Error(ErrorKind::kDomain, "speed steps must be time-ordered");
        }
      }
      if (speed_profile.front().start_s > 0.0) {
        throw Error(ErrorKind::kDomain, "speed profile must start at t <= 0");
      }
    }
    if (!(offered_Bps > 0.0) || !(packet_bytes > 0.0)) {
      throw Error(ErrorKind::kDomain, "offered rate and packet size must be > 0");
    }
    if (buffer_packets == 0) {
      throw Error(ErrorKind::kDomain, "buffer must hold at least one packet");
    }
    rate_map.Validate();
  }
};

inline MobilityScenario StaticScenario(double dist_m = 1570.0,
                                       double duration_s = 600.0,
                                       std::uint64_t seed = kDefaultSeed) {
  MobilityScenario s;
  s.kind = ScenarioKind::kStatic;
  s.static_dist_m = dist_m;
  s.duration_s = duration_s;
  s.seed = seed;
  return s;
}

inline MobilityScenario ConstantSpeedScenario(double speed_kmh = 50.0,
                                              double duration_s = 600.0,
                                              std::uint64_t seed = kDefaultSeed) {
  MobilityScenario s;
  s.kind = ScenarioKind::kConstantSpeed;
  s.speed_profile = {{0.0, speed_kmh}};
  s.duration_s = duration_s;
  s.seed = seed;
  return s;
}

inline MobilityScenario VariableSpeedScenario(double duration_s = 1200.0,
                                              std::uint64_t seed = kDefaultSeed) {
  MobilityScenario s;
  s.kind = ScenarioKind::kVariableSpeed;
  s.speed_profile = DefaultVariableSpeedProfile(duration_s);
  s.duration_s = duration_s;
  s.seed = seed;
  return s;
}

// Vehicle distance and speed at the start of each second.
struct KinematicSample {
  double dist_m;
  double speed_kmh;
};

inline std::vector<KinematicSample> ScenarioKinematics(
    const MobilityScenario& s) {
  const auto seconds = static_cast<std::size_t>(std::ceil(s.duration_s));
  std::vector<KinematicSample> out;
  out.reserve(seconds);
  if (s.kind == ScenarioKind::kStatic) {
    out.assign(seconds, {s.static_dist_m, 0.0});
    return out;
  }
  TrackWalker walker(s.track_min_m, s.track_max_m, s.track_min_m);
  for (std::size_t n = 0; n < seconds; ++n) {
    const double v = SpeedAt(s.speed_profile, static_cast<double>(n));
    out.push_back({walker.position(), v});
    walker.Advance(v / 3.6);
  }
  return out;
}

// Straight-bearing projection from the base-station origin.
inline void ProjectDistance(const MobilityScenario& s, double dist_m,
                            double& lat_deg, double& lon_deg) {
  constexpr double kEarthRadiusM = 6'371'000.0;
  constexpr double kDeg = 180.0 / std::numbers::pi;
  const double b = s.bearing_deg / kDeg;
  lat_deg = s.origin_lat_deg + kDeg * dist_m * std::cos(b) / kEarthRadiusM;
  lon_deg = s.origin_lon_deg +
            kDeg * dist_m * std::sin(b) /
                (kEarthRadiusM * std::cos(s.origin_lat_deg / kDeg));
}

// One row per second. Queue state carries across seconds: the link serves
// work at the rate of the current second, so a rate drop builds a backlog
// that drains later.
//
// Per row: throughput counts deliveries completed in that second; jitter is
// the mean |IPDV| over consecutive deliveries within that second (0 when
// fewer than two); loss counters refer to packets sent in that second that
// are tail-dropped or never served.
inline std::vector<QosLogRow> SynthMobilityTrace(const MobilityScenario& s) {
  s.Validate();
  if (!(s.duration_s >= 1.0)) {
    throw Error(ErrorKind::kEmptyRun, "scenario duration is zero");
  }
  const auto kin = ScenarioKinematics(s);
  const std::size_t seconds = kin.size();
  std::vector<double> capacity(seconds);
  for (std::size_t n = 0; n < seconds; ++n) {
    capacity[n] = RateAtDistance(s.rate_map, kin[n].dist_m) / s.packet_bytes;
  }

  FcfsQueue queue(PiecewiseCapacity(capacity), s.buffer_packets);
  Rng rng(s.seed);
  const double lambda = s.offered_Bps / s.packet_bytes;
  std::vector<std::uint64_t> total(seconds, 0), lost(seconds, 0),
      delivered(seconds, 0);
  std::vector<AbsIpdvAccumulator> jitter(seconds);
  const double horizon = static_cast<double>(seconds);
  for (double t = rng.Exponential(lambda); t < horizon;
       t += rng.Exponential(lambda)) {
    const double work = rng.Exponential(1.0);
    const Admission a = queue.Offer(t, work);
    const auto sent = static_cast<std::size_t>(t);
    ++total[sent];
    if (a.dropped || !std::isfinite(a.departure)) {
      ++lost[sent];
      continue;
    }
    if (a.departure < horizon) {
      const auto got = static_cast<std::size_t>(a.departure);
      ++delivered[got];
      jitter[got].Add(a.departure - t);
    }
  }

  std::vector<QosLogRow> rows(seconds);
  for (std::size_t n = 0; n < seconds; ++n) {
    QosLogRow& r = rows[n];
    r.t_unix_s = s.start_unix_s + static_cast<std::int64_t>(n);
    double lat = 0.0, lon = 0.0;
    ProjectDistance(s, kin[n].dist_m, lat, lon);
    r.lat_deg = CanonicalLogFloat(lat);
    r.lon_deg = CanonicalLogFloat(lon);
    r.integrity = s.integrity;
    r.dist_m = CanonicalLogFloat(kin[n].dist_m);
    r.speed_kmh = CanonicalLogFloat(kin[n].speed_kmh);
    r.tput_Bps =
        CanonicalLogFloat(static_cast<double>(delivered[n]) * s.packet_bytes);
    r.jitter_ms =
        jitter[n].pairs() ? CanonicalLogFloat(1000.0 * jitter[n].mean()) : 0.0;
    r.lost_pkts = lost[n];
    r.total_pkts = total[n];
  }
  return rows;
}

}  // namespace qos
