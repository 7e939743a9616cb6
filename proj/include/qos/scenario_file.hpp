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

// Flat `key = value` scenario files. '#' starts a comment. Keys:
//
//   kind            static | constant_speed | variable_speed
//   duration_s      seconds
//   static_dist_m   distance for the static kind
//   speed_kmh       shorthand for a one-step profile
//   speed_profile   "start_s:kmh, ..." or "default" (60 s steps, 10-50 km/h)
//   track_min_m, track_max_m
//   rate_map        "dist_m:rate_Bps, ..." or "default"
//   interpolation   linear | step
//   mask_zones      "begin_m-end_m, ..."
//   range_limit_m   distance beyond which the rate is zero ("none" to clear)
//   seed, offered_Bps, packet_bytes, buffer_packets
//   start_unix_s, origin_lat_deg, origin_lon_deg, bearing_deg, integrity
//
// Unset keys keep the MobilityScenario defaults.

#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qos/error.hpp"
#include "qos/log_format.hpp"
#include "qos/mobility.hpp"

namespace qos {

namespace detail {

inline std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> SplitList(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto p = s.find(sep);
    const auto item = Trim(s.substr(0, p));
    if (!item.empty()) out.push_back(item);
    if (p == std::string_view::npos) break;
    s.remove_prefix(p + 1);
  }
  return out;
}

template <typename T>
T ParseScenarioNumber(std::string_view v, std::size_t line,
                      std::string_view key) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorKind::kParse, "scenario line " + std::to_string(line) +
                                       ": bad value for " + std::string(key) +
                                       " '" + std::string(v) + "'");
  }
  return out;
}

inline std::pair<double, double> ParsePair(std::string_view item, char sep,
                                           std::size_t line,
                                           std::string_view key) {
  const auto p = item.find(sep, sep == '-' ? 1 : 0);
  if (p == std::string_view::npos) {
    throw Error(ErrorKind::kParse, "scenario line " + std::to_string(line) +
                                       ": expected a" + std::string(1, sep) +
                                       "b in " + std::string(key));
  }
  return {ParseScenarioNumber<double>(Trim(item.substr(0, p)), line, key),
          ParseScenarioNumber<double>(Trim(item.substr(p + 1)), line, key)};
}

}  // namespace detail

inline MobilityScenario ParseScenario(std::string_view text) {
  using detail::ParseScenarioNumber;
  MobilityScenario s;
  bool profile_default = false;
  std::size_t line_no = 0;
  for (std::string_view rest = text; !rest.empty();) {
    const auto eol = rest.find('\n');
    std::string_view line = rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::kParse,
                  "scenario line " + std::to_string(line_no) + ": missing '='");
    }
    const auto key = detail::Trim(line.substr(0, eq));
    const auto val = detail::Trim(line.substr(eq + 1));
    auto num = [&](auto tag) {
      return ParseScenarioNumber<decltype(tag)>(val, line_no, key);
    };
    if (key == "kind") {
      if (val == "static") s.kind = ScenarioKind::kStatic;
      else if (val == "constant_speed") s.kind = ScenarioKind::kConstantSpeed;
      else if (val == "variable_speed") s.kind = ScenarioKind::kVariableSpeed;
      else throw Error(ErrorKind::kParse, "scenario line " +
                                              std::to_string(line_no) +
                                              ": unknown kind");
    } else if (key == "duration_s") {
      s.duration_s = num(0.0);
    } else if (key == "static_dist_m") {
      s.static_dist_m = num(0.0);
    } else if (key == "speed_kmh") {
      s.speed_profile = {{0.0, num(0.0)}};
    } else if (key == "speed_profile") {
      if (val == "default") {
        profile_default = true;
      } else {
        s.speed_profile.clear();
        for (auto item : detail::SplitList(val, ',')) {
          auto [t, v] = detail::ParsePair(item, ':', line_no, key);
          s.speed_profile.push_back({t, v});
        }
      }
    } else if (key == "track_min_m") {
      s.track_min_m = num(0.0);
    } else if (key == "track_max_m") {
      s.track_max_m = num(0.0);
    } else if (key == "rate_map") {
      if (val == "default") {
        s.rate_map.anchors = DefaultRateMap().anchors;
      } else {
        s.rate_map.anchors.clear();
        for (auto item : detail::SplitList(val, ',')) {
          auto [d, r] = detail::ParsePair(item, ':', line_no, key);
          s.rate_map.anchors.push_back({d, r});
        }
      }
    } else if (key == "interpolation") {
      if (val == "linear") s.rate_map.interpolation = Interpolation::kLinear;
      else if (val == "step") s.rate_map.interpolation = Interpolation::kStep;
      else throw Error(ErrorKind::kParse, "scenario line " +
                                              std::to_string(line_no) +
                                              ": unknown interpolation");
    } else if (key == "mask_zones") {
      s.rate_map.mask_zones.clear();
      for (auto item : detail::SplitList(val, ',')) {
        auto [b, e] = detail::ParsePair(item, '-', line_no, key);
        s.rate_map.mask_zones.push_back({b, e});
      }
    } else if (key == "range_limit_m") {
      if (val == "none") s.rate_map.range_limit_m.reset();
      else s.rate_map.range_limit_m = num(0.0);
    } else if (key == "seed") {
      s.seed = num(std::uint64_t{});
    } else if (key == "offered_Bps") {
      s.offered_Bps = num(0.0);
    } else if (key == "packet_bytes") {
      s.packet_bytes = num(0.0);
    } else if (key == "buffer_packets") {
      s.buffer_packets = num(std::size_t{});
    } else if (key == "start_unix_s") {
      s.start_unix_s = num(std::int64_t{});
    } else if (key == "origin_lat_deg") {
      s.origin_lat_deg = num(0.0);
    } else if (key == "origin_lon_deg") {
      s.origin_lon_deg = num(0.0);
    } else if (key == "bearing_deg") {
      s.bearing_deg = num(0.0);
    } else if (key == "integrity") {
      s.integrity = num(std::uint32_t{});
    } else {
      throw Error(ErrorKind::kParse, "scenario line " + std::to_string(line_no) +
                                         ": unknown key '" + std::string(key) +
                                         "'");
    }
  }
  if (profile_default) {
    s.speed_profile = DefaultVariableSpeedProfile(s.duration_s);
  }
  s.Validate();
  return s;
}

// Emits every key, so the output fully determines the scenario.
inline std::string FormatScenario(const MobilityScenario& s) {
  std::ostringstream o;
  auto f = [](double v) { return FormatLogFloat(v); };
  o << "kind = " << ToString(s.kind) << '\n';
  o << "duration_s = " << f(s.duration_s) << '\n';
  o << "static_dist_m = " << f(s.static_dist_m) << '\n';
  o << "speed_profile = ";
  for (std::size_t i = 0; i < s.speed_profile.size(); ++i) {
    o << (i ? ", " : "") << f(s.speed_profile[i].start_s) << ':'
      << f(s.speed_profile[i].speed_kmh);
  }
  o << '\n';
  o << "track_min_m = " << f(s.track_min_m) << '\n';
  o << "track_max_m = " << f(s.track_max_m) << '\n';
  o << "rate_map = ";
  for (std::size_t i = 0; i < s.rate_map.anchors.size(); ++i) {
    o << (i ? ", " : "") << f(s.rate_map.anchors[i].distance_m) << ':'
      << f(s.rate_map.anchors[i].rate_Bps);
  }
  o << '\n';
  o << "interpolation = "
    << (s.rate_map.interpolation == Interpolation::kLinear ? "linear" : "step")
    << '\n';
  o << "mask_zones = ";
  for (std::size_t i = 0; i < s.rate_map.mask_zones.size(); ++i) {
    o << (i ? ", " : "") << f(s.rate_map.mask_zones[i].begin_m) << '-'
      << f(s.rate_map.mask_zones[i].end_m);
  }
  o << '\n';
  o << "range_limit_m = "
    << (s.rate_map.range_limit_m ? f(*s.rate_map.range_limit_m) : "none")
    << '\n';
  o << "seed = " << s.seed << '\n';
  o << "offered_Bps = " << f(s.offered_Bps) << '\n';
  o << "packet_bytes = " << f(s.packet_bytes) << '\n';
  o << "buffer_packets = " << s.buffer_packets << '\n';
  o << "start_unix_s = " << s.start_unix_s << '\n';
  o << "origin_lat_deg = " << f(s.origin_lat_deg) << '\n';
  o << "origin_lon_deg = " << f(s.origin_lon_deg) << '\n';
  o << "bearing_deg = " << f(s.bearing_deg) << '\n';
  o << "integrity = " << s.integrity << '\n';
  return o.str();
}

}  // namespace qos
