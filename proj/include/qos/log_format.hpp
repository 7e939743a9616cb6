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

// Canonical per-second QoS field log.
//
//   t_unix_s,lat_deg,lon_deg,integrity,dist_m,speed_kmh,tput_Bps,jitter_ms,lost_pkts,total_pkts
//
// UTF-8, '\n' line endings, floats with at most 9 significant digits
// (printf "%.9g"), counts as plain decimal integers.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qos/error.hpp"

namespace qos {

inline constexpr std::string_view kLogHeader =
    "t_unix_s,lat_deg,lon_deg,integrity,dist_m,speed_kmh,tput_Bps,jitter_ms,"
    "lost_pkts,total_pkts";

struct QosLogRow {
  std::int64_t t_unix_s = 0;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  std::uint32_t integrity = 0;
  double dist_m = 0.0;
  double speed_kmh = 0.0;
  double tput_Bps = 0.0;
  double jitter_ms = 0.0;
  std::uint64_t lost_pkts = 0;
  std::uint64_t total_pkts = 0;

  double loss_fraction() const {
    return total_pkts == 0 ? 0.0
                           : static_cast<double>(lost_pkts) /
                                 static_cast<double>(total_pkts);
  }

  bool operator==(const QosLogRow&) const = default;
};

inline std::string FormatLogFloat(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// The value a row field takes after a write/parse cycle.
inline double CanonicalLogFloat(double v) {
  return std::strtod(FormatLogFloat(v).c_str(), nullptr);
}

// Empty when the row is valid, otherwise the reason.
inline std::optional<std::string> CheckRow(const QosLogRow& r) {
  auto bad = [](double v) { return !std::isfinite(v); };
  if (bad(r.lat_deg) || r.lat_deg < -90.0 || r.lat_deg > 90.0) {
    return "lat_deg outside [-90, 90]";
  }
  if (bad(r.lon_deg) || r.lon_deg < -180.0 || r.lon_deg > 180.0) {
    return "lon_deg outside [-180, 180]";
  }
  if (bad(r.dist_m) || r.dist_m < 0.0) return "dist_m must be >= 0";
  if (bad(r.speed_kmh) || r.speed_kmh < 0.0) return "speed_kmh must be >= 0";
  if (bad(r.tput_Bps) || r.tput_Bps < 0.0) return "tput_Bps must be >= 0";
  if (bad(r.jitter_ms) || r.jitter_ms < 0.0) return "jitter_ms must be >= 0";
  if (r.lost_pkts > r.total_pkts) return "lost_pkts exceeds total_pkts";
  return std::nullopt;
}

inline std::string WriteLog(std::span<const QosLogRow> rows) {
  std::string out(kLogHeader);
  out += '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (auto why = CheckRow(r)) {
      throw Error(ErrorKind::kDomain,
                  "row " + std::to_string(i) + ": " + *why);
    }
    if (i > 0 && r.t_unix_s <= rows[i - 1].t_unix_s) {
      throw Error(ErrorKind::kOrdering,
                  "row " + std::to_string(i) + ": timestamp not increasing");
    }
    out += std::to_string(r.t_unix_s);
    for (double v : {r.lat_deg, r.lon_deg}) {
      out += ',';
      out += FormatLogFloat(v);
    }
    out += ',';
    out += std::to_string(r.integrity);
    for (double v : {r.dist_m, r.speed_kmh, r.tput_Bps, r.jitter_ms}) {
      out += ',';
      out += FormatLogFloat(v);
    }
    out += ',';
    out += std::to_string(r.lost_pkts);
    out += ',';
    out += std::to_string(r.total_pkts);
    out += '\n';
  }
  return out;
}

namespace detail {

template <typename T>
T ParseField(std::string_view field, std::size_t line, const char* name) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorKind::kParse,
                "line " + std::to_string(line) + ": malformed " + name + " '" +
                    std::string(field) + "'");
  }
  return value;
}

}  // namespace detail

// Parses and validates a canonical log. Errors name the 1-based line.
inline std::vector<QosLogRow> ParseLog(std::string_view text) {
  std::vector<QosLogRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kLogHeader) {
        throw Error(ErrorKind::kParse, "line 1: unexpected header");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) {
      throw Error(ErrorKind::kParse,
                  "line " + std::to_string(line_no) + ": empty line");
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string_view::npos) {
        f.push_back(line.substr(start));
        break;
      }
      f.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (f.size() != 10) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) +
                                         ": expected 10 fields, got " +
                                         std::to_string(f.size()));
    }
    QosLogRow r;
    r.t_unix_s = detail::ParseField<std::int64_t>(f[0], line_no, "t_unix_s");
    r.lat_deg = detail::ParseField<double>(f[1], line_no, "lat_deg");
    r.lon_deg = detail::ParseField<double>(f[2], line_no, "lon_deg");
    r.integrity = detail::ParseField<std::uint32_t>(f[3], line_no, "integrity");
    r.dist_m = detail::ParseField<double>(f[4], line_no, "dist_m");
    r.speed_kmh = detail::ParseField<double>(f[5], line_no, "speed_kmh");
    r.tput_Bps = detail::ParseField<double>(f[6], line_no, "tput_Bps");
    r.jitter_ms = detail::ParseField<double>(f[7], line_no, "jitter_ms");
    r.lost_pkts = detail::ParseField<std::uint64_t>(f[8], line_no, "lost_pkts");
    r.total_pkts =
        detail::ParseField<std::uint64_t>(f[9], line_no, "total_pkts");
    if (auto why = CheckRow(r)) {
      throw Error(ErrorKind::kParse,
                  "line " + std::to_string(line_no) + ": " + *why);
    }
    if (!rows.empty() && r.t_unix_s <= rows.back().t_unix_s) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) +
                                         ": timestamp not strictly increasing");
    }
    rows.push_back(r);
  }
  if (!header_seen) throw Error(ErrorKind::kParse, "line 1: missing header");
  return rows;
}

}  // namespace qos
