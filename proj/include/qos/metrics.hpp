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

// QoS estimators shared by the simulator and by field-log analysis:
// IP packet delay variation, mean absolute jitter, windowed throughput,
// loss rate and correlation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qos/error.hpp"
#include "qos/rng.hpp"

namespace qos {

// Sojourn times, in seconds, of consecutively delivered packets of one flow.
class DelaySeries {
 public:
  DelaySeries() = default;
  explicit DelaySeries(std::vector<double> delays) : delays_(std::move(delays)) {
    for (std::size_t i = 0; i < delays_.size(); ++i) {
      if (!std::isfinite(delays_[i]) || delays_[i] < 0.0) {
        throw Error(ErrorKind::kDomain,
                    "delay " + std::to_string(i) + " is negative or not finite");
      }
    }
  }

  std::span<const double> values() const { return delays_; }
  std::size_t size() const { return delays_.size(); }

 private:
  std::vector<double> delays_;
};

// Running mean of |T_{j+1} - T_j|. The simulator and MeanAbsJitter both go
// through this so that they agree bit for bit on the same data.
class AbsIpdvAccumulator {
 public:
  void Add(double delay) {
    if (previous_) {
      sum_ += std::abs(delay - *previous_);
      ++pairs_;
    }
    previous_ = delay;
  }

  // Forget the previous delay; the next Add() starts a new pair chain.
  void Break() { previous_.reset(); }

  std::uint64_t pairs() const { return pairs_; }
  double sum() const { return sum_; }
  double mean() const {
    return pairs_ == 0 ? std::numeric_limits<double>::quiet_NaN()
                       : sum_ / static_cast<double>(pairs_);
  }

 private:
  std::optional<double> previous_;
  double sum_ = 0.0;
  std::uint64_t pairs_ = 0;
};

inline std::vector<double> IpdvSeries(const DelaySeries& delays) {
  const auto d = delays.values();
  if (d.size() < 2) {
    throw Error(ErrorKind::kInsufficientData,
                "IPDV needs at least 2 delays, got " + std::to_string(d.size()));
  }
  std::vector<double> out(d.size() - 1);
  for (std::size_t j = 0; j + 1 < d.size(); ++j) out[j] = d[j + 1] - d[j];
  return out;
}

struct JitterEstimate {
  double mean_abs_ipdv;
  std::size_t n_samples;
  // Percentile bootstrap over |IPDV| samples. IPDV samples are serially
  // dependent, so treat the interval as approximate.
  double ci95_halfwidth;
  double ci95_low;
  double ci95_high;
};

struct BootstrapOptions {
  int resamples = 1000;
  std::uint64_t seed = kDefaultSeed;
};

inline JitterEstimate MeanAbsJitter(const DelaySeries& delays,
                                    const BootstrapOptions& opt = {}) {
  const auto d = delays.values();
  if (d.size() < 2) {
    throw Error(ErrorKind::kInsufficientData,
                "jitter needs at least 2 delays, got " +
                    std::to_string(d.size()));
  }
  AbsIpdvAccumulator acc;
  for (double v : d) acc.Add(v);
  JitterEstimate est{acc.mean(), static_cast<std::size_t>(acc.pairs()),
                     std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN()};
  if (opt.resamples <= 0) return est;

  const std::size_t n = d.size() - 1;
  std::vector<double> abs_ipdv(n);
  for (std::size_t j = 0; j < n; ++j) abs_ipdv[j] = std::abs(d[j + 1] - d[j]);
  Rng rng(opt.seed);
  std::vector<double> means(static_cast<std::size_t>(opt.resamples));
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += abs_ipdv[rng.Index(n)];
    m = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(means.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, means.size() - 1);
    return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
  };
  est.ci95_low = quantile(0.025);
  est.ci95_high = quantile(0.975);
  est.ci95_halfwidth = 0.5 * (est.ci95_high - est.ci95_low);
  return est;
}

struct Delivery {
  double time;
  double amount;  // bits, bytes or packets; rates come out in the same unit
};

struct WindowRate {
  double window_start;
  double rate;
};

// Tumbling windows covering [begin, end). Deliveries outside are ignored.
inline std::vector<WindowRate> WindowedThroughput(
    std::span<const Delivery> deliveries, double window_seconds, double begin,
    double end) {
  if (!(window_seconds > 0.0)) {
    throw Error(ErrorKind::kDomain, "window must be positive");
  }
  if (!(end >= begin)) {
    throw Error(ErrorKind::kDomain, "window range end precedes begin");
  }
  for (std::size_t i = 1; i < deliveries.size(); ++i) {
    if (deliveries[i].time < deliveries[i - 1].time) {
      throw Error(ErrorKind::kOrdering,
                  "delivery " + std::to_string(i) + " precedes its predecessor");
    }
  }
  const auto count = static_cast<std::size_t>(
      std::ceil((end - begin) / window_seconds - 1e-12));
  std::vector<double> totals(count, 0.0);
  for (const auto& d : deliveries) {
    if (d.time < begin || d.time >= end) continue;
    auto w = static_cast<std::size_t>((d.time - begin) / window_seconds);
    totals[std::min(w, count - 1)] += d.amount;
  }
  std::vector<WindowRate> out(count);
  for (std::size_t w = 0; w < count; ++w) {
    out[w] = {begin + static_cast<double>(w) * window_seconds,
              totals[w] / window_seconds};
  }
  return out;
}

// Range inferred from the data: window-aligned, covering every delivery.
inline std::vector<WindowRate> WindowedThroughput(
    std::span<const Delivery> deliveries, double window_seconds) {
  if (deliveries.empty()) return {};
  if (!(window_seconds > 0.0)) {
    throw Error(ErrorKind::kDomain, "window must be positive");
  }
  const double begin =
      std::floor(deliveries.front().time / window_seconds) * window_seconds;
  const double last = deliveries.back().time;
  const double end =
      begin + (std::floor((last - begin) / window_seconds) + 1) * window_seconds;
  return WindowedThroughput(deliveries, window_seconds, begin, end);
}

inline double LossRate(std::uint64_t offered, std::uint64_t delivered) {
  if (offered == 0) {
    throw Error(ErrorKind::kDomain, "no packets offered");
  }
  if (delivered > offered) {
    throw Error(ErrorKind::kInconsistency,
                "delivered count exceeds offered count");
  }
  return static_cast<double>(offered - delivered) /
         static_cast<double>(offered);
}

struct SeriesStats {
  double pearson_r;
  double spearman_rho;
  std::size_t n;
};

// 1-based ranks; tied values share the average of the ranks they span.
inline std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

namespace detail {

inline double Pearson(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

inline bool IsConstant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

}  // namespace detail

inline SeriesStats Correlate(std::span<const double> a,
                             std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kInconsistency,
                "series lengths differ (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  if (a.size() < 3) {
    throw Error(ErrorKind::kInsufficientData,
                "correlation needs at least 3 pairs");
  }
  if (detail::IsConstant(a) || detail::IsConstant(b)) {
    throw Error(ErrorKind::kDegenerate, "correlation of a constant series");
  }
  const auto ra = AverageRanks(a);
  const auto rb = AverageRanks(b);
  return {detail::Pearson(a, b), detail::Pearson(ra, rb), a.size()};
}

}  // namespace qos
