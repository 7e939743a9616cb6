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

// Seeded simulator of a single FCFS queue with Poisson arrivals, a tagged
// flow and optional tail-drop buffer.
//
// A single-server FCFS queue needs no general event list: each arrival's
// departure is fixed at admission, max(arrival, previous departure) plus
// its service time. The queue keeps the departure times of the packets
// still in the system so that a finite buffer can be enforced. A departure
// and an arrival at the same instant are ordered departure first.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qos/error.hpp"
#include "qos/metrics.hpp"
#include "qos/rng.hpp"

namespace qos {

enum class Flow : std::uint8_t { kTagged, kBackground };
enum class ServiceDistribution { kExponential, kDeterministic };

inline const char* ToString(Flow f) {
  return f == Flow::kTagged ? "tagged" : "background";
}

inline const char* ToString(ServiceDistribution d) {
  return d == ServiceDistribution::kExponential ? "exponential"
                                                : "deterministic";
}

inline ServiceDistribution ParseServiceDistribution(const std::string& name) {
  if (name == "exponential") return ServiceDistribution::kExponential;
  if (name == "deterministic") return ServiceDistribution::kDeterministic;
  throw Error(ErrorKind::kDomain, "unknown service distribution '" + name + "'");
}

// A link whose service rate (packets/s) may vary with time. Packets carry
// work measured in packets (unit mean); the server drains work at the
// current rate.
template <typename P>
concept CapacityProfile = requires(const P& p, double start, double work) {
  { p.FinishTime(start, work) } -> std::convertible_to<double>;
};

struct ConstantCapacity {
  double rate;
  double FinishTime(double start, double work) const {
    return start + work / rate;
  }
};

// Piecewise-constant rate over consecutive slots of `slot_seconds`
// starting at t = 0. The last slot's rate extends forever. A rate of zero
// stalls the server; work that can never finish gets +infinity.
class PiecewiseCapacity {
 public:
  PiecewiseCapacity(std::vector<double> rates, double slot_seconds = 1.0)
      : rates_(std::move(rates)), slot_(slot_seconds) {
    if (rates_.empty()) {
      throw Error(ErrorKind::kDomain, "capacity profile has no slots");
    }
    for (double r : rates_) {
      if (!(r >= 0.0) || !std::isfinite(r)) {
        throw Error(ErrorKind::kDomain, "capacity must be finite and >= 0");
      }
    }
  }

  double FinishTime(double start, double work) const {
    if (!std::isfinite(start)) return start;
    auto slot = static_cast<std::size_t>(std::max(0.0, std::floor(start / slot_)));
    double t = start;
    while (slot + 1 < rates_.size()) {
      const double slot_end = static_cast<double>(slot + 1) * slot_;
      const double can_serve = rates_[slot] * (slot_end - t);
      if (rates_[slot] > 0.0 && work <= can_serve) {
        return t + work / rates_[slot];
      }
      work -= can_serve;
      t = slot_end;
      ++slot;
    }
    const double tail = rates_.back();
    if (tail <= 0.0) return std::numeric_limits<double>::infinity();
    return t + work / tail;
  }

  std::span<const double> rates() const { return rates_; }

 private:
  std::vector<double> rates_;
  double slot_;
};

struct Admission {
  bool dropped;
  double start;      // service start; NaN when dropped
  double departure;  // NaN when dropped; +inf when the link never serves it
};

// Queue state only; arrivals and work are supplied by the caller.
template <CapacityProfile Profile>
class FcfsQueue {
 public:
  // `buffer_capacity` counts waiting plus in-service packets.
  FcfsQueue(Profile profile, std::optional<std::size_t> buffer_capacity)
      : profile_(std::move(profile)), buffer_(buffer_capacity) {}

  Admission Offer(double arrival_time, double work) {
    while (!in_system_.empty() && in_system_.front() <= arrival_time) {
      in_system_.pop_front();
    }
    if (buffer_ && in_system_.size() >= *buffer_) {
      constexpr double nan = std::numeric_limits<double>::quiet_NaN();
      return {true, nan, nan};
    }
    const double start = std::max(arrival_time, last_departure_);
    const double departure = profile_.FinishTime(start, work);
    last_departure_ = departure;
    in_system_.push_back(departure);
    return {false, start, departure};
  }

  std::size_t in_system() const { return in_system_.size(); }

 private:
  Profile profile_;
  std::optional<std::size_t> buffer_;
  std::deque<double> in_system_;
  double last_departure_ = -std::numeric_limits<double>::infinity();
};

struct SimConfig {
  double capacity = 1000.0;      // packets/s
  double arrival_rate = 500.0;   // packets/s, all flows
  double tagged_fraction = 0.1;
  std::optional<std::size_t> buffer_capacity;  // nullopt: unbounded
  std::uint64_t horizon_packets = 1'000'000;
  double warmup_fraction = 0.1;
  std::uint64_t seed = kDefaultSeed;
  ServiceDistribution service = ServiceDistribution::kExponential;

  double load() const { return arrival_rate / capacity; }

  void Validate() const {
    if (!(capacity > 0.0) || !std::isfinite(capacity)) {
      throw Error(ErrorKind::kDomain, "capacity must be positive and finite");
    }
    if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate)) {
      throw Error(ErrorKind::kDomain, "arrival rate must be positive and finite");
    }
    if (!(tagged_fraction > 0.0 && tagged_fraction <= 1.0)) {
      throw Error(ErrorKind::kDomain, "tagged fraction must lie in (0, 1]");
    }
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 0.5)) {
      throw Error(ErrorKind::kDomain, "warm-up fraction must lie in [0, 0.5)");
    }
    if (buffer_capacity && *buffer_capacity == 0) {
      throw Error(ErrorKind::kDomain, "buffer capacity must be at least 1");
    }
    if (!buffer_capacity && !(arrival_rate < capacity)) {
      throw Error(ErrorKind::kInstability,
                  "unbounded buffer with load " + std::to_string(load()) +
                      " >= 1");
    }
    if (horizon_packets == 0) {
      throw Error(ErrorKind::kEmptyRun, "horizon is zero packets");
    }
  }
};

struct PacketRecord {
  std::uint64_t index;
  Flow flow;
  double arrival_time;
  double service_time;  // work / rate at service start; NaN when dropped
  std::optional<double> departure_time;

  bool dropped() const { return !departure_time.has_value(); }
  std::optional<double> sojourn() const {
    if (!departure_time) return std::nullopt;
    return *departure_time - arrival_time;
  }
};

struct RunSummary {
  SimConfig config;  // echo, including the seed
  double mean_sojourn;
  double mean_queue_delay;
  double empirical_jitter;  // mean |IPDV| over consecutive delivered tagged
  std::uint64_t n_jitter_samples;
  std::uint64_t offered;
  std::uint64_t delivered;
  double observed_seconds;
  double offered_rate;  // offered / observed_seconds
  double throughput;    // delivered / observed_seconds
  double loss;          // (offered - delivered) / offered
};

// Folds packet records (in arrival order) into a RunSummary.
//
// Records with index below `warmup_count` only prime the pairing state;
// a tagged drop breaks the IPDV chain since its delay is undefined.
class RunStatistics {
 public:
  explicit RunStatistics(std::uint64_t warmup_count)
      : warmup_count_(warmup_count) {}

  void Add(const PacketRecord& r) {
    const bool counted = r.index >= warmup_count_;
    if (!counted) {
      window_start_ = r.arrival_time;
      if (r.flow == Flow::kTagged) jitter_.Break();
      return;
    }
    last_arrival_ = r.arrival_time;
    ++offered_;
    if (r.dropped()) {
      if (r.flow == Flow::kTagged) jitter_.Break();
      return;
    }
    const double sojourn = *r.departure_time - r.arrival_time;
    ++delivered_;
    sojourn_sum_ += sojourn;
    queue_delay_sum_ += sojourn - r.service_time;
    if (r.flow == Flow::kTagged) jitter_.Add(sojourn);
  }

  RunSummary Finish(const SimConfig& config) const {
    RunSummary s{};
    s.config = config;
    s.offered = offered_;
    s.delivered = delivered_;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.mean_sojourn =
        delivered_ ? sojourn_sum_ / static_cast<double>(delivered_) : nan;
    s.mean_queue_delay =
        delivered_ ? queue_delay_sum_ / static_cast<double>(delivered_) : nan;
    s.empirical_jitter = jitter_.pairs() ? jitter_.mean() : nan;
    s.n_jitter_samples = jitter_.pairs();
    s.observed_seconds = last_arrival_ - window_start_;
    s.offered_rate = static_cast<double>(offered_) / s.observed_seconds;
    s.throughput = static_cast<double>(delivered_) / s.observed_seconds;
    s.loss = offered_ ? LossRate(offered_, delivered_) : nan;
    return s;
  }

 private:
  std::uint64_t warmup_count_;
  double window_start_ = 0.0;
  double last_arrival_ = 0.0;
  std::uint64_t offered_ = 0;
  std::uint64_t delivered_ = 0;
  double sojourn_sum_ = 0.0;
  double queue_delay_sum_ = 0.0;
  AbsIpdvAccumulator jitter_;
};

// Runs the configured simulation, handing each packet to `sink` in
// arrival order. Draw order per packet: inter-arrival gap, tag, work.
template <typename Sink>
  requires std::invocable<Sink&, const PacketRecord&>
RunSummary Simulate(const SimConfig& config, Sink&& sink) {
  config.Validate();
  Rng rng(config.seed);
  FcfsQueue queue(ConstantCapacity{config.capacity}, config.buffer_capacity);
  const auto warmup = static_cast<std::uint64_t>(
      std::floor(config.warmup_fraction * static_cast<double>(config.horizon_packets)));
  RunStatistics stats(warmup);
  double t = 0.0;
  for (std::uint64_t i = 0; i < config.horizon_packets; ++i) {
    t += rng.Exponential(config.arrival_rate);
    const Flow flow =
        rng.Bernoulli(config.tagged_fraction) ? Flow::kTagged : Flow::kBackground;
    const double work = config.service == ServiceDistribution::kExponential
                            ? rng.Exponential(1.0)
                            : 1.0;
    const Admission a = queue.Offer(t, work);
    PacketRecord rec{i, flow, t, std::numeric_limits<double>::quiet_NaN(),
                     std::nullopt};
    if (!a.dropped) {
      rec.service_time = a.departure - a.start;
      rec.departure_time = a.departure;
    }
    stats.Add(rec);
    sink(rec);
  }
  return stats.Finish(config);
}

inline RunSummary SimulateSummary(const SimConfig& config) {
  return Simulate(config, [](const PacketRecord&) {});
}

struct SimulationResult {
  std::vector<PacketRecord> packets;
  RunSummary summary;
};

inline SimulationResult SimulateRun(const SimConfig& config) {
  SimulationResult result;
  config.Validate();
  result.packets.reserve(config.horizon_packets);
  result.summary = Simulate(
      config, [&](const PacketRecord& r) { result.packets.push_back(r); });
  return result;
}

// Deterministic hook: fixed arrival instants and service times.
struct ForcedArrival {
  double time;
  double service_time;
  Flow flow = Flow::kTagged;
};

inline SimulationResult SimulateForced(std::span<const ForcedArrival> arrivals,
                                       std::optional<std::size_t> buffer = {}) {
  if (arrivals.empty()) {
    throw Error(ErrorKind::kEmptyRun, "no forced arrivals");
  }
  SimConfig echo;
  echo.horizon_packets = arrivals.size();
  echo.warmup_fraction = 0.0;
  echo.buffer_capacity = buffer;
  echo.service = ServiceDistribution::kDeterministic;
  FcfsQueue queue(ConstantCapacity{1.0}, buffer);
  RunStatistics stats(0);
  SimulationResult result;
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    const auto& a = arrivals[i];
    if (i > 0 && a.time < arrivals[i - 1].time) {
      throw Error(ErrorKind::kOrdering, "forced arrivals must be sorted");
    }
    const Admission adm = queue.Offer(a.time, a.service_time);
    PacketRecord rec{i, a.flow, a.time, std::numeric_limits<double>::quiet_NaN(),
                     std::nullopt};
    if (!adm.dropped) {
      rec.service_time = adm.departure - adm.start;
      rec.departure_time = adm.departure;
    }
    stats.Add(rec);
    result.packets.push_back(rec);
  }
  result.summary = stats.Finish(echo);
  return result;
}

// Packet-trace CSV: one row per packet, 17 significant digits.
inline void WritePacketTrace(std::ostream& out,
                             std::span<const PacketRecord> packets) {
  out << "index,flow,arrival_s,service_s,departure_s,sojourn_s,dropped\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& p : packets) {
    out << p.index << ',' << ToString(p.flow) << ',' << num(p.arrival_time)
        << ',';
    if (p.dropped()) {
      out << ",,,1\n";
    } else {
      out << num(p.service_time) << ',' << num(*p.departure_time) << ','
          << num(*p.sojourn()) << ",0\n";
    }
  }
}

// Sweeps.

// Which rate the load grid moves. kArrivalRate keeps C and sets
// lambda = rho * C; kCapacity keeps lambda and sets C = lambda / rho.
enum class SweepAxis { kArrivalRate, kCapacity };

// kPerPoint gives every (grid, seed) cell its own stream. kCommon reuses
// the grid-0 streams at every load (common random numbers), so points
// differ only through the load.
enum class SeedScheme { kPerPoint, kCommon };

struct SweepPoint {
  std::size_t grid_index;
  std::size_t seed_index;
  double load;
  RunSummary summary;
};

inline SimConfig SweepPointConfig(const SimConfig& base, double load,
                                  std::size_t grid_index,
                                  std::size_t seed_index,
                                  SweepAxis axis = SweepAxis::kArrivalRate,
                                  SeedScheme scheme = SeedScheme::kPerPoint) {
  SimConfig c = base;
  if (axis == SweepAxis::kArrivalRate) {
    c.arrival_rate = load * base.capacity;
  } else {
    c.capacity = base.arrival_rate / load;
  }
  c.seed = DeriveSeed(base.seed,
                      scheme == SeedScheme::kCommon ? 0 : grid_index,
                      seed_index);
  return c;
}

// One RunSummary per (load, seed), ordered grid-major. Points run in
// parallel; each is a pure function of its derived config.
inline std::vector<SweepPoint> SimulateSweep(
    const SimConfig& base, std::span<const double> loads,
    std::size_t seeds_per_point, SweepAxis axis = SweepAxis::kArrivalRate,
    unsigned threads = 0, SeedScheme scheme = SeedScheme::kPerPoint) {
  if (seeds_per_point == 0) {
    throw Error(ErrorKind::kDomain, "seeds per point must be at least 1");
  }
  for (std::size_t g = 0; g < loads.size(); ++g) {
    const double rho = loads[g];
    const bool ok = base.buffer_capacity ? rho > 0.0 : (rho > 0.0 && rho < 1.0);
    if (!ok || !std::isfinite(rho)) {
      throw Error(rho >= 1.0 ? ErrorKind::kInstability : ErrorKind::kDomain,
                  "grid point " + std::to_string(g) + ": load " +
                      std::to_string(rho) + " is not allowed");
    }
  }
  const std::size_t total = loads.size() * seeds_per_point;
  std::vector<SweepPoint> points(total);
  std::vector<std::optional<Error>> errors(total);
  auto work = [&](std::size_t k) {
    const std::size_t g = k / seeds_per_point, s = k % seeds_per_point;
    try {
      const SimConfig c = SweepPointConfig(base, loads[g], g, s, axis, scheme);
      points[k] = {g, s, loads[g], SimulateSummary(c)};
    } catch (const Error& e) {
      errors[k].emplace(e.kind(), "grid point " + std::to_string(g) +
                                      " (load " + std::to_string(loads[g]) +
                                      "), seed " + std::to_string(s) + ": " +
                                      e.what());
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  if (threads <= 1) {
    for (std::size_t k = 0; k < total; ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < total; k += threads) work(k);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) throw *e;
  }
  return points;
}

struct SweepAggregate {
  double load;
  double capacity;
  double arrival_rate;
  std::size_t n_runs;
  double jitter_mean;
  std::optional<double> jitter_stderr;  // undefined for a single run
  double throughput_mean;
  double loss_mean;
  double sojourn_mean;
};

namespace detail {

// Sorted before summing so the result does not depend on input order.
inline double OrderFreeMean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

inline SweepAggregate MergeSummaries(std::span<const RunSummary> group) {
  if (group.empty()) {
    throw Error(ErrorKind::kInsufficientData, "no summaries to merge");
  }
  const SimConfig& ref = group.front().config;
  for (const auto& s : group) {
    const SimConfig& c = s.config;
    if (c.capacity != ref.capacity || c.load() != ref.load() ||
        c.buffer_capacity != ref.buffer_capacity || c.service != ref.service) {
      throw Error(ErrorKind::kInconsistency,
                  "summaries in a group must share capacity, load, buffer "
                  "and service distribution");
    }
  }
  std::vector<double> j, x, b, t;
  for (const auto& s : group) {
    j.push_back(s.empirical_jitter);
    x.push_back(s.throughput);
    b.push_back(s.loss);
    t.push_back(s.mean_sojourn);
  }
  SweepAggregate a{};
  a.load = ref.load();
  a.capacity = ref.capacity;
  a.arrival_rate = ref.arrival_rate;
  a.n_runs = group.size();
  a.jitter_mean = detail::OrderFreeMean(j);
  a.throughput_mean = detail::OrderFreeMean(x);
  a.loss_mean = detail::OrderFreeMean(b);
  a.sojourn_mean = detail::OrderFreeMean(t);
  if (group.size() > 1) {
    std::vector<double> sq;
    for (double v : j) sq.push_back((v - a.jitter_mean) * (v - a.jitter_mean));
    const double var = detail::OrderFreeMean(sq) * static_cast<double>(sq.size()) /
                       static_cast<double>(sq.size() - 1);
    a.jitter_stderr = std::sqrt(var / static_cast<double>(group.size()));
  }
  return a;
}

// Groups sweep points by grid index and merges each group.
inline std::vector<SweepAggregate> MergeSweep(std::span<const SweepPoint> points) {
  std::map<std::size_t, std::vector<RunSummary>> groups;
  for (const auto& p : points) groups[p.grid_index].push_back(p.summary);
  std::vector<SweepAggregate> out;
  for (const auto& [g, summaries] : groups) out.push_back(MergeSummaries(summaries));
  return out;
}

}  // namespace qos
