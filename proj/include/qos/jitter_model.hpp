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

// Closed-form single-node jitter model for a FCFS queue fed by Poisson
// traffic, the loss/throughput identity, and planning inversions.
//
// Rates are packets per second. With exponentially sized packets of unit
// mean, the link capacity C is also the service rate.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qos/error.hpp"

namespace qos {

// Algebraic reading of the single-node jitter expression.
//
//   kNonnegV1:      J = (1 - x e^-x - e^-2x) / (C - lambda)
//   kPrintedLiteral J = (1 - e^-x (x + e^x)) / (C - lambda) = -x e^-x / (C - lambda)
//
// with x = (1 - rho) / rho. The literal reading is negative for every
// stable load and is kept only so the discrepancy can be shown.
enum class FormulaVariant { kNonnegV1, kPrintedLiteral };

inline std::string_view ToString(FormulaVariant v) {
  return v == FormulaVariant::kNonnegV1 ? "nonneg-v1" : "printed-literal";
}

inline FormulaVariant ParseFormulaVariant(std::string_view name) {
  if (name == "nonneg-v1") return FormulaVariant::kNonnegV1;
  if (name == "printed-literal") return FormulaVariant::kPrintedLiteral;
  throw Error(ErrorKind::kDomain,
              "unknown formula variant '" + std::string(name) + "'");
}

inline double OfferedLoad(double capacity, double arrival_rate) {
  if (!(capacity > 0.0) || !std::isfinite(capacity)) {
    throw Error(ErrorKind::kDomain, "capacity must be positive and finite");
  }
  if (!(arrival_rate >= 0.0)) {
    throw Error(ErrorKind::kDomain, "arrival rate must be non-negative");
  }
  return arrival_rate / capacity;
}

// Packets/s from a bit rate and a mean packet size in bits.
inline double CapacityFromBandwidth(double bandwidth_bps,
                                    double mean_packet_bits) {
  if (!(bandwidth_bps > 0.0) || !(mean_packet_bits > 0.0)) {
    throw Error(ErrorKind::kDomain,
                "bandwidth and mean packet size must be positive");
  }
  return bandwidth_bps / mean_packet_bits;
}

// A stable (C, lambda) pair; load is derived, never stored independently.
class LinkParams {
 public:
  LinkParams(double capacity, double arrival_rate)
      : capacity_(capacity), arrival_rate_(arrival_rate) {
    if (!(capacity > 0.0) || !std::isfinite(capacity)) {
      throw Error(ErrorKind::kDomain, "capacity must be positive and finite");
    }
    if (arrival_rate == 0.0) {
      throw Error(ErrorKind::kUndefinedJitter,
                  "arrival rate is zero; no consecutive packets exist");
    }
    if (!(arrival_rate > 0.0)) {
      throw Error(ErrorKind::kDomain, "arrival rate must be positive");
    }
    if (!(arrival_rate < capacity)) {
      throw Error(ErrorKind::kInstability,
                  "load " + std::to_string(arrival_rate / capacity) +
                      " is not below 1");
    }
  }

  static LinkParams FromLoad(double capacity, double load) {
    if (!(load > 0.0 && load < 1.0)) {
      if (load >= 1.0) {
        throw Error(ErrorKind::kInstability,
                    "load " + std::to_string(load) + " is not below 1");
      }
      if (load == 0.0) {
        throw Error(ErrorKind::kUndefinedJitter, "load is zero");
      }
      throw Error(ErrorKind::kDomain, "load must lie in (0, 1)");
    }
    return LinkParams(capacity, load * capacity);
  }

  double capacity() const { return capacity_; }
  double arrival_rate() const { return arrival_rate_; }
  double load() const { return arrival_rate_ / capacity_; }

 private:
  double capacity_;
  double arrival_rate_;
};

struct JitterPrediction {
  double jitter_seconds;
  LinkParams params;
  FormulaVariant variant;
};

namespace detail {

// Dimensionless shape factor; J = factor / (C - lambda).
inline double JitterShape(double load, FormulaVariant variant) {
  const double x = (1.0 - load) / load;
  const double ex = std::exp(-x);
  if (variant == FormulaVariant::kPrintedLiteral) {
    return 1.0 - ex * (x + std::exp(x));
  }
  // -expm1(-2x) keeps precision as x -> 0 (load -> 1).
  return -std::expm1(-2.0 * x) - x * ex;
}

}  // namespace detail

inline JitterPrediction AnalyticalJitter(
    const LinkParams& params,
    FormulaVariant variant = FormulaVariant::kNonnegV1) {
  const double shape = detail::JitterShape(params.load(), variant);
  const double j = shape / (params.capacity() - params.arrival_rate());
  return {j, params, variant};
}

inline double AnalyticalJitter(double capacity, double arrival_rate,
                               FormulaVariant variant =
                                   FormulaVariant::kNonnegV1) {
  return AnalyticalJitter(LinkParams(capacity, arrival_rate), variant)
      .jitter_seconds;
}

// Loss/throughput identity B = (lambda - X) / lambda.

struct LossThroughputRecord {
  double arrival_rate;
  double throughput;
  double loss;
};

inline double LossFromThroughput(double arrival_rate, double throughput) {
  if (!(arrival_rate > 0.0)) {
    throw Error(ErrorKind::kDomain, "arrival rate must be positive");
  }
  if (!(throughput >= 0.0)) {
    throw Error(ErrorKind::kDomain, "throughput must be non-negative");
  }
  if (throughput > arrival_rate) {
    throw Error(ErrorKind::kInconsistency,
                "throughput exceeds arrival rate");
  }
  return (arrival_rate - throughput) / arrival_rate;
}

inline double ThroughputFromLoss(double arrival_rate, double loss) {
  if (!(arrival_rate > 0.0)) {
    throw Error(ErrorKind::kDomain, "arrival rate must be positive");
  }
  if (!(loss >= 0.0 && loss <= 1.0)) {
    throw Error(ErrorKind::kDomain, "loss probability must lie in [0, 1]");
  }
  return arrival_rate * (1.0 - loss);
}

inline LossThroughputRecord MakeLossThroughputRecord(double arrival_rate,
                                                     double throughput) {
  return {arrival_rate, throughput,
          LossFromThroughput(arrival_rate, throughput)};
}

// Planning inversions.

struct InversionOptions {
  double relative_tolerance = 1e-9;
  int max_iterations = 200;
  int grid_points = 256;
  // Bracket is [lo_fraction * C, (1 - lo_fraction) * C] for the load
  // inversion and [(1 + lo_fraction) * lambda, ceiling * lambda] for the
  // capacity inversion.
  double lo_fraction = 1e-6;
  double capacity_ceiling = 1e6;
  FormulaVariant variant = FormulaVariant::kNonnegV1;
};

struct InversionResult {
  double value;
  bool unconstrained;  // budget met across the whole bracket
  double jitter_at_value;
  int iterations;
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double attained_minimum)
      : Error(ErrorKind::kInfeasible, what),
        attained_minimum_(attained_minimum) {}

  double attained_minimum() const noexcept { return attained_minimum_; }

 private:
  double attained_minimum_;
};

namespace detail {

struct Minimum {
  double at;
  double value;
};

template <typename F>
Minimum GoldenMinimum(F f, double lo, double hi, int iterations) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = f(d);
    }
  }
  Minimum best = fc < fd ? Minimum{c, fc} : Minimum{d, fd};
  for (double x : {lo, hi}) {
    if (const double fx = f(x); fx < best.value) best = {x, fx};
  }
  return best;
}

// Bisects on [feasible, infeasible] where f(feasible) <= budget <
// f(infeasible). Returns the last point known to be feasible.
template <typename F>
InversionResult BisectBoundary(F f, double feasible, double infeasible,
                               double budget, const InversionOptions& opt) {
  double j_feasible = f(feasible);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (std::abs(j_feasible - budget) <= 0.1 * opt.relative_tolerance * budget) {
      break;
    }
    const double mid = 0.5 * (feasible + infeasible);
    if (mid == feasible || mid == infeasible) break;
    const double jm = f(mid);
    if (jm <= budget) {
      feasible = mid;
      j_feasible = jm;
    } else {
      infeasible = mid;
    }
  }
  return {feasible, false, j_feasible, it};
}

}  // namespace detail

// Largest arrival rate whose predicted jitter stays within budget on a
// link of the given capacity.
//
// J(lambda) is not monotone over the whole stable range, so a coarse grid
// first locates the highest feasible point and the global minimum; the
// boundary is then refined by bisection on the bracketing grid cell.
inline InversionResult InvertLoadForJitter(double capacity,
                                           double jitter_budget,
                                           const InversionOptions& opt = {}) {
  if (!(capacity > 0.0) || !std::isfinite(capacity)) {
    throw Error(ErrorKind::kDomain, "capacity must be positive and finite");
  }
  if (!(jitter_budget > 0.0)) {
    throw Error(ErrorKind::kDomain, "jitter budget must be positive");
  }
  const double lo = opt.lo_fraction * capacity;
  const double hi = (1.0 - opt.lo_fraction) * capacity;
  auto j = [&](double lambda) {
    return AnalyticalJitter(capacity, lambda, opt.variant);
  };

  const int n = std::max(opt.grid_points, 2);
  std::vector<double> grid(n), values(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    values[i] = j(grid[i]);
  }
  if (values.back() <= jitter_budget) {
    return {hi, true, values.back(), 0};
  }
  int top = -1;
  for (int i = n - 1; i >= 0; --i) {
    if (values[i] <= jitter_budget) { top = i; break; }
  }
  if (top < 0) {
    const auto imin = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    const double a = grid[imin == 0 ? 0 : imin - 1];
    const double b = grid[std::min<std::size_t>(imin + 1, n - 1)];
    const auto min = detail::GoldenMinimum(j, a, b, 100);
    if (min.value > jitter_budget) {
      throw InfeasibleError(
          "jitter budget " + std::to_string(jitter_budget) +
              " s is below the minimum attainable " +
              std::to_string(min.value) + " s",
          min.value);
    }
    // Feasible set is a sliver around the minimum that the grid missed.
    return detail::BisectBoundary(j, min.at, b, jitter_budget, opt);
  }
  return detail::BisectBoundary(j, grid[top], grid[top + 1], jitter_budget,
                                opt);
}

// Smallest capacity that keeps the predicted jitter of an arrival rate
// within budget.
inline InversionResult InvertCapacityForJitter(
    double arrival_rate, double jitter_budget,
    const InversionOptions& opt = {}) {
  if (arrival_rate == 0.0) {
    throw Error(ErrorKind::kUndefinedJitter,
                "arrival rate is zero; no consecutive packets exist");
  }
  if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate)) {
    throw Error(ErrorKind::kDomain, "arrival rate must be positive");
  }
  if (!(jitter_budget > 0.0)) {
    throw Error(ErrorKind::kDomain, "jitter budget must be positive");
  }
  const double lo = (1.0 + opt.lo_fraction) * arrival_rate;
  const double hi = opt.capacity_ceiling * arrival_rate;
  auto j = [&](double capacity) {
    return AnalyticalJitter(capacity, arrival_rate, opt.variant);
  };

  // Log-spaced, since the bracket spans six decades.
  const int n = std::max(opt.grid_points, 2);
  std::vector<double> grid(n), values(n);
  const double log_lo = std::log(lo), log_hi = std::log(hi);
  for (int i = 0; i < n; ++i) {
    grid[i] = std::exp(log_lo + (log_hi - log_lo) * i / (n - 1));
    values[i] = j(grid[i]);
  }
  grid.front() = lo;
  grid.back() = hi;
  values.front() = j(lo);
  values.back() = j(hi);
  if (values.front() <= jitter_budget) {
    return {lo, true, values.front(), 0};
  }
  int first = -1;
  for (int i = 0; i < n; ++i) {
    if (values[i] <= jitter_budget) { first = i; break; }
  }
  if (first < 0) {
    const double jmin = *std::min_element(values.begin(), values.end());
    throw InfeasibleError(
        "no capacity up to " + std::to_string(hi) +
            " pkt/s meets jitter budget " + std::to_string(jitter_budget) +
            " s",
        jmin);
  }
  return detail::BisectBoundary(j, grid[first], grid[first - 1],
                                jitter_budget, opt);
}

struct ModelSweepRow {
  double load;
  double arrival_rate;
  double jitter_seconds;
};

inline std::vector<ModelSweepRow> ModelSweep(
    double capacity, std::span<const double> loads,
    FormulaVariant variant = FormulaVariant::kNonnegV1) {
  std::vector<ModelSweepRow> rows;
  rows.reserve(loads.size());
  for (std::size_t i = 0; i < loads.size(); ++i) {
    const double rho = loads[i];
    if (!(rho > 0.0 && rho < 1.0)) {
      throw Error(ErrorKind::kDomain,
                  "load grid entry " + std::to_string(i) + " (" +
                      std::to_string(rho) + ") is outside (0, 1)");
    }
    const auto params = LinkParams::FromLoad(capacity, rho);
    rows.push_back({rho, params.arrival_rate(),
                    AnalyticalJitter(params, variant).jitter_seconds});
  }
  return rows;
}

}  // namespace qos
