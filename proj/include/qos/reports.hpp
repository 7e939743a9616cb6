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

// Model-versus-simulation validation reports and field-log analysis.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qos/error.hpp"
#include "qos/jitter_model.hpp"
#include "qos/log_format.hpp"
#include "qos/metrics.hpp"
#include "qos/queue_sim.hpp"
#include "qos/rng.hpp"

namespace qos {

inline constexpr const char* kToolName = "qosjit";
inline constexpr const char* kToolVersion = "0.1.0";

inline std::string FormatExact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationOptions {
  double capacity = 1000.0;
  std::vector<double> loads = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  std::uint64_t packets = 1'000'000;
  std::size_t seeds = 5;
  std::uint64_t seed = kDefaultSeed;
  double tagged_fraction = 0.1;
  double warmup_fraction = 0.1;
  ServiceDistribution service = ServiceDistribution::kExponential;
  double threshold = 0.15;
  FormulaVariant variant = FormulaVariant::kNonnegV1;
  unsigned threads = 0;

  SimConfig BaseConfig() const {
    SimConfig c;
    c.capacity = capacity;
    c.tagged_fraction = tagged_fraction;
    c.horizon_packets = packets;
    c.warmup_fraction = warmup_fraction;
    c.seed = seed;
    c.service = service;
    return c;
  }
};

struct ValidationRow {
  double load;
  double arrival_rate;
  double j_model;
  double j_sim_mean;
  std::optional<double> j_sim_stderr;
  double relative_error;  // |J_model - J_sim| / J_sim
  bool within_threshold;
};

struct ValidationReport {
  ValidationOptions options;
  std::vector<ValidationRow> rows;
  std::vector<SweepPoint> runs;

  bool AllWithinThreshold() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const ValidationRow& r) { return r.within_threshold; });
  }

  std::vector<std::pair<std::string, std::string>> Metadata() const {
    const auto& o = options;
    std::string grid;
    for (std::size_t i = 0; i < o.loads.size(); ++i) {
      grid += (i ? ";" : "") + FormatExact(o.loads[i]);
    }
    return {
        {"tool", kToolName},
        {"version", kToolVersion},
        {"capacity_pps", FormatExact(o.capacity)},
        {"formula_variant", std::string(ToString(o.variant))},
        {"packets_per_run", std::to_string(o.packets)},
        {"seeds_per_point", std::to_string(o.seeds)},
        {"base_seed", std::to_string(o.seed)},
        {"seed_derivation",
         "splitmix64(splitmix64(splitmix64(seed)^(grid_index+1))^(seed_index+1))"},
        {"rng", "mt19937_64"},
        {"tagged_fraction", FormatExact(o.tagged_fraction)},
        {"warmup_fraction", FormatExact(o.warmup_fraction)},
        {"service", ToString(o.service)},
        {"buffer", "unbounded"},
        {"threshold", FormatExact(o.threshold)},
        {"load_grid", grid},
    };
  }
};

inline ValidationReport RunValidation(const ValidationOptions& opt) {
  if (opt.loads.empty()) {
    throw Error(ErrorKind::kDomain, "load grid is empty");
  }
  if (!(opt.threshold >= 0.0)) {
    throw Error(ErrorKind::kDomain, "threshold must be >= 0");
  }
  ValidationReport report;
  report.options = opt;
  const auto model = ModelSweep(opt.capacity, opt.loads, opt.variant);
  report.runs = SimulateSweep(opt.BaseConfig(), opt.loads, opt.seeds,
                              SweepAxis::kArrivalRate, opt.threads);
  const auto merged = MergeSweep(report.runs);
  for (std::size_t g = 0; g < model.size(); ++g) {
    ValidationRow row;
    row.load = model[g].load;
    row.arrival_rate = model[g].arrival_rate;
    row.j_model = model[g].jitter_seconds;
    row.j_sim_mean = merged[g].jitter_mean;
    row.j_sim_stderr = merged[g].jitter_stderr;
    row.relative_error = std::abs(row.j_model - row.j_sim_mean) / row.j_sim_mean;
    row.within_threshold = row.relative_error <= opt.threshold;
    report.rows.push_back(row);
  }
  return report;
}

inline void WriteMetadataBlock(
    std::ostream& out,
    const std::vector<std::pair<std::string, std::string>>& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
}

inline void WriteValidationCsv(std::ostream& out, const ValidationReport& r) {
  WriteMetadataBlock(out, r.Metadata());
  out << "rho,lambda_pps,j_model_s,j_sim_mean_s,j_sim_stderr_s,relative_error,"
         "within_threshold\n";
  for (const auto& row : r.rows) {
    out << FormatExact(row.load) << ',' << FormatExact(row.arrival_rate) << ','
        << FormatExact(row.j_model) << ',' << FormatExact(row.j_sim_mean) << ','
        << (row.j_sim_stderr ? FormatExact(*row.j_sim_stderr) : "NA") << ','
        << FormatExact(row.relative_error) << ','
        << (row.within_threshold ? 1 : 0) << '\n';
  }
}

// Per-run detail, enough to rerun any point with `simulate --seed`.
inline void WriteValidationRunsCsv(std::ostream& out, const ValidationReport& r) {
  WriteMetadataBlock(out, r.Metadata());
  out << "grid_index,seed_index,rho,derived_seed,empirical_jitter_s,"
         "n_jitter_samples,mean_sojourn_s,throughput_pps,loss\n";
  for (const auto& p : r.runs) {
    const auto& s = p.summary;
    out << p.grid_index << ',' << p.seed_index << ',' << FormatExact(p.load)
        << ',' << s.config.seed << ',' << FormatExact(s.empirical_jitter) << ','
        << s.n_jitter_samples << ',' << FormatExact(s.mean_sojourn) << ','
        << FormatExact(s.throughput) << ',' << FormatExact(s.loss) << '\n';
  }
}

// Two whitespace-separated numeric columns, one point per line.
inline void WritePlotData(std::ostream& out,
                          std::span<const std::pair<double, double>> points) {
  for (const auto& [x, y] : points) {
    out << FormatExact(x) << ' ' << FormatExact(y) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Field-log analysis

inline constexpr std::array<const char*, 3> kAnalysisColumns = {
    "tput_Bps", "jitter_ms", "loss_fraction"};

struct ColumnSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct CorrelationEntry {
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::string note;  // why the entry is undefined
};

// Symmetric, unit diagonal; off-diagonal entries may be undefined.
using CorrelationMatrix = std::array<std::array<CorrelationEntry, 3>, 3>;

struct SpeedBin {
  double speed_kmh;  // bin centre
  std::size_t n;
  ColumnSummary tput, jitter, loss;
  CorrelationMatrix correlation;
};

struct AnalysisOptions {
  bool by_speed = false;
  double speed_bin_kmh = 10.0;
  std::size_t min_bin_samples = 30;
};

struct AnalysisReport {
  AnalysisOptions options;
  std::size_t rows = 0;
  double duration_s = 0.0;
  ColumnSummary tput, jitter, loss;
  CorrelationMatrix correlation;
  std::vector<SpeedBin> bins;
  std::vector<std::string> warnings;

  // For every column pair, do all bins with >= min_bin_samples rows and a
  // defined Pearson coefficient agree on its sign? nullopt when fewer than
  // two bins qualify.
  std::optional<bool> BinSignsConsistent() const {
    std::size_t qualifying = 0;
    bool consistent = true;
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = a + 1; b < 3; ++b) {
        int sign = 0;
        for (const auto& bin : bins) {
          if (bin.n < options.min_bin_samples) continue;
          const auto& p = bin.correlation[a][b].pearson;
          if (!p) continue;
          const int s = *p > 0 ? 1 : (*p < 0 ? -1 : 0);
          if (sign == 0) sign = s;
          else if (s != sign) consistent = false;
        }
      }
    }
    for (const auto& bin : bins) {
      if (bin.n >= options.min_bin_samples) ++qualifying;
    }
    if (qualifying < 2) return std::nullopt;
    return consistent;
  }
};

namespace detail {

inline ColumnSummary Summarize(std::span<const double> v) {
  if (v.empty()) return {};
  ColumnSummary s{0.0, v[0], v[0]};
  for (double x : v) {
    s.mean += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean /= static_cast<double>(v.size());
  return s;
}

inline CorrelationMatrix CorrelationOf(
    const std::array<std::vector<double>, 3>& cols) {
  CorrelationMatrix m;
  for (std::size_t a = 0; a < 3; ++a) {
    m[a][a].pearson = 1.0;
    m[a][a].spearman = 1.0;
    for (std::size_t b = a + 1; b < 3; ++b) {
      CorrelationEntry e;
      try {
        const auto st = Correlate(cols[a], cols[b]);
        e.pearson = st.pearson_r;
        e.spearman = st.spearman_rho;
      } catch (const Error& err) {
        e.note = err.what();
      }
      m[a][b] = e;
      m[b][a] = e;
    }
  }
  return m;
}

inline std::array<std::vector<double>, 3> Columns(
    std::span<const QosLogRow> rows) {
  std::array<std::vector<double>, 3> c;
  for (const auto& r : rows) {
    c[0].push_back(r.tput_Bps);
    c[1].push_back(r.jitter_ms);
    c[2].push_back(r.loss_fraction());
  }
  return c;
}

}  // namespace detail

inline AnalysisReport AnalyzeLog(std::span<const QosLogRow> rows,
                                 const AnalysisOptions& opt = {}) {
  if (opt.by_speed && !(opt.speed_bin_kmh > 0.0)) {
    throw Error(ErrorKind::kDomain, "speed bin width must be positive");
  }
  AnalysisReport rep;
  rep.options = opt;
  rep.rows = rows.size();
  if (rows.empty()) {
    rep.warnings.push_back("log has no rows");
    return rep;
  }
  rep.duration_s =
      static_cast<double>(rows.back().t_unix_s - rows.front().t_unix_s + 1);
  const auto cols = detail::Columns(rows);
  rep.tput = detail::Summarize(cols[0]);
  rep.jitter = detail::Summarize(cols[1]);
  rep.loss = detail::Summarize(cols[2]);
  rep.correlation = detail::CorrelationOf(cols);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a + 1; b < 3; ++b) {
      if (!rep.correlation[a][b].pearson) {
        rep.warnings.push_back(std::string("corr(") + kAnalysisColumns[a] +
                               ", " + kAnalysisColumns[b] +
                               ") undefined: " + rep.correlation[a][b].note);
      }
    }
  }
  if (opt.by_speed) {
    std::map<long long, std::vector<QosLogRow>> groups;
    for (const auto& r : rows) {
      groups[std::llround(r.speed_kmh / opt.speed_bin_kmh)].push_back(r);
    }
    for (const auto& [key, members] : groups) {
      const auto c = detail::Columns(members);
      rep.bins.push_back({static_cast<double>(key) * opt.speed_bin_kmh,
                          members.size(), detail::Summarize(c[0]),
                          detail::Summarize(c[1]), detail::Summarize(c[2]),
                          detail::CorrelationOf(c)});
    }
  }
  return rep;
}

inline std::string FormatCorrelation(const CorrelationEntry& e) {
  if (!e.pearson) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.3f", *e.pearson);
  return buf;
}

inline void WriteAnalysisText(std::ostream& out, const AnalysisReport& r) {
  char buf[160];
  out << "rows: " << r.rows << "\nduration_s: " << r.duration_s << '\n';
  auto line = [&](const char* name, const ColumnSummary& s) {
    std::snprintf(buf, sizeof buf, "%-14s mean=%-12.6g min=%-12.6g max=%.6g\n",
                  name, s.mean, s.min, s.max);
    out << buf;
  };
  line("tput_Bps", r.tput);
  line("jitter_ms", r.jitter);
  line("loss_fraction", r.loss);
  out << "pearson correlation:\n" << std::string(15, ' ');
  for (const char* c : kAnalysisColumns) {
    std::snprintf(buf, sizeof buf, "%14s", c);
    out << buf;
  }
  out << '\n';
  for (std::size_t a = 0; a < 3; ++a) {
    std::snprintf(buf, sizeof buf, "%-15s", kAnalysisColumns[a]);
    out << buf;
    for (std::size_t b = 0; b < 3; ++b) {
      std::snprintf(buf, sizeof buf, "%14s",
                    FormatCorrelation(r.correlation[a][b]).c_str());
      out << buf;
    }
    out << '\n';
  }
  if (!r.bins.empty()) {
    out << "by speed (bin width " << r.options.speed_bin_kmh << " km/h):\n";
    for (const auto& b : r.bins) {
      std::snprintf(buf, sizeof buf,
                    "  %5.1f km/h n=%-5zu tput=%-11.6g jitter=%-9.4g loss=%-8.4g "
                    "r(tput,jitter)=%s r(jitter,loss)=%s%s\n",
                    b.speed_kmh, b.n, b.tput.mean, b.jitter.mean, b.loss.mean,
                    FormatCorrelation(b.correlation[0][1]).c_str(),
                    FormatCorrelation(b.correlation[1][2]).c_str(),
                    b.n < r.options.min_bin_samples ? " (small)" : "");
      out << buf;
    }
    const auto c = r.BinSignsConsistent();
    out << "correlation signs consistent across bins with >= "
        << r.options.min_bin_samples << " rows: "
        << (c ? (*c ? "yes" : "no") : "n/a") << '\n';
  }
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
}

}  // namespace qos
