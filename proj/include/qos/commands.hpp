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

// Subcommand bodies of the qosjit CLI. Each returns the process exit code:
// 0 success, 1 usage or domain error, 2 validation threshold exceeded
// (report still written).

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qos/error.hpp"
#include "qos/jitter_model.hpp"
#include "qos/log_format.hpp"
#include "qos/mobility.hpp"
#include "qos/queue_sim.hpp"
#include "qos/reports.hpp"
#include "qos/scenario_file.hpp"

namespace qos::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitThreshold = 2;

namespace detail {

inline std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::kDomain, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::filesystem::path& p, const std::string& data) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::kDomain, "cannot write " + p.string());
  out << data;
}

template <typename F>
int Guard(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

inline nlohmann::json NumberOrNull(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace detail

// model ---------------------------------------------------------------------

struct ModelArgs {
  double capacity = 1000.0;
  std::optional<double> arrival_rate;
  std::optional<double> load;
  FormulaVariant variant = FormulaVariant::kNonnegV1;
  bool json = false;
};

inline int RunModel(const ModelArgs& a, std::ostream& out, std::ostream& err) {
  return detail::Guard(err, [&] {
    if (a.arrival_rate.has_value() == a.load.has_value()) {
      throw Error(ErrorKind::kDomain, "give exactly one of --lambda or --rho");
    }
    const LinkParams params =
        a.load ? LinkParams::FromLoad(a.capacity, *a.load)
               : LinkParams(a.capacity, *a.arrival_rate);
    const auto pred = AnalyticalJitter(params, a.variant);
    const bool literal = a.variant == FormulaVariant::kPrintedLiteral;
    const char* warning =
        "WARNING: the printed-literal reading is negative for every load in "
        "(0, 1) and cannot be a mean absolute delay variation.";
    if (a.json) {
      nlohmann::json j = {{"capacity_pps", params.capacity()},
                          {"lambda_pps", params.arrival_rate()},
                          {"rho", params.load()},
                          {"formula_variant", ToString(a.variant)},
                          {"jitter_s", pred.jitter_seconds},
                          {"jitter_ms", 1000.0 * pred.jitter_seconds}};
      if (literal) j["warning"] = warning;
      out << j.dump() << '\n';
      return kExitOk;
    }
    if (literal) {
      out << "!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!\n"
          << warning << '\n'
          << "!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!!\n";
    }
    out << "variant: " << ToString(a.variant) << '\n'
        << "capacity_pps: " << FormatExact(params.capacity()) << '\n'
        << "lambda_pps: " << FormatExact(params.arrival_rate()) << '\n'
        << "rho: " << FormatExact(params.load()) << '\n'
        << "jitter_s: " << FormatExact(pred.jitter_seconds) << '\n'
        << "jitter_ms: " << FormatExact(1000.0 * pred.jitter_seconds) << '\n'
        << "row: " << FormatExact(params.capacity()) << ','
        << FormatExact(params.arrival_rate()) << ','
        << FormatExact(params.load()) << ',' << ToString(a.variant) << ','
        << FormatExact(pred.jitter_seconds) << '\n';
    return kExitOk;
  });
}

// invert --------------------------------------------------------------------

struct InvertArgs {
  std::optional<double> capacity;
  std::optional<double> arrival_rate;
  double budget_s = 0.0;
  FormulaVariant variant = FormulaVariant::kNonnegV1;
  bool json = false;
};

inline int RunInvert(const InvertArgs& a, std::ostream& out, std::ostream& err) {
  try {
    if (a.capacity.has_value() == a.arrival_rate.has_value()) {
      throw Error(ErrorKind::kDomain,
                  "give exactly one of --capacity or --lambda");
    }
    InversionOptions opt;
    opt.variant = a.variant;
    const bool solve_load = a.capacity.has_value();
    const InversionResult r =
        solve_load ? InvertLoadForJitter(*a.capacity, a.budget_s, opt)
                   : InvertCapacityForJitter(*a.arrival_rate, a.budget_s, opt);
    const double capacity = solve_load ? *a.capacity : r.value;
    const double lambda = solve_load ? r.value : *a.arrival_rate;
    const double check = AnalyticalJitter(capacity, lambda, a.variant);
    if (a.json) {
      out << nlohmann::json{{"solved_for", solve_load ? "lambda_max_pps"
                                                      : "capacity_min_pps"},
                            {"value", r.value},
                            {"capacity_pps", capacity},
                            {"lambda_pps", lambda},
                            {"rho", lambda / capacity},
                            {"budget_s", a.budget_s},
                            {"jitter_at_value_s", check},
                            {"unconstrained", r.unconstrained},
                            {"iterations", r.iterations},
                            {"formula_variant", ToString(a.variant)}}
                 .dump()
          << '\n';
      return kExitOk;
    }
    if (r.unconstrained) {
      out << "unconstrained: the budget holds across the whole search bracket;"
             " reporting the bracket "
          << (solve_load ? "ceiling" : "floor") << '\n';
    }
    out << (solve_load ? "lambda_max_pps: " : "capacity_min_pps: ")
        << FormatExact(r.value) << '\n'
        << "rho: " << FormatExact(lambda / capacity) << '\n'
        << "budget_s: " << FormatExact(a.budget_s) << '\n'
        << "jitter_at_value_s: " << FormatExact(check) << '\n'
        << "round_trip_relative_error: "
        << FormatExact(std::abs(check - a.budget_s) / a.budget_s) << '\n';
    return kExitOk;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n'
        << "attained_minimum_s: " << FormatExact(e.attained_minimum()) << '\n';
    return kExitError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  SimConfig config;
  std::optional<double> load;  // overrides config.arrival_rate
  std::optional<std::filesystem::path> trace_out;
  std::optional<std::filesystem::path> out_dir;
  bool json = false;
};

inline nlohmann::json SummaryJson(const RunSummary& s) {
  const auto& c = s.config;
  return {
      {"capacity_pps", c.capacity},
      {"lambda_pps", c.arrival_rate},
      {"rho", c.load()},
      {"tagged_fraction", c.tagged_fraction},
      {"buffer", c.buffer_capacity ? nlohmann::json(*c.buffer_capacity)
                                   : nlohmann::json("unbounded")},
      {"packets", c.horizon_packets},
      {"warmup_fraction", c.warmup_fraction},
      {"service", ToString(c.service)},
      {"seed", c.seed},
      {"mean_sojourn_s", detail::NumberOrNull(s.mean_sojourn)},
      {"mean_queue_delay_s", detail::NumberOrNull(s.mean_queue_delay)},
      {"empirical_jitter_s", detail::NumberOrNull(s.empirical_jitter)},
      {"n_jitter_samples", s.n_jitter_samples},
      {"offered", s.offered},
      {"delivered", s.delivered},
      {"observed_s", s.observed_seconds},
      {"offered_rate_pps", s.offered_rate},
      {"throughput_pps", s.throughput},
      {"loss", detail::NumberOrNull(s.loss)},
      {"tool", kToolName},
      {"version", kToolVersion},
  };
}

inline void WriteSummaryText(std::ostream& out, const RunSummary& s) {
  const auto& c = s.config;
  out << "capacity_pps: " << FormatExact(c.capacity) << '\n'
      << "lambda_pps: " << FormatExact(c.arrival_rate) << '\n'
      << "rho: " << FormatExact(c.load()) << '\n'
      << "buffer: "
      << (c.buffer_capacity ? std::to_string(*c.buffer_capacity) : "unbounded")
      << '\n'
      << "packets: " << c.horizon_packets << '\n'
      << "seed: " << c.seed << '\n'
      << "mean_sojourn_s: " << FormatExact(s.mean_sojourn) << '\n'
      << "mean_queue_delay_s: " << FormatExact(s.mean_queue_delay) << '\n'
      << "empirical_jitter_s: " << FormatExact(s.empirical_jitter) << '\n'
      << "n_jitter_samples: " << s.n_jitter_samples << '\n'
      << "offered: " << s.offered << '\n'
      << "delivered: " << s.delivered << '\n'
      << "throughput_pps: " << FormatExact(s.throughput) << '\n'
      << "offered_rate_pps: " << FormatExact(s.offered_rate) << '\n'
      << "loss: " << FormatExact(s.loss) << '\n';
}

inline int RunSimulate(const SimulateArgs& a, std::ostream& out,
                       std::ostream& err) {
  return detail::Guard(err, [&] {
    SimConfig c = a.config;
    if (a.load) c.arrival_rate = *a.load * c.capacity;
    RunSummary summary;
    if (a.trace_out) {
      const auto result = SimulateRun(c);
      summary = result.summary;
      std::ostringstream csv;
      WritePacketTrace(csv, result.packets);
      detail::WriteFile(*a.trace_out, csv.str());
    } else {
      summary = SimulateSummary(c);
    }
    if (a.out_dir) {
      detail::WriteFile(*a.out_dir / "summary.json",
                        SummaryJson(summary).dump(2) + "\n");
    }
    if (a.json) {
      out << SummaryJson(summary).dump() << '\n';
    } else {
      WriteSummaryText(out, summary);
    }
    return kExitOk;
  });
}

// validate ------------------------------------------------------------------

struct ValidateArgs {
  ValidationOptions options;
  std::filesystem::path out_dir = ".";
  bool json = false;
};

inline int RunValidate(const ValidateArgs& a, std::ostream& out,
                       std::ostream& err) {
  return detail::Guard(err, [&] {
    const ValidationReport report = RunValidation(a.options);
    std::ostringstream csv, runs, pm, ps;
    WriteValidationCsv(csv, report);
    WriteValidationRunsCsv(runs, report);
    std::vector<std::pair<double, double>> model_pts, sim_pts;
    for (const auto& r : report.rows) {
      model_pts.emplace_back(r.load, r.j_model);
      sim_pts.emplace_back(r.load, r.j_sim_mean);
    }
    WritePlotData(pm, model_pts);
    WritePlotData(ps, sim_pts);
    detail::WriteFile(a.out_dir / "validation_report.csv", csv.str());
    detail::WriteFile(a.out_dir / "validation_runs.csv", runs.str());
    detail::WriteFile(a.out_dir / "rho_vs_jmodel.dat", pm.str());
    detail::WriteFile(a.out_dir / "rho_vs_jsim.dat", ps.str());

    const bool pass = report.AllWithinThreshold();
    if (a.json) {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : report.rows) {
        rows.push_back({{"rho", r.load},
                        {"lambda_pps", r.arrival_rate},
                        {"j_model_s", r.j_model},
                        {"j_sim_mean_s", r.j_sim_mean},
                        {"j_sim_stderr_s", r.j_sim_stderr
                                               ? nlohmann::json(*r.j_sim_stderr)
                                               : nlohmann::json(nullptr)},
                        {"relative_error", r.relative_error},
                        {"within_threshold", r.within_threshold}});
      }
      nlohmann::json meta;
      for (const auto& [k, v] : report.Metadata()) meta[k] = v;
      out << nlohmann::json{{"metadata", meta}, {"rows", rows}, {"pass", pass}}
                 .dump()
          << '\n';
    } else {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%6s %10s %14s %14s %12s %9s\n", "rho",
                    "lambda", "J_model_s", "J_sim_s", "stderr_s", "rel_err");
      out << buf;
      for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%6.3f %10.4g %14.6e %14.6e %12.3e %9.4f %s\n",
                      r.load, r.arrival_rate, r.j_model, r.j_sim_mean,
                      r.j_sim_stderr.value_or(std::nan("")), r.relative_error,
                      r.within_threshold ? "ok" : "FAIL");
        out << buf;
      }
      out << (pass ? "all points within threshold "
                   : "discrepancy: some points exceed threshold ")
          << FormatLogFloat(a.options.threshold) << "; report written to "
          << (a.out_dir / "validation_report.csv").string() << '\n';
    }
    return pass ? kExitOk : kExitThreshold;
  });
}

// synth ---------------------------------------------------------------------

struct SynthArgs {
  std::filesystem::path scenario;
  std::filesystem::path output;
  std::optional<std::uint64_t> seed;  // overrides the scenario file
};

inline int RunSynth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  return detail::Guard(err, [&] {
    MobilityScenario s = ParseScenario(detail::ReadFile(a.scenario));
    if (a.seed) s.seed = *a.seed;
    const auto rows = SynthMobilityTrace(s);
    detail::WriteFile(a.output, WriteLog(rows));
    out << "wrote " << rows.size() << " rows (" << ToString(s.kind)
        << ", seed " << s.seed << ") to " << a.output.string() << '\n';
    return kExitOk;
  });
}

// analyze -------------------------------------------------------------------

struct AnalyzeArgs {
  std::filesystem::path log;
  AnalysisOptions options;
  std::optional<std::filesystem::path> out_dir;
  bool json = false;
};

inline nlohmann::json AnalysisJson(const AnalysisReport& r) {
  auto summary = [](const ColumnSummary& s) {
    return nlohmann::json{{"mean", s.mean}, {"min", s.min}, {"max", s.max}};
  };
  auto matrix = [](const CorrelationMatrix& m) {
    nlohmann::json pearson = nlohmann::json::array(),
                   spearman = nlohmann::json::array();
    for (const auto& row : m) {
      nlohmann::json pr = nlohmann::json::array(), sr = nlohmann::json::array();
      for (const auto& e : row) {
        pr.push_back(e.pearson ? nlohmann::json(*e.pearson) : nlohmann::json(nullptr));
        sr.push_back(e.spearman ? nlohmann::json(*e.spearman)
                                : nlohmann::json(nullptr));
      }
      pearson.push_back(pr);
      spearman.push_back(sr);
    }
    return nlohmann::json{{"columns", kAnalysisColumns},
                          {"pearson", pearson},
                          {"spearman", spearman}};
  };
  nlohmann::json j = {{"rows", r.rows},
                      {"duration_s", r.duration_s},
                      {"tput_Bps", summary(r.tput)},
                      {"jitter_ms", summary(r.jitter)},
                      {"loss_fraction", summary(r.loss)},
                      {"correlation", matrix(r.correlation)},
                      {"warnings", r.warnings},
                      {"tool", kToolName},
                      {"version", kToolVersion}};
  if (r.options.by_speed) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : r.bins) {
      bins.push_back({{"speed_kmh", b.speed_kmh},
                      {"n", b.n},
                      {"tput_Bps", summary(b.tput)},
                      {"jitter_ms", summary(b.jitter)},
                      {"loss_fraction", summary(b.loss)},
                      {"correlation", matrix(b.correlation)}});
    }
    j["speed_bin_kmh"] = r.options.speed_bin_kmh;
    j["min_bin_samples"] = r.options.min_bin_samples;
    j["by_speed"] = bins;
    const auto c = r.BinSignsConsistent();
    j["bin_signs_consistent"] = c ? nlohmann::json(*c) : nlohmann::json(nullptr);
  }
  return j;
}

inline int RunAnalyze(const AnalyzeArgs& a, std::ostream& out,
                      std::ostream& err) {
  return detail::Guard(err, [&] {
    const auto rows = ParseLog(detail::ReadFile(a.log));
    const auto report = AnalyzeLog(rows, a.options);
    std::ostringstream text;
    WriteAnalysisText(text, report);
    if (a.out_dir) {
      const auto t0 = rows.empty() ? 0 : rows.front().t_unix_s;
      std::vector<std::pair<double, double>> tput, jit, speed;
      for (const auto& r : rows) {
        const auto t = static_cast<double>(r.t_unix_s - t0);
        tput.emplace_back(t, r.tput_Bps);
        jit.emplace_back(t, r.jitter_ms);
        speed.emplace_back(t, r.speed_kmh);
      }
      std::ostringstream p1, p2, p3;
      WritePlotData(p1, tput);
      WritePlotData(p2, jit);
      WritePlotData(p3, speed);
      detail::WriteFile(*a.out_dir / "time_vs_tput.dat", p1.str());
      detail::WriteFile(*a.out_dir / "time_vs_jitter.dat", p2.str());
      detail::WriteFile(*a.out_dir / "time_vs_speed.dat", p3.str());
      detail::WriteFile(*a.out_dir / "analysis.txt", text.str());
      detail::WriteFile(*a.out_dir / "analysis.json",
                        AnalysisJson(report).dump(2) + "\n");
    }
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    if (a.json) {
      out << AnalysisJson(report).dump() << '\n';
    } else {
      out << text.str();
    }
    return kExitOk;
  });
}

}  // namespace qos::cli
