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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qos/commands.hpp"

namespace {

std::vector<double> ParseGrid(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    if (!item.empty()) {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    }
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qos::cli;
  CLI::App app{"Single-node delay-jitter model, FCFS queue simulator and QoS "
               "trace toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qos::kToolVersion));

  std::string variant = "nonneg-v1";
  std::uint64_t seed = qos::kDefaultSeed;

  // model
  ModelArgs model;
  double model_lambda = 0, model_rho = 0;
  auto* m = app.add_subcommand("model", "Evaluate the analytical jitter");
  m->add_option("--capacity", model.capacity, "Link capacity, packets/s")
      ->capture_default_str();
  auto* ml = m->add_option("--lambda", model_lambda, "Total arrival rate, packets/s");
  auto* mr = m->add_option("--rho", model_rho, "Offered load lambda/C");
  ml->excludes(mr);
  m->add_option("--variant", variant, "nonneg-v1 | printed-literal")
      ->capture_default_str();
  m->add_flag("--json", model.json, "Emit a single JSON object");

  // invert
  InvertArgs inv;
  double inv_capacity = 0, inv_lambda = 0;
  auto* iv = app.add_subcommand("invert", "Plan load or capacity for a jitter budget");
  auto* ic = iv->add_option("--capacity", inv_capacity,
                            "Fixed capacity; solve for the largest lambda");
  auto* il = iv->add_option("--lambda", inv_lambda,
                            "Fixed arrival rate; solve for the smallest capacity");
  ic->excludes(il);
  iv->add_option("--budget", inv.budget_s, "Jitter budget, seconds")->required();
  iv->add_option("--variant", variant)->capture_default_str();
  iv->add_flag("--json", inv.json);

  // simulate
  SimulateArgs sim;
  double sim_rho = 0;
  std::size_t sim_buffer = 0;
  std::string sim_service = "exponential", sim_trace, sim_out;
  auto* s = app.add_subcommand("simulate", "Run the FCFS queue simulator");
  s->add_option("--capacity", sim.config.capacity)->capture_default_str();
  auto* sl = s->add_option("--lambda", sim.config.arrival_rate)->capture_default_str();
  auto* sr = s->add_option("--rho", sim_rho);
  sl->excludes(sr);
  s->add_option("--tagged-fraction", sim.config.tagged_fraction)->capture_default_str();
  s->add_option("--buffer", sim_buffer, "System capacity K (0 = unbounded)")
      ->capture_default_str();
  s->add_option("--packets", sim.config.horizon_packets)->capture_default_str();
  s->add_option("--warmup", sim.config.warmup_fraction)->capture_default_str();
  s->add_option("--service", sim_service, "exponential | deterministic")
      ->capture_default_str();
  s->add_option("--seed", seed)->capture_default_str();
  s->add_option("--trace-out", sim_trace, "Write the packet-trace CSV here");
  s->add_option("--out", sim_out, "Directory for summary.json");
  s->add_flag("--json", sim.json);

  // validate
  ValidateArgs val;
  std::string val_grid = "0.2,0.3,0.4,0.5,0.6,0.7,0.8", val_service = "exponential";
  std::string val_out = ".";
  auto* v = app.add_subcommand("validate", "Compare the model with simulation");
  v->add_option("--capacity", val.options.capacity)->capture_default_str();
  v->add_option("--rho-grid", val_grid, "Comma-separated loads")->capture_default_str();
  v->add_option("--packets", val.options.packets)->capture_default_str();
  v->add_option("--seeds", val.options.seeds, "Seeds per grid point")
      ->capture_default_str();
  v->add_option("--seed", seed)->capture_default_str();
  v->add_option("--tagged-fraction", val.options.tagged_fraction)
      ->capture_default_str();
  v->add_option("--warmup", val.options.warmup_fraction)->capture_default_str();
  v->add_option("--service", val_service)->capture_default_str();
  v->add_option("--threshold", val.options.threshold, "Max relative error")
      ->capture_default_str();
  v->add_option("--variant", variant)->capture_default_str();
  v->add_option("--threads", val.options.threads, "0 = all cores")
      ->capture_default_str();
  v->add_option("--out", val_out)->capture_default_str();
  v->add_flag("--json", val.json);

  // synth
  SynthArgs syn;
  std::string syn_scenario, syn_output;
  auto* y = app.add_subcommand("synth", "Generate a synthetic mobility trace");
  y->add_option("--scenario", syn_scenario, "key=value scenario file")->required();
  auto* ys = y->add_option("--seed", seed, "Override the scenario seed");
  y->add_option("--output,-o", syn_output, "Log CSV to write")->required();

  // analyze
  AnalyzeArgs ana;
  std::string ana_log, ana_out;
  auto* an = app.add_subcommand("analyze", "Analyze a canonical QoS log");
  an->add_option("log", ana_log, "Log CSV")->required();
  an->add_flag("--by-speed", ana.options.by_speed, "Per-speed-bin breakdown");
  an->add_option("--speed-bin", ana.options.speed_bin_kmh, "Bin width, km/h")
      ->capture_default_str();
  an->add_option("--min-bin-samples", ana.options.min_bin_samples)
      ->capture_default_str();
  an->add_option("--out", ana_out, "Directory for report and plot-data files");
  an->add_flag("--json", ana.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (m->parsed()) {
      model.variant = qos::ParseFormulaVariant(variant);
      if (ml->count()) model.arrival_rate = model_lambda;
      if (mr->count()) model.load = model_rho;
      return RunModel(model, std::cout, std::cerr);
    }
    if (iv->parsed()) {
      inv.variant = qos::ParseFormulaVariant(variant);
      if (ic->count()) inv.capacity = inv_capacity;
      if (il->count()) inv.arrival_rate = inv_lambda;
      return RunInvert(inv, std::cout, std::cerr);
    }
    if (s->parsed()) {
      if (sr->count()) sim.load = sim_rho;
      if (sim_buffer > 0) sim.config.buffer_capacity = sim_buffer;
      sim.config.service = qos::ParseServiceDistribution(sim_service);
      sim.config.seed = seed;
      if (!sim_trace.empty()) sim.trace_out = sim_trace;
      if (!sim_out.empty()) sim.out_dir = sim_out;
      return RunSimulate(sim, std::cout, std::cerr);
    }
    if (v->parsed()) {
      val.options.loads = ParseGrid(val_grid);
      if (val.options.loads.empty()) {
        std::cerr << "usage error: --rho-grid is empty\n";
        return kExitError;
      }
      val.options.seed = seed;
      val.options.service = qos::ParseServiceDistribution(val_service);
      val.options.variant = qos::ParseFormulaVariant(variant);
      val.out_dir = val_out;
      return RunValidate(val, std::cout, std::cerr);
    }
    if (y->parsed()) {
      syn.scenario = syn_scenario;
      syn.output = syn_output;
      if (ys->count()) syn.seed = seed;
      return RunSynth(syn, std::cout, std::cerr);
    }
    if (an->parsed()) {
      ana.log = ana_log;
      if (!ana_out.empty()) ana.out_dir = ana_out;
      return RunAnalyze(ana, std::cout, std::cerr);
    }
  } catch (const qos::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: bad number '" << e.what() << "'\n";
    return kExitError;
  }
  return kExitError;
}
