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

// Prints model and simulated jitter side by side for a few loads, with the
// tagged flow as 10% of the traffic and as all of it.

#include <cstdio>
#include <initializer_list>

#include "qos/jitter_model.hpp"
#include "qos/queue_sim.hpp"

int main() {
  constexpr double kCapacity = 1000.0;
  std::printf("%5s %12s %16s %16s\n", "rho", "J_model_ms", "J_sim_ms(p=0.1)",
              "J_sim_ms(p=1)");
  for (double rho : {0.2, 0.4, 0.6, 0.8}) {
    const double model = qos::AnalyticalJitter(kCapacity, rho * kCapacity);
    qos::SimConfig c;
    c.capacity = kCapacity;
    c.arrival_rate = rho * kCapacity;
    c.horizon_packets = 200'000;
    const double sampled = qos::SimulateSummary(c).empirical_jitter;
    c.tagged_fraction = 1.0;
    const double all = qos::SimulateSummary(c).empirical_jitter;
    std::printf("%5.2f %12.5f %16.5f %16.5f\n", rho, 1e3 * model, 1e3 * sampled,
                1e3 * all);
  }
}
