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

#pragma once

#include <stdexcept>
#include <string>

namespace qos {

enum class ErrorKind {
  kDomain,            // argument outside its mathematical domain
  kInstability,       // load >= 1 where a stable queue is required
  kUndefinedJitter,   // no consecutive tagged packets can exist
  kInconsistency,     // values that contradict each other
  kInfeasible,        // planning target cannot be met
  kInsufficientData,  // too few samples for the estimator
  kOrdering,          // time series not sorted
  kParse,             // malformed input file
  kEmptyRun,          // nothing to simulate or synthesize
  kDegenerate,        // statistic undefined for the input (e.g. constant)
};

inline const char* ToString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kInstability: return "instability error";
    case ErrorKind::kUndefinedJitter: return "undefined jitter";
    case ErrorKind::kInconsistency: return "inconsistency error";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kInsufficientData: return "insufficient data";
    case ErrorKind::kOrdering: return "ordering error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kEmptyRun: return "empty run";
    case ErrorKind::kDegenerate: return "degenerate input";
  }
  return "error";
}

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(ToString(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qos
