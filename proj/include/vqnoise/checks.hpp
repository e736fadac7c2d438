// Copyright 2026 The vqnoise Authors
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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vqnoise/harness.hpp"

namespace vqnoise {

/// Outcome of one end-to-end check.
struct CheckResult {
    std::string id;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct CheckOptions {
    std::uint64_t seed = 1;
    int workers = 0;  // 0: resolve_workers
};

/**
 * The reproduction checks: oracle agreement, the reference numbers and the
 * determinism contract. Expensive intermediate results (the NGD sweep) are
 * computed once and shared between checks.
 */
class CheckRunner {
  public:
    explicit CheckRunner(CheckOptions options = {});

    /// Every check in report order.
    static const std::vector<std::string>& ids();
    /// Fast subset used by `vqnoise validate`: oracle and invariant checks.
    static const std::vector<std::string>& validation_ids();

    /// Unknown ids throw std::invalid_argument. A check that throws is
    /// reported as failed with the message.
    CheckResult run(const std::string& id);

  private:
    CheckResult qubo_ising();
    CheckResult gradient_check();
    CheckResult basis_states();
    CheckResult variance_ordering();
    CheckResult sigmoid_n6();
    CheckResult resilience_decay();
    CheckResult finite_sampling();
    CheckResult additive_error();
    CheckResult solution_space();
    CheckResult projection();
    CheckResult projection_formulas();
    CheckResult determinism();
    CheckResult determinism_small();
    CheckResult fit_engine();

    const SweepResult& ngd_sweep();

    CheckOptions options_;
    int workers_;
    std::optional<SweepResult> ngd_sweep_;
};

/// One line per result: "PASS <id>: <title> | <detail>".
std::string format_check(const CheckResult& r);

}  // namespace vqnoise
