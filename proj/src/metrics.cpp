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

#include "vqnoise/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "vqnoise/errors.hpp"

namespace vqnoise {

EnergyBounds energy_bounds(const IsingModel& m, ArReference reference) {
    const Eigen::VectorXd table = energy_table(m);
    EnergyBounds b{table.minCoeff(), 0.0};
    b.c_max = reference == ArReference::kAnalyticBound ? cmax_bound(m) : table.mean();
    return b;
}

double approximation_ratio(double energy, const EnergyBounds& bounds) {
    if (!(bounds.c_min < bounds.c_max)) {
        throw DegenerateInputError("approximation ratio undefined: C_min >= C_max");
    }
    return (energy - bounds.c_max) / (bounds.c_min - bounds.c_max);
}

double approximation_ratio(const Bitstring& bits, const IsingModel& m, ArReference reference) {
    return approximation_ratio(ising_energy(m, bits), energy_bounds(m, reference));
}

Bitstring most_probable_state(const Eigen::VectorXd& probabilities, int n) {
    if (probabilities.size() == 0) throw std::invalid_argument("most_probable_state: empty distribution");
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < probabilities.size(); ++i) {
        if (probabilities[i] > probabilities[best]) best = i;
    }
    return Bitstring{static_cast<std::uint64_t>(best), n};
}

Bitstring most_probable_state(const std::map<std::string, double>& distribution) {
    if (distribution.empty()) throw std::invalid_argument("most_probable_state: empty distribution");
    // std::map iterates keys in lexicographic order, so strict '>' keeps the
    // smallest string among equal probabilities.
    auto best = distribution.begin();
    for (auto it = distribution.begin(); it != distribution.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return Bitstring::from_string(best->first);
}

int approximation_index(double ratio, double t) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("threshold t must lie in [0, 1]");
    return ratio >= t - kThresholdTolerance ? 1 : 0;
}

SolvabilityStat solvability(std::span<const int> successes, double t) {
    if (successes.empty()) throw std::invalid_argument("solvability: need at least one run");
    SolvabilityStat s;
    s.t = t;
    s.n_runs = static_cast<int>(successes.size());
    for (int x : successes) {
        if (x != 0 && x != 1) throw std::invalid_argument("solvability: indicators must be 0 or 1");
        s.successes += x;
    }
    s.p_hat = static_cast<double>(s.successes) / s.n_runs;
    s.std_err = std::sqrt(s.p_hat * (1.0 - s.p_hat) / s.n_runs);
    return s;
}

}  // namespace vqnoise
