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

#include <map>
#include <span>
#include <string>

#include <Eigen/Core>

#include "vqnoise/problems.hpp"

namespace vqnoise {

/// Reference energies of the approximation ratio.
struct EnergyBounds {
    double c_min = 0.0;
    double c_max = 0.0;
};

enum class ArReference {
    kAnalyticBound,  // C_max = sum of absolute coefficients
    kMixedState,     // C_max = energy of the totally mixed state (mean of the spectrum)
};

/// Tolerance applied to every threshold comparison, so that t = 1 accepts
/// ratios that are 1 up to rounding.
inline constexpr double kThresholdTolerance = 1e-12;

/// Brute-force C_min plus the chosen upper reference.
EnergyBounds energy_bounds(const IsingModel& m, ArReference reference = ArReference::kAnalyticBound);

/// (E - C_max) / (C_min - C_max). Throws DegenerateInputError when C_min >= C_max.
double approximation_ratio(double energy, const EnergyBounds& bounds);
double approximation_ratio(const Bitstring& bits, const IsingModel& m,
                           ArReference reference = ArReference::kAnalyticBound);

/// Argmax of a probability vector indexed by basis state; ties go to the
/// lowest index.
Bitstring most_probable_state(const Eigen::VectorXd& probabilities, int n);
Bitstring most_probable_state(const std::map<std::string, double>& distribution);

/// 1 iff ratio >= t (within kThresholdTolerance).
int approximation_index(double ratio, double t);

struct SolvabilityStat {
    double t = 1.0;
    double p_hat = 0.0;
    double std_err = 0.0;
    int n_runs = 0;
    int successes = 0;
};

SolvabilityStat solvability(std::span<const int> successes, double t = 1.0);

}  // namespace vqnoise
