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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vqnoise/losses.hpp"
#include "vqnoise/random.hpp"

namespace vqnoise {

/// Noise channel applied to normalized loss evaluations.
struct NoiseSpec {
    enum class Kind { kNone, kGaussian, kShots };
    Kind kind = Kind::kNone;
    double sigma = 0.0;
    std::uint64_t shots = 0;

    static NoiseSpec none() { return {}; }
    static NoiseSpec gaussian(double sigma);
    static NoiseSpec finite_shots(std::uint64_t shots);

    /// "none", "gauss:<sigma>" or "shots:<n>"; parse() accepts the same.
    std::string label() const;
    static NoiseSpec parse(const std::string& text);
};

/// Counters a channel updates as it runs.
struct NoiseStats {
    std::uint64_t evaluations = 0;
    // BENQO shot estimates of p0 - p1 that landed on +/-1, where arcsin is
    // evaluated at the edge of its domain.
    std::uint64_t clamp_events = 0;
};

/**
 * Noisy normalized loss.
 *
 * None returns normalized_loss. Gaussian adds one N(0, sigma) draw to the
 * normalized value; the result is not clipped. Shots estimates the loss from
 * n_shots measurements: multinomial basis counts for VQE2L/QAOA, a binomial
 * ancilla estimate of p0 - p1 for BENQO.
 */
double noisy_loss(const LossFunction& f, const Eigen::VectorXd& theta, const NoiseSpec& spec, Rng& rng,
                  NoiseStats* stats = nullptr);

/// As noisy_loss, for a circuit with one shift-rule term applied.
double noisy_shifted_loss(const LossFunction& f, const Eigen::VectorXd& theta, std::size_t term, int sign,
                          const NoiseSpec& spec, Rng& rng, NoiseStats* stats = nullptr);

/// Channel applied to a measurement distribution (see candidate_distribution).
double noisy_loss_from_distribution(const LossFunction& f, const Eigen::VectorXd& probabilities,
                                    const NoiseSpec& spec, Rng& rng, NoiseStats* stats = nullptr);

/// sum |noisy - exact| / sum |exact - mean(exact)|.
double rae(std::span<const double> exact, std::span<const double> noisy);

struct FsScanPoint {
    int n = 0;
    std::uint64_t shots = 0;
    double rae = 0.0;
};

struct FsScanOptions {
    AnsatzKind kind = AnsatzKind::kBenqo;
    int n_fixed = 10;
    std::vector<std::uint64_t> shots_grid{64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384};
    std::uint64_t shots_fixed = 1024;
    std::vector<int> n_grid{4, 5, 6, 7, 8, 9, 10};
    int samples_per_point = 1000;
    // Smallest n entering the exponential fit of RAE against n.
    int exp_fit_min_n = 6;
    // Evaluate without sampling. Every RAE is then 0.
    bool exact = false;
    std::uint64_t instance_seed = 0;
};

struct FsErrorScan {
    std::vector<FsScanPoint> vs_shots;  // at n_fixed
    std::vector<FsScanPoint> vs_n;      // at shots_fixed
    // rae ~ shots_prefactor * shots^shots_exponent
    double shots_exponent = 0.0;
    double shots_prefactor = 0.0;
    // rae ~ n_prefactor * exp(n_rate * n), n >= exp_fit_min_n
    double n_rate = 0.0;
    double n_prefactor = 0.0;
    // C in rae ~ C exp(n_rate n) / sqrt(shots), pinned at (n_fixed, shots_fixed).
    double calibration_prefactor = 0.0;
    // RAE measured at (n_fixed, shots_fixed).
    double calibration_rae = 0.0;
};

/// RAE of the shot channel over random theta ~ U[-2pi, 2pi]^n. Each n uses the
/// instance generate_random_qubo(n, derive_seed(instance_seed, {n})).
FsErrorScan fs_error_scan(const FsScanOptions& options, Rng& rng);

/// RAE of one loss at one shot count over `samples` uniform parameter points.
double fs_rae_point(const LossFunction& f, std::uint64_t shots, int samples, Rng& rng, bool exact = false);

struct ErrorProfile {
    std::vector<double> point_loss;       // normalized exact loss per point
    std::vector<double> point_error_std;  // s[dL] per point
    double slope = 0.0;                   // m of s[dL] = m |L^| + t
    double intercept = 0.0;               // t
    double median_abs_loss = 0.0;
    // Errors at the representative point (the first one).
    std::vector<double> representative_errors;
    double representative_loss = 0.0;
    double error_mean = 0.0;
    double error_std = 0.0;  // also the std of the Gaussian overlay
    double error_skewness = 0.0;
    std::vector<double> histogram_edges;
    std::vector<double> histogram_density;
};

/// Decomposition of shot noise into additive and multiplicative
/// parts. Needs n_points >= 10 and samples_per_point >= 100.
ErrorProfile error_decomposition(const LossFunction& f, int n_points, int samples_per_point,
                                 std::uint64_t shots, Rng& rng, int histogram_bins = 30);

}  // namespace vqnoise
