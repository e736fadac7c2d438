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
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace vqnoise {

/**
 * A computational basis state of an n-qubit register.
 *
 * Bit i of `index` is the measured value q_i of qubit i (little-endian basis
 * ordering). The textual form prints qubit n-1 first, so "01" on two qubits is
 * index 1, i.e. q_0 = 1 and q_1 = 0.
 *
 * Under the QUBO mapping x_i = (z_i + 1)/2 with z_i = (-1)^{q_i}, a measured
 * bit q_i corresponds to the binary variable x_i = 1 - q_i.
 */
struct Bitstring {
    std::uint64_t index = 0;
    int n = 0;

    bool bit(int i) const { return (index >> i) & 1U; }
    std::string to_string() const;
    static Bitstring from_string(std::string_view s);

    /// Basis state whose qubits encode the binary assignment x (q_i = 1 - x_i).
    static Bitstring from_assignment(const Eigen::VectorXd& x);
    /// Inverse of from_assignment.
    Eigen::VectorXd assignment() const;

    friend bool operator==(const Bitstring&, const Bitstring&) = default;
    friend auto operator<=>(const Bitstring&, const Bitstring&) = default;
};

/// QUBO problem min_x x^T Q x over x in {0,1}^n.
struct QuboInstance {
    Eigen::MatrixXd q;
    std::uint64_t seed = 0;

    int n() const { return static_cast<int>(q.rows()); }
    double evaluate(const Eigen::VectorXd& x) const { return x.dot(q * x); }
};

/**
 * Ising cost operator  C = sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j  (+ offset).
 *
 * `couplings` is n x n and only its strict upper triangle is read.
 */
struct IsingModel {
    Eigen::MatrixXd couplings;
    Eigen::VectorXd fields;
    double offset = 0.0;

    int n() const { return static_cast<int>(fields.size()); }

    static IsingModel zero(int n);
};

struct BruteForceResult {
    double c_min = 0.0;
    double c_max_attained = 0.0;
    std::vector<Bitstring> argmin;
};

struct SpectrumProfile {
    int n = 0;
    std::vector<double> thresholds;
    std::vector<double> fractions;  // p_t per threshold
    // Histogram of E_q / max|E| over all 2^n basis states on [-1, 1].
    std::vector<double> histogram_edges;
    std::vector<double> histogram_density;
};

enum class PenaltyConvention {
    kPublished,  // +P same-row/column couplings, -4P on the diagonal
    kExpanded,   // exact expansion of the squared constraints: -2P diagonal
};

struct PermutationQuboOptions {
    PenaltyConvention convention = PenaltyConvention::kPublished;
    // Fix node 0 at position 0, leaving (n-1)^2 variables.
    bool fix_start = false;
};

/// Largest n accepted by the exhaustive routines.
inline constexpr int kMaxEnumerationQubits = 24;

/// Random instance: off-diagonals uniform in {1..10}, diagonal in {-10..-1}.
QuboInstance generate_random_qubo(int n, std::uint64_t seed);

/// Maps Q (symmetrized first) to Ising form with an exact constant offset.
IsingModel qubo_to_ising(const QuboInstance& q);

/// Energy of a basis state; `with_offset` adds the constant term.
double ising_energy(const IsingModel& m, const Bitstring& bits, bool with_offset = false);

/// Diagonal of C over all 2^n basis states (offset excluded).
Eigen::VectorXd energy_table(const IsingModel& m);

BruteForceResult brute_force_solve(const IsingModel& m);

/// sum_i |h_i| + sum_{i<j} |J_ij|
double cmax_bound(const IsingModel& m);

/// Adds one-hot permutation penalties to a QUBO over n^2 variables x_{i*n+a}
/// (node i at position a).
QuboInstance build_permutation_qubo(const QuboInstance& q0, double penalty,
                                    const PermutationQuboOptions& options = {});

/// Fractions of basis states whose approximation ratio reaches each threshold.
SpectrumProfile solution_space_profile(const IsingModel& m, const std::vector<double>& thresholds,
                                       int histogram_bins = 20);

// Plain-text form: "n seed" then n rows of n numbers. Values are written with
// round-trip precision.
std::string to_text(const QuboInstance& q);
QuboInstance qubo_from_text(std::string_view text);
std::string to_json(const QuboInstance& q);
QuboInstance qubo_from_json(std::string_view text);

}  // namespace vqnoise
