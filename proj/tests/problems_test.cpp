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

#include "vqnoise/problems.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "vqnoise/errors.hpp"

namespace vqnoise {
namespace {

// Independent oracle: x^T Q x over an explicit 0/1 vector built from the
// string, with x_i = 1 - q_i and string position n-1-i holding q_i.
double qubo_value_of_string(const Eigen::MatrixXd& q, const std::string& s) {
    const int n = static_cast<int>(s.size());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int xi = s[n - 1 - i] == '0' ? 1 : 0;
            const int xj = s[n - 1 - j] == '0' ? 1 : 0;
            total += q(i, j) * xi * xj;
        }
    }
    return total;
}

Eigen::MatrixXd small_q() {
    Eigen::MatrixXd q(2, 2);
    q << -2, 3, 3, -4;
    return q;
}

TEST(Bitstring, StringRoundTrip) {
    const Bitstring b = Bitstring::from_string("0110");
    EXPECT_EQ(b.index, 6u);
    EXPECT_EQ(b.n, 4);
    EXPECT_EQ(b.to_string(), "0110");
    EXPECT_TRUE(b.bit(1));
    EXPECT_FALSE(b.bit(0));
    EXPECT_THROW(Bitstring::from_string("01x"), std::invalid_argument);
}

TEST(Bitstring, AssignmentIsComplementOfBits) {
    Eigen::VectorXd x(3);
    x << 1, 0, 0;
    const Bitstring b = Bitstring::from_assignment(x);
    EXPECT_EQ(b.to_string(), "110");
    EXPECT_EQ(b.assignment(), x);
}

TEST(GenerateRandomQubo, EntryRanges) {
    const QuboInstance inst = generate_random_qubo(3, 7);
    ASSERT_EQ(inst.n(), 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double v = inst.q(i, j);
            EXPECT_EQ(v, std::round(v));
            if (i == j) {
                EXPECT_GE(v, -10);
                EXPECT_LE(v, -1);
            } else {
                EXPECT_GE(v, 1);
                EXPECT_LE(v, 10);
            }
        }
    }
}

TEST(GenerateRandomQubo, SingleVariable) {
    for (std::uint64_t seed : {0u, 1u, 99u}) {
        const QuboInstance inst = generate_random_qubo(1, seed);
        ASSERT_EQ(inst.n(), 1);
        EXPECT_LE(inst.q(0, 0), -1);
        EXPECT_GE(inst.q(0, 0), -10);
    }
}

TEST(GenerateRandomQubo, Deterministic) {
    EXPECT_EQ(generate_random_qubo(3, 7).q, generate_random_qubo(3, 7).q);
    EXPECT_NE(generate_random_qubo(5, 7).q, generate_random_qubo(5, 8).q);
    EXPECT_THROW(generate_random_qubo(0, 1), std::invalid_argument);
}

TEST(GenerateRandomQubo, AllTenValuesOccur) {
    std::set<int> off, diag;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto q = generate_random_qubo(6, seed).q;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) (i == j ? diag : off).insert(static_cast<int>(q(i, j)));
    }
    EXPECT_EQ(off.size(), 10u);
    EXPECT_EQ(diag.size(), 10u);
}

TEST(QuboToIsing, SmallExample) {
    const IsingModel m = qubo_to_ising({small_q(), 0});
    EXPECT_DOUBLE_EQ(m.couplings(0, 1), 1.5);
    for (const char* s : {"00", "01", "10", "11"}) {
        const Bitstring b = Bitstring::from_string(s);
        EXPECT_NEAR(ising_energy(m, b, true), qubo_value_of_string(small_q(), s), 1e-9) << s;
    }
    // "01" -> x = (0, 1) -> x.Q.x = -4
    EXPECT_NEAR(ising_energy(m, Bitstring::from_string("01")) + m.offset, -4.0, 1e-12);
}

TEST(QuboToIsing, ZeroMatrix) {
    const IsingModel m = qubo_to_ising({Eigen::MatrixXd::Zero(4, 4), 0});
    EXPECT_TRUE(m.couplings.isZero());
    EXPECT_TRUE(m.fields.isZero());
    EXPECT_EQ(m.offset, 0.0);
}

TEST(QuboToIsing, AsymmetricMatchesSymmetrized) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const QuboInstance inst = generate_random_qubo(5, seed);
        const Eigen::MatrixXd sym = (inst.q + inst.q.transpose()) / 2;
        const IsingModel m = qubo_to_ising(inst);
        for (std::uint64_t idx = 0; idx < 32; ++idx) {
            const Bitstring b{idx, 5};
            const Eigen::VectorXd x = b.assignment();
            EXPECT_NEAR(x.dot(inst.q * x), x.dot(sym * x), 1e-12);
            EXPECT_NEAR(ising_energy(m, b, true), x.dot(inst.q * x), 1e-9);
        }
    }
}

TEST(IsingEnergy, SignRule) {
    IsingModel m = IsingModel::zero(1);
    m.fields[0] = 2.5;
    EXPECT_EQ(ising_energy(m, Bitstring::from_string("0")), 2.5);
    EXPECT_EQ(ising_energy(m, Bitstring::from_string("1")), -2.5);
    EXPECT_THROW(ising_energy(m, Bitstring::from_string("01")), std::invalid_argument);
    EXPECT_EQ(ising_energy(IsingModel::zero(3), Bitstring{5, 3}), 0.0);
}

TEST(EnergyTable, MatchesPointwiseEnergy) {
    const IsingModel m = qubo_to_ising(generate_random_qubo(7, 3));
    const Eigen::VectorXd table = energy_table(m);
    ASSERT_EQ(table.size(), 128);
    for (std::uint64_t i = 0; i < 128; ++i) {
        EXPECT_NEAR(table[static_cast<Eigen::Index>(i)], ising_energy(m, Bitstring{i, 7}), 1e-9);
    }
}

TEST(BruteForce, SmallExample) {
    const BruteForceResult r = brute_force_solve(qubo_to_ising({small_q(), 0}));
    ASSERT_EQ(r.argmin.size(), 1u);
    EXPECT_EQ(r.argmin[0].to_string(), "01");
}

TEST(BruteForce, ZeroModelAllMinimizers) {
    const BruteForceResult r = brute_force_solve(IsingModel::zero(3));
    EXPECT_EQ(r.c_min, 0.0);
    EXPECT_EQ(r.c_max_attained, 0.0);
    EXPECT_EQ(r.argmin.size(), 8u);
}

TEST(BruteForce, SingleField) {
    IsingModel m = IsingModel::zero(1);
    m.fields[0] = 5;
    const BruteForceResult r = brute_force_solve(m);
    EXPECT_EQ(r.c_min, -5.0);
    ASSERT_EQ(r.argmin.size(), 1u);
    EXPECT_EQ(r.argmin[0].to_string(), "1");
}

TEST(BruteForce, TooLarge) {
    EXPECT_THROW(brute_force_solve(IsingModel::zero(kMaxEnumerationQubits + 1)), ResourceLimitError);
}

TEST(CmaxBound, SumOfAbsoluteValues) {
    IsingModel m = IsingModel::zero(2);
    m.fields << 1, -2;
    m.couplings(0, 1) = 1.5;
    EXPECT_DOUBLE_EQ(cmax_bound(m), 4.5);
    EXPECT_EQ(cmax_bound(IsingModel::zero(4)), 0.0);
}

TEST(CmaxBound, DominatesAttainedMaximum) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const int n = 1 + static_cast<int>(seed % 10);
        const IsingModel m = qubo_to_ising(generate_random_qubo(n, seed));
        const Eigen::VectorXd table = energy_table(m);
        const BruteForceResult r = brute_force_solve(m);
        EXPECT_LE(r.c_min, table.minCoeff() + 1e-12);
        EXPECT_NEAR(r.c_max_attained, table.maxCoeff(), 1e-12);
        EXPECT_GE(cmax_bound(m) + 1e-12, r.c_max_attained);
    }
}

TEST(PermutationQubo, PublishedPenaltyOnZeroObjective) {
    const QuboInstance q = build_permutation_qubo({Eigen::MatrixXd::Zero(4, 4), 0}, 10.0);
    // Variables x_{i*2+a}: node i at position a.
    for (int v = 0; v < 4; ++v) EXPECT_EQ(q.q(v, v), -40.0);
    EXPECT_EQ(q.q(0, 1), 10.0);  // same node
    EXPECT_EQ(q.q(0, 2), 10.0);  // same position
    EXPECT_EQ(q.q(0, 3), 0.0);
    EXPECT_EQ(q.q(1, 2), 0.0);
}

// Expanded-form oracle: sum over rows and columns of (sum x - 1)^2 times P,
// which must match the QUBO up to a constant.
TEST(PermutationQubo, ExpandedMinimizersArePermutations) {
    const double p = 10.0;
    const QuboInstance q = build_permutation_qubo({Eigen::MatrixXd::Zero(4, 4), 0}, p,
                                                  {PenaltyConvention::kExpanded, false});
    double best = 1e300;
    std::set<int> minimizers;
    for (int mask = 0; mask < 16; ++mask) {
        Eigen::VectorXd x(4);
        for (int v = 0; v < 4; ++v) x[v] = (mask >> v) & 1;
        const double value = x.dot(q.q * x);
        double penalty = 0.0;
        for (int i = 0; i < 2; ++i) {
            penalty += std::pow(x[2 * i] + x[2 * i + 1] - 1, 2);
            penalty += std::pow(x[i] + x[2 + i] - 1, 2);
        }
        EXPECT_NEAR(value + 4 * p, p * penalty, 1e-9);
        if (value < best - 1e-9) {
            best = value;
            minimizers = {mask};
        } else if (std::abs(value - best) <= 1e-9) {
            minimizers.insert(mask);
        }
    }
    // Identity (x_00, x_11) and swap (x_01, x_10).
    EXPECT_EQ(minimizers, (std::set<int>{0b1001, 0b0110}));
}

TEST(PermutationQubo, DiagonalNegativeWhenPenaltyDominates) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const QuboInstance q0 = generate_random_qubo(9, seed);
        const double p = q0.q.cwiseAbs().maxCoeff() + 1;
        for (auto conv : {PenaltyConvention::kPublished, PenaltyConvention::kExpanded}) {
            const QuboInstance q = build_permutation_qubo(q0, p, {conv, false});
            EXPECT_LT(q.q.diagonal().maxCoeff(), 0.0);
        }
    }
}

TEST(PermutationQubo, Errors) {
    EXPECT_THROW(build_permutation_qubo({Eigen::MatrixXd::Zero(5, 5), 0}, 10.0), std::invalid_argument);
}

TEST(PermutationQubo, FixStartShrinksVariables) {
    const QuboInstance q = build_permutation_qubo(generate_random_qubo(9, 1), 20.0, {PenaltyConvention::kExpanded, true});
    EXPECT_EQ(q.n(), 4);
}

TEST(SolutionSpaceProfile, ThresholdEdges) {
    const IsingModel m = qubo_to_ising(generate_random_qubo(6, 11));
    const SpectrumProfile p = solution_space_profile(m, {0.0, 0.5, 0.9, 1.0});
    ASSERT_EQ(p.fractions.size(), 4u);
    EXPECT_EQ(p.fractions[0], 1.0);
    for (std::size_t i = 1; i < p.fractions.size(); ++i) EXPECT_LE(p.fractions[i], p.fractions[i - 1]);
    const BruteForceResult r = brute_force_solve(m);
    EXPECT_DOUBLE_EQ(p.fractions[3], static_cast<double>(r.argmin.size()) / 64.0);
    double mass = 0.0;
    for (std::size_t b = 0; b < p.histogram_density.size(); ++b) {
        mass += p.histogram_density[b] * (p.histogram_edges[b + 1] - p.histogram_edges[b]);
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(Serialization, TextAndJsonRoundTrip) {
    QuboInstance q = generate_random_qubo(4, 123);
    q.q(0, 1) = 0.1 + 1e-16 * 3;  // non-integer value exercises precision
    const QuboInstance t = qubo_from_text(to_text(q));
    EXPECT_EQ(t.q, q.q);
    EXPECT_EQ(t.seed, q.seed);
    const QuboInstance j = qubo_from_json(to_json(q));
    EXPECT_EQ(j.q, q.q);
    EXPECT_EQ(j.seed, q.seed);
    EXPECT_THROW(qubo_from_text("2 1\n1 2\n3"), ParseError);
}

}  // namespace
}  // namespace vqnoise
