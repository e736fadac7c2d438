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

#include "vqnoise/optimizers.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "vqnoise/errors.hpp"
#include "vqnoise/problems.hpp"

namespace vqnoise {
namespace {

using std::numbers::pi;

LossFunction make(AnsatzKind k, int n, std::uint64_t seed) {
    return LossFunction(k, qubo_to_ising(generate_random_qubo(n, seed)));
}

double sphere(const Eigen::VectorXd& t) { return t.squaredNorm(); }

// Records every point the optimizer evaluates.
class TallyOracle : public LossOracle {
  public:
    TallyOracle(int n, std::function<double(const Eigen::VectorXd&)> fn) : n_(n), fn_(std::move(fn)) {}
    int dimension() const override { return n_; }
    std::vector<Eigen::VectorXd> points;
    int tally = 0;

  protected:
    double do_value(const Eigen::VectorXd& theta) override {
        ++tally;
        points.push_back(theta);
        return fn_(theta);
    }

  private:
    int n_;
    std::function<double(const Eigen::VectorXd&)> fn_;
};

TEST(InitParams, StandardNormalMoments) {
    Rng rng(7);
    const int draws = 100000;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(3), sum2 = Eigen::VectorXd::Zero(3);
    for (int i = 0; i < draws; ++i) {
        const Eigen::VectorXd t = init_params(3, rng);
        sum += t;
        sum2 += t.cwiseProduct(t);
    }
    for (int j = 0; j < 3; ++j) {
        const double mean = sum[j] / draws;
        EXPECT_NEAR(mean, 0.0, 0.01);
        EXPECT_NEAR(sum2[j] / draws - mean * mean, 1.0, 0.02);
    }
}

TEST(InitParams, FixedStateRepeats) {
    Rng a(11), b(11);
    EXPECT_EQ(init_params(6, a), init_params(6, b));
    EXPECT_THROW(init_params(0, a), std::invalid_argument);
}

TEST(Oracle, BudgetIsEnforced) {
    FunctionOracle o(2, sphere);
    o.set_budget(3);
    const Eigen::VectorXd t = Eigen::VectorXd::Ones(2);
    o.value(t);
    o.shifted_value(t, 0, +1);
    o.value(t);
    EXPECT_THROW(o.value(t), BudgetExhausted);
    EXPECT_EQ(o.calls(), 3u);
}

TEST(Oracle, VariationalGradientMatchesExact) {
    for (AnsatzKind k : {AnsatzKind::kBenqo, AnsatzKind::kVqe2l, AnsatzKind::kQaoa}) {
        const LossFunction f = make(k, 4, 21);
        VariationalOracle o(f, NoiseSpec::none(), 1);
        Rng rng(3);
        const Eigen::VectorXd theta = rng.normal_vector(4);
        const Eigen::VectorXd g = parameter_shift_gradient(o, theta);
        const Eigen::VectorXd want = gradient_parameter_shift(f, theta) / f.l_max();
        EXPECT_LT((g - want).norm(), 1e-10) << to_string(k);
        EXPECT_EQ(o.calls(), static_cast<std::uint64_t>(gradient_evaluation_count(f, false))) << to_string(k);
    }
}

TEST(Ngd, QuadraticBowlApproachesOrigin) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd theta0 = init_params(2, rng);
        FunctionOracle o(2, sphere);
        const OptRun r = run_ngd(o, theta0, {20});
        EXPECT_LT(r.theta_final.norm(), theta0.norm());
        EXPECT_EQ(r.iterations, 20);
    }
}

TEST(Ngd, FirstStepDecreasesConvexQuadratic) {
    // Steps have length sqrt(pi n / 2); from outside half that radius the
    // first normalized step lands closer to the minimum.
    const Eigen::Vector2d theta0(3.0, -2.5);
    FunctionOracle o(2, sphere);
    const OptRun r = run_ngd(o, theta0, {1});
    EXPECT_LT(sphere(r.theta_final), sphere(theta0));
}

TEST(Ngd, CallCountIsTwoNPlusOneTimesKMax) {
    for (AnsatzKind k : {AnsatzKind::kBenqo, AnsatzKind::kVqe2l}) {
        const LossFunction f = make(k, 6, 4);
        VariationalOracle o(f, NoiseSpec::gaussian(0.05), 9);
        Rng rng(1);
        const OptRun r = run_ngd(o, init_params(6, rng), {20});
        EXPECT_EQ(r.n_calls, 260u) << to_string(k);
        EXPECT_EQ(r.trajectory.size(), 20u);
    }
}

TEST(Ngd, ConstantLossHoldsPosition) {
    FunctionOracle o(3, [](const Eigen::VectorXd&) { return 0.7; });
    const Eigen::Vector3d theta0(0.1, -0.2, 0.3);
    const OptRun r = run_ngd(o, theta0, {20});
    EXPECT_EQ(r.theta_final, Eigen::VectorXd(theta0));
    EXPECT_EQ(r.zero_gradient_events, 20);
}

TEST(Ngd, StopsAtBudget) {
    FunctionOracle o(2, sphere);
    o.set_budget(12);
    const OptRun r = run_ngd(o, Eigen::Vector2d(1, 1), {20});
    EXPECT_TRUE(r.budget_exhausted);
    EXPECT_EQ(r.n_calls, 12u);
    EXPECT_EQ(r.iterations, 2);
}

TEST(Spsa, SphereImprovesInNearlyAllSeeds) {
    int best_improved = 0, final_improved = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const Eigen::VectorXd theta0 = init_params(4, rng);
        FunctionOracle o(4, sphere);
        SpsaOptions opt;
        opt.seed = seed + 1000;
        const OptRun r = run_spsa(o, theta0, opt);
        EXPECT_EQ(r.n_calls, 75u + 2u * 100u);
        EXPECT_EQ(r.iterations, 100);
        if (r.best_loss < sphere(theta0)) ++best_improved;
        if (sphere(r.theta_final) < sphere(theta0)) ++final_improved;
    }
    EXPECT_GE(best_improved, 95);
    EXPECT_GE(final_improved, 95);
}

TEST(Spsa, PerturbationsAreRademacher) {
    TallyOracle o(5, sphere);
    SpsaOptions opt;
    opt.a = 0.1;
    opt.c = 0.2;
    opt.iterations = 30;
    opt.seed = 3;
    run_spsa(o, Eigen::VectorXd::Zero(5), opt);
    ASSERT_EQ(o.points.size(), 60u);
    int positives = 0;
    for (std::size_t k = 0; k < 30; ++k) {
        const Eigen::VectorXd d = o.points[2 * k] - o.points[2 * k + 1];
        const double ck = 0.2 / std::pow(k + 1.0, 0.101);
        for (int i = 0; i < 5; ++i) {
            EXPECT_NEAR(std::abs(d[i]), 2.0 * ck, 1e-12);
            positives += d[i] > 0;
        }
    }
    EXPECT_GT(positives, 45);
    EXPECT_LT(positives, 105);
}

TEST(Spsa, BudgetCapsCalls) {
    for (std::uint64_t budget : {3u, 50u, 76u, 77u, 120u}) {
        FunctionOracle o(2, sphere);
        SpsaOptions opt;
        opt.budget = budget;
        const OptRun r = run_spsa(o, Eigen::Vector2d(1, -1), opt);
        EXPECT_LE(r.n_calls, budget);
        EXPECT_GE(r.iterations, 1);
        EXPECT_FALSE(r.budget_exhausted);
    }
    FunctionOracle o(2, sphere);
    SpsaOptions opt;
    opt.budget = 2;
    EXPECT_THROW(run_spsa(o, Eigen::Vector2d(1, -1), opt), std::invalid_argument);
}

TEST(Nft, ThreePointSinusoid) {
    // L(0) = 1, L(pi/2) = 0, L(-pi/2) = 2: the sinusoid is 1 - sin(theta).
    FunctionOracle o(1, [](const Eigen::VectorXd& t) { return 1.0 - std::sin(t[0]); });
    NftOptions opt;
    opt.max_sweeps = 1;
    const OptRun r = run_nft(o, Eigen::VectorXd::Zero(1), opt);
    EXPECT_NEAR(r.theta_final[0], pi / 2, 1e-12);
    EXPECT_EQ(r.n_calls, 3u);
}

TEST(Nft, CoordinateAtMinimumStays) {
    FunctionOracle o(2, [](const Eigen::VectorXd& t) { return -std::cos(t[0] - 0.4) - 2 * std::cos(t[1] + 1.1); });
    NftOptions opt;
    opt.max_sweeps = 2;
    const Eigen::Vector2d at_min(0.4, -1.1);
    const OptRun r = run_nft(o, at_min, opt);
    EXPECT_NEAR(r.theta_final[0], 0.4, 1e-9);
    EXPECT_NEAR(r.theta_final[1], -1.1, 1e-9);
}

TEST(Nft, DegenerateCoordinateUnchanged) {
    FunctionOracle o(2, [](const Eigen::VectorXd& t) { return std::cos(t[1]); });
    NftOptions opt;
    opt.max_sweeps = 1;
    const OptRun r = run_nft(o, Eigen::Vector2d(0.3, 0.0), opt);
    EXPECT_EQ(r.theta_final[0], 0.3);
    EXPECT_NEAR(std::cos(r.theta_final[1]), -1.0, 1e-12);
}

TEST(Nft, ExactCoordinateDescentOnVqe2lAndBenqo) {
    for (AnsatzKind k : {AnsatzKind::kVqe2l, AnsatzKind::kBenqo}) {
        const LossFunction f = make(k, 4, 8);
        Rng rng(2);
        const Eigen::VectorXd theta0 = init_params(4, rng);
        double prev = exact_loss(f, theta0);
        for (int updates = 1; updates <= 8; ++updates) {
            VariationalOracle o(f, NoiseSpec::none(), 0);
            NftOptions opt;
            opt.max_evaluations = 3 + 2 * static_cast<std::uint64_t>(updates - 1);
            const OptRun r = run_nft(o, theta0, opt);
            EXPECT_EQ(r.iterations, updates);
            const double now = exact_loss(f, r.theta_final);
            EXPECT_LE(now, prev + 1e-12) << to_string(k) << " update " << updates;
            prev = now;
        }
        VariationalOracle fresh(f, NoiseSpec::none(), 0);
        EXPECT_FALSE(run_nft(fresh, theta0).approximate);
    }
}

TEST(Nft, QaoaFlaggedApproximate) {
    const LossFunction f = make(AnsatzKind::kQaoa, 4, 8);
    VariationalOracle o(f, NoiseSpec::none(), 0);
    const OptRun r = run_nft(o, Eigen::VectorXd::Constant(4, 0.2));
    EXPECT_TRUE(r.approximate);
    EXPECT_EQ(r.metadata.count("approximate"), 1u);
}

TEST(Nft, DefaultBudgetRespected) {
    const LossFunction f = make(AnsatzKind::kVqe2l, 5, 1);
    VariationalOracle o(f, NoiseSpec::gaussian(0.1), 4);
    const OptRun r = run_nft(o, Eigen::VectorXd::Zero(5));
    EXPECT_LE(r.n_calls, 1024u);
    EXPECT_GE(r.n_calls, 1022u);
}

TEST(Powell, SeparableQuadraticToOneMicro) {
    FunctionOracle o(2, [](const Eigen::VectorXd& t) {
        return (t[0] - 1) * (t[0] - 1) + (t[1] + 2) * (t[1] + 2);
    });
    const OptRun r = run_powell(o, Eigen::Vector2d(0, 0));
    EXPECT_NEAR(r.theta_final[0], 1.0, 1e-6);
    EXPECT_NEAR(r.theta_final[1], -2.0, 1e-6);
    EXPECT_LE(r.n_calls, 1000u);
}

TEST(Powell, CoupledQuadraticFourDims) {
    Eigen::Matrix4d a;
    a << 4, 1, 0, 0.5, 1, 3, 0.2, 0, 0, 0.2, 2, 0.3, 0.5, 0, 0.3, 1;
    const Eigen::Vector4d opt(0.5, -1, 2, 0.25);
    FunctionOracle o(4, [&](const Eigen::VectorXd& t) {
        const Eigen::Vector4d d = t - opt;
        return d.dot(a * d);
    });
    PowellOptions po;
    po.xtol = 1e-8;
    po.ftol = 1e-12;
    const OptRun r = run_powell(o, Eigen::Vector4d::Zero(), po);
    EXPECT_LT((r.theta_final - Eigen::VectorXd(opt)).norm(), 1e-6);
}

TEST(Powell, NeverExceedsBudget) {
    for (std::uint64_t budget : {3u, 10u, 57u, 200u}) {
        FunctionOracle o(2, [](const Eigen::VectorXd& t) {
            return 100 * std::pow(t[1] - t[0] * t[0], 2) + std::pow(1 - t[0], 2);
        });
        PowellOptions po;
        po.max_evaluations = budget;
        const OptRun r = run_powell(o, Eigen::Vector2d(-1.2, 1), po);
        EXPECT_LE(r.n_calls, budget);
    }
    FunctionOracle o(3, sphere);
    PowellOptions po;
    po.max_evaluations = 3;
    EXPECT_THROW(run_powell(o, Eigen::Vector3d::Zero(), po), std::invalid_argument);
}

TEST(Powell, LineSearchFindsQuadraticVertex) {
    int evals = 0;
    const auto [t, ft] = line_minimize(
        [&](double s) {
            ++evals;
            return 2.0 * (s - 0.3) * (s - 0.3) + 1.5;
        },
        1e-2);
    EXPECT_NEAR(t, 0.3, 1e-2 * 0.3 + 1e-11);
    EXPECT_NEAR(ft, 1.5, 1e-3);
    // Vertex away from the starting bracket.
    const auto [t2, ft2] = line_minimize([](double s) { return (s + 7.5) * (s + 7.5); }, 1e-8);
    EXPECT_NEAR(t2, -7.5, 1e-6);
    EXPECT_NEAR(ft2, 0.0, 1e-10);
}

OptimizerSpec spec_for(OptimizerKind k) {
    OptimizerSpec s;
    s.kind = k;
    s.spsa.seed = 17;
    return s;
}

TEST(Dispatch, MatchesDirectCalls) {
    const LossFunction f = make(AnsatzKind::kVqe2l, 4, 6);
    Rng rng(4);
    const Eigen::VectorXd theta0 = init_params(4, rng);
    for (OptimizerKind k : {OptimizerKind::kNgd, OptimizerKind::kSpsa, OptimizerKind::kNft, OptimizerKind::kPowell}) {
        const OptimizerSpec s = spec_for(k);
        VariationalOracle a(f, NoiseSpec::gaussian(0.01), 99);
        VariationalOracle b(f, NoiseSpec::gaussian(0.01), 99);
        const OptRun via = run(s, a, theta0);
        OptRun direct;
        switch (k) {
            case OptimizerKind::kNgd: direct = run_ngd(b, theta0, s.ngd); break;
            case OptimizerKind::kSpsa: direct = run_spsa(b, theta0, s.spsa); break;
            case OptimizerKind::kNft: direct = run_nft(b, theta0, s.nft); break;
            default: direct = run_powell(b, theta0, s.powell); break;
        }
        EXPECT_EQ(via.theta_final, direct.theta_final) << to_string(k);
        EXPECT_EQ(via.n_calls, direct.n_calls) << to_string(k);
        EXPECT_EQ(via.best_loss, direct.best_loss) << to_string(k);
        EXPECT_EQ(via.metadata.at("optimizer"), std::string(to_string(k)));
    }
}

TEST(Dispatch, CounterEqualsInstrumentedTally) {
    for (OptimizerKind k : {OptimizerKind::kNgd, OptimizerKind::kSpsa, OptimizerKind::kNft, OptimizerKind::kPowell}) {
        TallyOracle o(3, [](const Eigen::VectorXd& t) { return std::cos(t[0]) + std::sin(t[1] - t[2]); });
        const OptRun r = run(spec_for(k), o, Eigen::Vector3d(0.1, 0.2, 0.3));
        EXPECT_EQ(r.n_calls, static_cast<std::uint64_t>(o.tally)) << to_string(k);
    }
}

TEST(Dispatch, PluginRegistry) {
    register_optimizer("coordinate-probe", [](LossOracle& o, const Eigen::VectorXd& theta0,
                                              const std::map<std::string, double>& params) {
        OptRun r;
        Eigen::VectorXd t = theta0;
        const double step = params.count("step") ? params.at("step") : 0.1;
        for (int i = 0; i < o.dimension(); ++i) {
            t[i] -= step;
            r.record(i, o.value(t));
        }
        r.theta_final = t;
        return r;
    });
    EXPECT_TRUE(has_optimizer("coordinate-probe"));
    OptimizerSpec s = OptimizerSpec::parse("coordinate-probe");
    s.plugin_params["step"] = 0.5;
    FunctionOracle o(3, sphere);
    const OptRun r = run(s, o, Eigen::Vector3d(1, 1, 1));
    EXPECT_EQ(r.n_calls, 3u);
    EXPECT_DOUBLE_EQ(r.theta_final[2], 0.5);
    EXPECT_EQ(r.metadata.at("step"), "0.5");

    EXPECT_THROW(run(OptimizerSpec::parse("cobyla"), o, Eigen::Vector3d::Zero()), ConfigError);
    EXPECT_THROW(OptimizerSpec::parse(""), ConfigError);
}

TEST(Dispatch, SeededRunsRepeat) {
    const LossFunction f = make(AnsatzKind::kBenqo, 5, 2);
    for (OptimizerKind k : {OptimizerKind::kNgd, OptimizerKind::kSpsa, OptimizerKind::kNft, OptimizerKind::kPowell}) {
        VariationalOracle a(f, NoiseSpec::finite_shots(64), 5);
        VariationalOracle b(f, NoiseSpec::finite_shots(64), 5);
        const Eigen::VectorXd theta0 = Eigen::VectorXd::Constant(5, 0.3);
        const OptRun x = run(spec_for(k), a, theta0);
        const OptRun y = run(spec_for(k), b, theta0);
        EXPECT_EQ(x.theta_final, y.theta_final);
        ASSERT_EQ(x.trajectory.size(), y.trajectory.size());
        for (std::size_t i = 0; i < x.trajectory.size(); ++i) EXPECT_EQ(x.trajectory[i].loss, y.trajectory[i].loss);
    }
}

TEST(Dispatch, DescribeEchoesDefaults) {
    const OptimizerSpec s = OptimizerSpec::parse("spsa");
    const auto d = s.describe();
    EXPECT_EQ(d.at("iterations"), "100");
    EXPECT_EQ(d.at("alpha"), "0.60199999999999998");
    EXPECT_EQ(OptimizerSpec::parse("nft").describe().at("reset_interval"), "32");
    EXPECT_EQ(OptimizerSpec::parse("powell").describe().at("max_evaluations"), "1000");
    EXPECT_EQ(OptimizerSpec::parse("ngd").describe().at("k_max"), "20");
}

}  // namespace
}  // namespace vqnoise
