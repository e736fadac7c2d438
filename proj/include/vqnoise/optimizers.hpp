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
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "vqnoise/losses.hpp"
#include "vqnoise/noise.hpp"
#include "vqnoise/random.hpp"

namespace vqnoise {

/// Thrown by LossOracle when a call would exceed its budget. Optimizers catch
/// it and return the state reached so far.
class BudgetExhausted : public std::runtime_error {
  public:
    BudgetExhausted() : std::runtime_error("loss evaluation budget exhausted") {}
};

/**
 * Loss function as seen by an optimizer. Every evaluation, including
 * parameter-shift evaluations, goes through value() or shifted_value(), which
 * count calls and enforce the budget.
 *
 * The shift-rule hooks default to the plain rule on each coordinate
 * (theta_i +/- pi/2, half difference).
 */
class LossOracle {
  public:
    static constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

    virtual ~LossOracle() = default;

    double value(const Eigen::VectorXd& theta);
    double shifted_value(const Eigen::VectorXd& theta, std::size_t term, int sign);

    virtual int dimension() const = 0;
    virtual std::size_t shift_term_count() const { return static_cast<std::size_t>(dimension()); }
    /// Gradient from shift values; `center` is read only when needs_center().
    virtual Eigen::VectorXd combine_shifts(double center, const std::vector<double>& plus,
                                           const std::vector<double>& minus) const;
    virtual bool needs_center() const { return false; }
    // Map a loss value to the quantity that is sinusoidal in each parameter,
    // and back. Identity by default.
    virtual double to_sinusoidal(double loss) const { return loss; }
    virtual double from_sinusoidal(double value) const { return value; }
    /// False when coordinates are not exactly sinusoidal (NFT is then approximate).
    virtual bool sinusoidal_coordinates() const { return true; }

    std::uint64_t calls() const { return calls_; }
    std::uint64_t budget() const { return budget_; }
    void set_budget(std::uint64_t budget) { budget_ = budget; }
    void reset_calls() { calls_ = 0; }

  protected:
    virtual double do_value(const Eigen::VectorXd& theta) = 0;
    virtual double do_shifted_value(const Eigen::VectorXd& theta, std::size_t term, int sign);

  private:
    void charge();

    std::uint64_t calls_ = 0;
    std::uint64_t budget_ = kUnlimited;
};

/// Wraps a plain function of theta.
class FunctionOracle : public LossOracle {
  public:
    FunctionOracle(int dimension, std::function<double(const Eigen::VectorXd&)> fn)
        : dim_(dimension), fn_(std::move(fn)) {}
    int dimension() const override { return dim_; }

  protected:
    double do_value(const Eigen::VectorXd& theta) override { return fn_(theta); }

  private:
    int dim_;
    std::function<double(const Eigen::VectorXd&)> fn_;
};

/// Normalized loss of a variational circuit through a noise channel. Owns its
/// random stream.
class VariationalOracle : public LossOracle {
  public:
    VariationalOracle(const LossFunction& f, NoiseSpec noise, std::uint64_t stream_seed)
        : f_(f), noise_(noise), rng_(stream_seed) {}

    int dimension() const override { return f_.n_params(); }
    std::size_t shift_term_count() const override { return f_.shift_terms().size(); }
    Eigen::VectorXd combine_shifts(double center, const std::vector<double>& plus,
                                   const std::vector<double>& minus) const override;
    bool needs_center() const override { return f_.kind() == AnsatzKind::kBenqo; }
    double to_sinusoidal(double loss) const override;
    double from_sinusoidal(double value) const override;
    bool sinusoidal_coordinates() const override { return f_.kind() != AnsatzKind::kQaoa; }

    const LossFunction& loss() const { return f_; }
    const NoiseStats& stats() const { return stats_; }

  protected:
    double do_value(const Eigen::VectorXd& theta) override;
    double do_shifted_value(const Eigen::VectorXd& theta, std::size_t term, int sign) override;

  private:
    double scale() const { return f_.is_zero() ? 1.0 : f_.l_max(); }

    const LossFunction& f_;
    NoiseSpec noise_;
    Rng rng_;
    NoiseStats stats_;
};

/// Parameter-shift gradient through the oracle. Pass the centre value when it
/// is already known to save one call where the oracle needs it.
Eigen::VectorXd parameter_shift_gradient(LossOracle& oracle, const Eigen::VectorXd& theta,
                                         std::optional<double> center = std::nullopt);

struct TrajectoryPoint {
    int iteration = 0;
    double loss = 0.0;
};

struct OptRun {
    Eigen::VectorXd theta_final;
    double best_loss = std::numeric_limits<double>::infinity();
    int best_iteration = -1;
    std::uint64_t n_calls = 0;
    int iterations = 0;
    std::vector<TrajectoryPoint> trajectory;
    int zero_gradient_events = 0;
    bool budget_exhausted = false;
    bool approximate = false;  // NFT on non-sinusoidal coordinates
    std::map<std::string, std::string> metadata;

    /// Appends to the trajectory and updates best_loss (first minimum wins).
    void record(int iteration, double loss);
};

/// theta_0 ~ N(0, I_n).
Eigen::VectorXd init_params(int n, Rng& rng);

struct NgdOptions {
    int k_max = 20;
};

struct SpsaOptions {
    int iterations = 100;
    double alpha = 0.602;
    double gamma = 0.101;
    double stability_fraction = 0.1;  // A = fraction * iterations
    int noise_probes = 25;
    int calibration_pairs = 25;
    double target_step = 0.1;
    double c_min = 0.2;
    double c_max = 1.0;
    // Fixed gains skip the calibration phase when set.
    std::optional<double> a;
    std::optional<double> c;
    // Total evaluation cap; 0 means calibration + 2 * iterations. A cap too
    // small for the calibration phase falls back to a = target_step *
    // (1 + A)^alpha, c = c_min.
    std::uint64_t budget = 0;
    std::uint64_t seed = 0;  // perturbation stream
};

struct NftOptions {
    std::uint64_t max_evaluations = 1024;
    int reset_interval = 32;
    int max_sweeps = 0;  // 0: until the evaluation budget is used
};

struct PowellOptions {
    std::uint64_t max_evaluations = 1000;
    double xtol = 1e-4;  // line-search tolerance is 100 * xtol
    double ftol = 1e-4;
    int max_iterations = 0;  // 0: 1000 * n
};

OptRun run_ngd(LossOracle& oracle, const Eigen::VectorXd& theta0, const NgdOptions& options = {});
OptRun run_spsa(LossOracle& oracle, const Eigen::VectorXd& theta0, const SpsaOptions& options = {});
OptRun run_nft(LossOracle& oracle, const Eigen::VectorXd& theta0, const NftOptions& options = {});
OptRun run_powell(LossOracle& oracle, const Eigen::VectorXd& theta0, const PowellOptions& options = {});

/// 1-D minimization of g along a line: bracket from (0, 1), then Brent.
/// Returns (t_min, g(t_min)). Exposed for testing.
std::pair<double, double> line_minimize(const std::function<double(double)>& g, double tol);

enum class OptimizerKind { kNgd, kSpsa, kNft, kPowell, kPlugin };

std::string_view to_string(OptimizerKind kind);

/// Plug-in optimizer: receives the oracle, theta_0 and free-form parameters.
using PluginOptimizer =
    std::function<OptRun(LossOracle&, const Eigen::VectorXd&, const std::map<std::string, double>&)>;

void register_optimizer(const std::string& name, PluginOptimizer fn);
bool has_optimizer(const std::string& name);

struct OptimizerSpec {
    OptimizerKind kind = OptimizerKind::kNgd;
    NgdOptions ngd;
    SpsaOptions spsa;
    NftOptions nft;
    PowellOptions powell;
    std::string plugin_name;
    std::map<std::string, double> plugin_params;

    /// "ngd", "spsa", "nft", "powell" or the plugin name.
    std::string name() const;
    /// Every hyperparameter, as echoed into result metadata.
    std::map<std::string, std::string> describe() const;

    static OptimizerSpec parse(const std::string& name);
};

/// Dispatches on spec.kind. Unknown plugin names raise ConfigError.
OptRun run(const OptimizerSpec& spec, LossOracle& oracle, const Eigen::VectorXd& theta0);

}  // namespace vqnoise
