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

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace vqnoise {

// ---------------------------------------------------------------------------
// Ordinary least squares on a line.

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_err = 0.0;
    double intercept_err = 0.0;
    double r_squared = 0.0;
};

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

// ---------------------------------------------------------------------------
// Nonlinear least squares.

/// y = model(x, params)
using ScalarModel = std::function<double(double, const Eigen::VectorXd&)>;

struct NllsOptions {
    int max_iterations = 500;
    double cost_tolerance = 1e-14;  // relative decrease of the cost
    double step_tolerance = 1e-12;  // relative parameter step
    double gradient_tolerance = 1e-14;
    double jacobian_step = 1e-7;  // relative central-difference step
};

struct FitResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;  // s^2 (J^T W J)^+
    Eigen::VectorXd std_errors;
    Eigen::VectorXd residuals;  // y - model, unweighted
    double cost = 0.0;          // sum w r^2
    int iterations = 0;
    int start_index = 0;
    bool converged = false;
};

/**
 * Levenberg-Marquardt with a central-difference Jacobian, run from every
 * start point; the converged run with the lowest weighted cost wins.
 *
 * `weights` may be empty (all ones). `lower`/`upper` may be empty (unbounded);
 * bounded parameters are projected back into the box after every step.
 * Throws FitFailure when no start converges.
 */
FitResult nlls_fit(const ScalarModel& model, std::span<const double> xs, std::span<const double> ys,
                   std::span<const double> weights, const std::vector<Eigen::VectorXd>& starts,
                   const Eigen::VectorXd& lower = {}, const Eigen::VectorXd& upper = {},
                   const NllsOptions& options = {});

// ---------------------------------------------------------------------------
// Sigmoidal solvability curves.

/// p(s) = (p_u - p_l)/2 tanh(-b ln s + c) + (p_u + p_l)/2
struct TanhFit {
    double p_u = 0.0;
    double p_l = 0.0;
    double b = 0.0;
    double c = 0.0;
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // order (p_u, p_l, b, c)
    double residual_norm = 0.0;
    bool censored = false;
    std::string censor_reason;

    double operator()(double s) const;
};

double tanh_model(double s, double p_u, double p_l, double b, double c);

/// Inverse-variance weights from the binomial standard error, floored at
/// 0.1 sqrt(0.25 / n_runs).
std::vector<double> solvability_weights(std::span<const double> p_hats, int n_runs);

/// Fits the tanh curve over a positive abscissa (noise level or shot count).
/// Fewer than four points, or a non-positive abscissa, is invalid-argument;
/// constant data is returned censored.
TanhFit fit_tanh(std::span<const double> abscissa, std::span<const double> p_hats,
                 std::span<const double> weights = {});

struct ResilienceProfile {
    double sigma_star = 0.0;
    double m_star = 0.0;  // signed; negative for a falling curve
    double sigma_res = 0.0;
    bool sigma_star_censored = false;
    bool sigma_res_censored = false;
};

ResilienceProfile resilience_metrics(const TanhFit& fit);

/// Flags a fit whose sigma* lies more than `decades` outside [lo, hi].
void censor_outside_grid(TanhFit& fit, double lo, double hi, double decades = 1.0);

// ---------------------------------------------------------------------------
// Decay of the resilience threshold with system size.

enum class DecayFamily { kExp, kPowerLaw, kLog };

std::string_view to_string(DecayFamily family);
DecayFamily decay_family_from_string(std::string_view name);

/// k exp(-g n), k n^-g, k ln(n)^-g
double decay_model(DecayFamily family, double n, double k, double gamma);

struct DecayFit {
    DecayFamily family = DecayFamily::kPowerLaw;
    double k = 0.0;
    double gamma = 0.0;
    double k_err = 0.0;
    double gamma_err = 0.0;
    std::vector<double> ns;
    std::vector<double> residuals;  // sigma*(n) - f(n)
    double mse = 0.0;               // mean squared residual
    bool log_space = false;

    double operator()(double n) const { return decay_model(family, n, k, gamma); }
};

/**
 * Fits a decay family to (n, value) pairs. The default minimizes squared
 * residuals in linear space, started from the log-space regression. With
 * `log_space` the fit is the straight-line regression of ln(value) on the
 * family's transformed abscissa; residuals and mse are still linear-space.
 */
DecayFit fit_decay(std::span<const double> ns, std::span<const double> values, DecayFamily family,
                   bool log_space = false);

// ---------------------------------------------------------------------------
// Shot-requirement projections.

/// eps(n) = prefactor n^n_power exp(-exp_rate n) ln(n)^(-log_power)
struct ToleranceModel {
    double prefactor = 1.0;
    double n_power = 0.0;
    double exp_rate = 0.0;
    double log_power = 0.0;

    double operator()(double n) const;
};

/// Published tolerable-RAE curves for NGD on BENQO, one per decay family.
ToleranceModel published_tolerance(DecayFamily family);

/// eps_FS(n, shots) = prefactor n^n_power exp(exp_rate n) / sqrt(shots)
struct SamplingErrorModel {
    double prefactor = 4.0;
    double exp_rate = 0.04;
    double n_power = 0.0;

    double operator()(double n, double shots) const;
};

/// n_calls(n) = iterations (per_iteration + per_parameter n). Defaults: NGD
/// with k_max = 20 and one loss call plus a 2n-call gradient per iteration.
struct CallModel {
    double iterations = 20.0;
    double per_iteration = 1.0;
    double per_parameter = 2.0;

    double operator()(double n) const { return iterations * (per_iteration + per_parameter * n); }
};

struct ProjectionRow {
    int n = 0;
    double eps_star = 0.0;
    double required_shots = 0.0;  // (eps_FS(n, 1) / eps*(n))^2
    double shot_ceiling = 0.0;    // 2^n / n_calls(n)
    double n_calls = 0.0;
    // Fewer than one shot fits below the ceiling.
    bool below_one_shot = false;
    // required_shots < shot_ceiling and at least one shot is allowed.
    bool feasible = false;
};

std::vector<ProjectionRow> project_shots(const ToleranceModel& eps_star, const SamplingErrorModel& eps_fs,
                                         const CallModel& calls, int n_lo, int n_hi);

/// Smallest n from which every row to the end of the table is feasible, or
/// -1 when the final row is infeasible.
int feasibility_window_start(const std::vector<ProjectionRow>& rows);

/// eps*(n) = sigma*(n) / sqrt(Var(n)) pointwise.
std::vector<double> convert_to_rae(std::span<const double> sigma_star, std::span<const double> variance);

/// shots * calls * depth * t_gate seconds. All factors must be positive.
double runtime_lower_bound(double shots, double calls, double depth, double t_gate);

}  // namespace vqnoise
