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

#include "vqnoise/fitlab.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "vqnoise/errors.hpp"

namespace vqnoise {

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t m = xs.size();
    if (m != ys.size()) throw std::invalid_argument("fit_line: xs and ys differ in length");
    if (m < 2) throw std::invalid_argument("fit_line: need at least two points");
    const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(m));
    const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(m));
    const double mx = x.mean();
    const double my = y.mean();
    const double sxx = (x.array() - mx).square().sum();
    if (sxx == 0.0) throw DegenerateInputError("fit_line: all abscissae are equal");
    const double sxy = ((x.array() - mx) * (y.array() - my)).sum();

    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    const Eigen::ArrayXd res = y.array() - (f.intercept + f.slope * x.array());
    const double ssr = res.square().sum();
    const double sst = (y.array() - my).square().sum();
    f.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
    if (m > 2) {
        const double s2 = ssr / static_cast<double>(m - 2);
        f.slope_err = std::sqrt(s2 / sxx);
        f.intercept_err = std::sqrt(s2 * (1.0 / static_cast<double>(m) + mx * mx / sxx));
    }
    return f;
}

namespace {

struct Problem {
    const ScalarModel& model;
    std::span<const double> xs;
    std::span<const double> ys;
    Eigen::VectorXd sqrt_w;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    Eigen::VectorXd clamp(Eigen::VectorXd p) const {
        if (lower.size()) p = p.cwiseMax(lower);
        if (upper.size()) p = p.cwiseMin(upper);
        return p;
    }

    // Weighted residuals sqrt(w) (y - f).
    Eigen::VectorXd residuals(const Eigen::VectorXd& p) const {
        Eigen::VectorXd r(static_cast<Eigen::Index>(xs.size()));
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const auto idx = static_cast<Eigen::Index>(i);
            r[idx] = sqrt_w[idx] * (ys[i] - model(xs[i], p));
        }
        return r;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& p, double rel_step) const {
        Eigen::MatrixXd j(static_cast<Eigen::Index>(xs.size()), p.size());
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            const double h = rel_step * std::max(1.0, std::abs(p[k]));
            Eigen::VectorXd a = p, b = p;
            a[k] += h;
            b[k] -= h;
            // One-sided near an active bound.
            if (upper.size() && a[k] > upper[k]) a[k] = p[k];
            if (lower.size() && b[k] < lower[k]) b[k] = p[k];
            const double span = a[k] - b[k];
            j.col(k) = span > 0.0 ? Eigen::VectorXd((residuals(a) - residuals(b)) / span)
                                  : Eigen::VectorXd::Zero(j.rows());
        }
        return j;
    }
};

FitResult levenberg_marquardt(const Problem& prob, Eigen::VectorXd p, const NllsOptions& opt) {
    FitResult out;
    p = prob.clamp(p);
    Eigen::VectorXd r = prob.residuals(p);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    int it = 0;
    bool converged = false;
    if (!std::isfinite(cost)) {
        out.params = p;
        out.cost = cost;
        return out;
    }
    for (; it < opt.max_iterations && !converged; ++it) {
        const Eigen::MatrixXd jac = prob.jacobian(p, opt.jacobian_step);
        Eigen::MatrixXd a = jac.transpose() * jac;
        Eigen::VectorXd g = jac.transpose() * r;
        // Parameters sitting on a bound with the descent direction pointing
        // out of the box are frozen for this iteration.
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            const bool at_lower = prob.lower.size() && p[k] <= prob.lower[k] && g[k] > 0.0;
            const bool at_upper = prob.upper.size() && p[k] >= prob.upper[k] && g[k] < 0.0;
            if (at_lower || at_upper) {
                g[k] = 0.0;
                a.row(k).setZero();
                a.col(k).setZero();
                a(k, k) = 1.0;
            }
        }
        if (g.lpNorm<Eigen::Infinity>() <= opt.gradient_tolerance * std::max(1.0, cost)) {
            converged = true;
            break;
        }
        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd damped = a;
            for (Eigen::Index k = 0; k < a.rows(); ++k) damped(k, k) += lambda * std::max(a(k, k), 1e-12);
            const Eigen::VectorXd step = -damped.ldlt().solve(g);
            const Eigen::VectorXd trial = prob.clamp(p + step);
            const Eigen::VectorXd r_trial = prob.residuals(trial);
            const double c_trial = r_trial.squaredNorm();
            if (std::isfinite(c_trial) && c_trial < cost) {
                const double dp = (trial - p).norm();
                const double dc = cost - c_trial;
                p = trial;
                r = r_trial;
                cost = c_trial;
                lambda = std::max(lambda / 3.0, 1e-15);
                accepted = true;
                if (dc <= opt.cost_tolerance * std::max(cost, 1e-300) ||
                    dp <= opt.step_tolerance * (p.norm() + opt.step_tolerance) || cost == 0.0) {
                    converged = true;
                }
            } else {
                lambda *= 4.0;
                if (lambda > 1e16) {
                    // No descent direction left at this resolution: a local minimum.
                    converged = true;
                    break;
                }
            }
        }
    }
    out.params = p;
    out.cost = cost;
    out.iterations = it;
    out.converged = converged;
    return out;
}

}  // namespace

FitResult nlls_fit(const ScalarModel& model, std::span<const double> xs, std::span<const double> ys,
                   std::span<const double> weights, const std::vector<Eigen::VectorXd>& starts,
                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, const NllsOptions& options) {
    if (xs.size() != ys.size()) throw std::invalid_argument("nlls_fit: xs and ys differ in length");
    if (starts.empty()) throw std::invalid_argument("nlls_fit: no start point");
    const Eigen::Index k = starts.front().size();
    if (static_cast<Eigen::Index>(xs.size()) < k) {
        throw std::invalid_argument("nlls_fit: fewer data points than parameters");
    }
    if (!weights.empty() && weights.size() != xs.size()) {
        throw std::invalid_argument("nlls_fit: weights length mismatch");
    }
    if ((lower.size() && lower.size() != k) || (upper.size() && upper.size() != k)) {
        throw std::invalid_argument("nlls_fit: bounds length mismatch");
    }
    Problem prob{model, xs, ys, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(xs.size())), lower, upper};
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0) throw std::invalid_argument("nlls_fit: negative weight");
        prob.sqrt_w[static_cast<Eigen::Index>(i)] = std::sqrt(weights[i]);
    }

    FitResult best;
    bool have = false;
    std::string diagnostics;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        if (starts[s].size() != k) throw std::invalid_argument("nlls_fit: start points differ in size");
        FitResult r = levenberg_marquardt(prob, starts[s], options);
        r.start_index = static_cast<int>(s);
        if (!r.converged || !std::isfinite(r.cost)) {
            diagnostics += " start " + std::to_string(s) + ": cost " + std::to_string(r.cost) + " after " +
                           std::to_string(r.iterations) + " iterations;";
            continue;
        }
        if (!have || r.cost < best.cost) {
            best = std::move(r);
            have = true;
        }
    }
    if (!have) throw FitFailure("nlls_fit: no start converged:" + diagnostics);

    const Eigen::MatrixXd jac = prob.jacobian(best.params, options.jacobian_step);
    const auto m = static_cast<double>(xs.size());
    const double s2 = m > static_cast<double>(k) ? best.cost / (m - static_cast<double>(k)) : 0.0;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    best.covariance = s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
    best.std_errors = best.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    best.residuals.resize(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        best.residuals[static_cast<Eigen::Index>(i)] = ys[i] - model(xs[i], best.params);
    }
    return best;
}

// ---------------------------------------------------------------------------

double tanh_model(double s, double p_u, double p_l, double b, double c) {
    return (p_u - p_l) / 2 * std::tanh(-b * std::log(s) + c) + (p_u + p_l) / 2;
}

double TanhFit::operator()(double s) const { return tanh_model(s, p_u, p_l, b, c); }

std::vector<double> solvability_weights(std::span<const double> p_hats, int n_runs) {
    if (n_runs < 1) throw std::invalid_argument("solvability_weights: n_runs must be >= 1");
    const double floor = 0.1 * std::sqrt(0.25 / n_runs);
    std::vector<double> w;
    w.reserve(p_hats.size());
    for (double p : p_hats) {
        const double se = std::max(std::sqrt(std::max(p * (1 - p), 0.0) / n_runs), floor);
        w.push_back(1.0 / (se * se));
    }
    return w;
}

TanhFit fit_tanh(std::span<const double> abscissa, std::span<const double> p_hats, std::span<const double> weights) {
    if (abscissa.size() != p_hats.size()) throw std::invalid_argument("fit_tanh: length mismatch");
    if (abscissa.size() < 4) throw std::invalid_argument("fit_tanh: need at least four points");
    for (double s : abscissa) {
        if (!(s > 0.0)) throw std::invalid_argument("fit_tanh: abscissa must be positive");
    }
    const auto [lo_it, hi_it] = std::minmax_element(p_hats.begin(), p_hats.end());
    TanhFit fit;
    if (*hi_it - *lo_it < 1e-12) {
        fit.p_u = fit.p_l = *hi_it;
        fit.censored = true;
        fit.censor_reason = "constant data";
        return fit;
    }

    // Midrange crossing in log abscissa, by linear interpolation between the
    // first pair of neighbours that brackets it.
    std::vector<std::size_t> order(abscissa.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return abscissa[a] < abscissa[b]; });
    const double mid = (*hi_it + *lo_it) / 2;
    double log_mid = 0.5 * (std::log(abscissa[order.front()]) + std::log(abscissa[order.back()]));
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const double y0 = p_hats[order[i]] - mid;
        const double y1 = p_hats[order[i + 1]] - mid;
        if (y0 == 0.0 || y0 * y1 < 0.0) {
            const double x0 = std::log(abscissa[order[i]]);
            const double x1 = std::log(abscissa[order[i + 1]]);
            log_mid = y0 == 0.0 ? x0 : x0 + (x1 - x0) * y0 / (y0 - y1);
            break;
        }
    }
    // Falling curves start with the larger value at small abscissa.
    const bool falling = p_hats[order.front()] >= p_hats[order.back()];
    const double p_u0 = falling ? *hi_it : *lo_it;
    const double p_l0 = falling ? *lo_it : *hi_it;

    std::vector<Eigen::VectorXd> starts;
    for (double b : {0.5, 1.0, 2.0, 4.0}) {
        Eigen::VectorXd s(4);
        s << p_u0, p_l0, b, b * log_mid;
        starts.push_back(s);
    }
    const ScalarModel model = [](double x, const Eigen::VectorXd& p) { return tanh_model(x, p[0], p[1], p[2], p[3]); };
    Eigen::VectorXd lower(4), upper(4);
    const double inf = std::numeric_limits<double>::infinity();
    lower << 0.0, 0.0, 1e-8, -inf;
    upper << 1.0, 1.0, inf, inf;

    const FitResult r = nlls_fit(model, abscissa, p_hats, weights, starts, lower, upper);
    fit.p_u = r.params[0];
    fit.p_l = r.params[1];
    fit.b = r.params[2];
    fit.c = r.params[3];
    fit.covariance = r.covariance;
    fit.residual_norm = r.residuals.norm();
    return fit;
}

ResilienceProfile resilience_metrics(const TanhFit& fit) {
    ResilienceProfile out;
    if (fit.censored || !(fit.b > 0.0)) {
        out.sigma_star_censored = out.sigma_res_censored = true;
        out.sigma_star = out.sigma_res = std::numeric_limits<double>::quiet_NaN();
        out.m_star = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.sigma_star = std::exp(fit.c / fit.b);
    out.m_star = fit.b * (fit.p_l - fit.p_u) / 2 * std::exp(-fit.c / fit.b);
    if (fit.p_u <= 0.0 || fit.p_u <= fit.p_l || fit.p_l >= 0.9 * fit.p_u) {
        out.sigma_res_censored = true;
        out.sigma_res = std::numeric_limits<double>::quiet_NaN();
    } else {
        const double y = (0.8 * fit.p_u - fit.p_l) / (fit.p_u - fit.p_l);
        out.sigma_res = std::exp((fit.c - std::atanh(y)) / fit.b);
    }
    return out;
}

void censor_outside_grid(TanhFit& fit, double lo, double hi, double decades) {
    if (fit.censored) return;
    const double ls = fit.c / fit.b / std::log(10.0);
    if (ls < std::log10(lo) - decades || ls > std::log10(hi) + decades) {
        fit.censored = true;
        fit.censor_reason = "sigma* outside the tested grid";
    }
}

// ---------------------------------------------------------------------------

std::string_view to_string(DecayFamily family) {
    switch (family) {
        case DecayFamily::kExp: return "exp";
        case DecayFamily::kPowerLaw: return "pl";
        case DecayFamily::kLog: return "log";
    }
    return "?";
}

DecayFamily decay_family_from_string(std::string_view name) {
    if (name == "exp") return DecayFamily::kExp;
    if (name == "pl" || name == "power") return DecayFamily::kPowerLaw;
    if (name == "log") return DecayFamily::kLog;
    throw std::invalid_argument("unknown decay family '" + std::string(name) + "'");
}

namespace {

// ln f = ln k - gamma * abscissa(n)
double decay_abscissa(DecayFamily family, double n) {
    switch (family) {
        case DecayFamily::kExp: return n;
        case DecayFamily::kPowerLaw: return std::log(n);
        case DecayFamily::kLog: return std::log(std::log(n));
    }
    return 0.0;
}

}  // namespace

double decay_model(DecayFamily family, double n, double k, double gamma) {
    return k * std::exp(-gamma * decay_abscissa(family, n));
}

DecayFit fit_decay(std::span<const double> ns, std::span<const double> values, DecayFamily family, bool log_space) {
    if (ns.size() != values.size()) throw std::invalid_argument("fit_decay: length mismatch");
    if (ns.size() < 3) throw std::invalid_argument("fit_decay: need at least three points");
    std::vector<double> ax, ly;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(values[i] > 0.0)) throw std::invalid_argument("fit_decay: values must be positive");
        if (family == DecayFamily::kLog && !(ns[i] > 1.0)) {
            throw std::invalid_argument("fit_decay: log family needs n > 1");
        }
        if (!(ns[i] > 0.0)) throw std::invalid_argument("fit_decay: n must be positive");
        ax.push_back(decay_abscissa(family, ns[i]));
        ly.push_back(std::log(values[i]));
    }
    const LinearFit lf = fit_line(ax, ly);

    DecayFit out;
    out.family = family;
    out.log_space = log_space;
    out.ns.assign(ns.begin(), ns.end());
    if (log_space) {
        out.k = std::exp(lf.intercept);
        out.gamma = -lf.slope;
        out.k_err = out.k * lf.intercept_err;  // delta method
        out.gamma_err = lf.slope_err;
    } else {
        const ScalarModel model = [family](double n, const Eigen::VectorXd& p) {
            return decay_model(family, n, p[0], p[1]);
        };
        std::vector<Eigen::VectorXd> starts;
        Eigen::VectorXd s(2);
        s << std::exp(lf.intercept), -lf.slope;
        starts.push_back(s);
        const FitResult r = nlls_fit(model, ns, values, {}, starts);
        out.k = r.params[0];
        out.gamma = r.params[1];
        out.k_err = r.std_errors[0];
        out.gamma_err = r.std_errors[1];
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double e = values[i] - out(ns[i]);
        out.residuals.push_back(e);
        sum += e * e;
    }
    out.mse = sum / static_cast<double>(ns.size());
    return out;
}

// ---------------------------------------------------------------------------

double ToleranceModel::operator()(double n) const {
    double v = prefactor * std::pow(n, n_power) * std::exp(-exp_rate * n);
    if (log_power != 0.0) v *= std::pow(std::log(n), -log_power);
    return v;
}

ToleranceModel published_tolerance(DecayFamily family) {
    switch (family) {
        case DecayFamily::kExp: return {8.5, 0.4, 0.5, 0.0};
        case DecayFamily::kPowerLaw: return {22.0, -1.8, 0.0, 0.0};
        case DecayFamily::kLog: return {2.5, 0.4, 0.0, 3.2};
    }
    throw std::invalid_argument("unknown decay family");
}

double SamplingErrorModel::operator()(double n, double shots) const {
    return prefactor * std::pow(n, n_power) * std::exp(exp_rate * n) / std::sqrt(shots);
}

std::vector<ProjectionRow> project_shots(const ToleranceModel& eps_star, const SamplingErrorModel& eps_fs,
                                         const CallModel& calls, int n_lo, int n_hi) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("project_shots: bad n range");
    std::vector<ProjectionRow> rows;
    for (int n = n_lo; n <= n_hi; ++n) {
        ProjectionRow r;
        r.n = n;
        r.eps_star = eps_star(n);
        if (!(r.eps_star > 0.0)) throw std::invalid_argument("project_shots: tolerance must be positive");
        r.n_calls = calls(n);
        const double ratio = eps_fs(n, 1.0) / r.eps_star;
        r.required_shots = ratio * ratio;
        r.shot_ceiling = std::ldexp(1.0, n) / r.n_calls;
        r.below_one_shot = r.shot_ceiling < 1.0;
        r.feasible = !r.below_one_shot && r.required_shots < r.shot_ceiling;
        rows.push_back(r);
    }
    return rows;
}

int feasibility_window_start(const std::vector<ProjectionRow>& rows) {
    int start = -1;
    for (auto it = rows.rbegin(); it != rows.rend() && it->feasible; ++it) start = it->n;
    return start;
}

std::vector<double> convert_to_rae(std::span<const double> sigma_star, std::span<const double> variance) {
    if (sigma_star.size() != variance.size()) throw std::invalid_argument("convert_to_rae: grid mismatch");
    std::vector<double> out;
    for (std::size_t i = 0; i < sigma_star.size(); ++i) {
        if (!(variance[i] > 0.0)) throw std::invalid_argument("convert_to_rae: variance must be positive");
        out.push_back(sigma_star[i] / std::sqrt(variance[i]));
    }
    return out;
}

double runtime_lower_bound(double shots, double calls, double depth, double t_gate) {
    if (!(shots > 0 && calls > 0 && depth > 0 && t_gate > 0)) {
        throw std::invalid_argument("runtime_lower_bound: all factors must be positive");
    }
    return shots * calls * depth * t_gate;
}

}  // namespace vqnoise
