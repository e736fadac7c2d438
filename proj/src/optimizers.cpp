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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>

#include "vqnoise/errors.hpp"

namespace vqnoise {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Caps the oracle budget at `extra` further calls for the lifetime of the
// scope, never raising an existing cap.
class BudgetScope {
  public:
    BudgetScope(LossOracle& oracle, std::uint64_t extra) : oracle_(oracle), saved_(oracle.budget()) {
        const std::uint64_t used = oracle.calls();
        if (extra != LossOracle::kUnlimited && used + extra < saved_) oracle.set_budget(used + extra);
    }
    ~BudgetScope() { oracle_.set_budget(saved_); }
    BudgetScope(const BudgetScope&) = delete;
    BudgetScope& operator=(const BudgetScope&) = delete;

  private:
    LossOracle& oracle_;
    std::uint64_t saved_;
};

std::uint64_t remaining(const LossOracle& oracle) {
    return oracle.budget() == LossOracle::kUnlimited ? LossOracle::kUnlimited
                                                     : oracle.budget() - oracle.calls();
}

void check_start(const LossOracle& oracle, const Eigen::VectorXd& theta0) {
    if (theta0.size() != oracle.dimension())
        throw std::invalid_argument("theta0 has " + std::to_string(theta0.size()) + " entries, oracle expects " +
                                    std::to_string(oracle.dimension()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Oracles

void LossOracle::charge() {
    if (calls_ >= budget_) throw BudgetExhausted();
    ++calls_;
}

double LossOracle::value(const Eigen::VectorXd& theta) {
    charge();
    return do_value(theta);
}

double LossOracle::shifted_value(const Eigen::VectorXd& theta, std::size_t term, int sign) {
    if (term >= shift_term_count()) throw std::out_of_range("shift term index out of range");
    charge();
    return do_shifted_value(theta, term, sign);
}

double LossOracle::do_shifted_value(const Eigen::VectorXd& theta, std::size_t term, int sign) {
    Eigen::VectorXd shifted = theta;
    shifted[static_cast<Eigen::Index>(term)] += sign > 0 ? kHalfPi : -kHalfPi;
    return do_value(shifted);
}

Eigen::VectorXd LossOracle::combine_shifts(double, const std::vector<double>& plus,
                                           const std::vector<double>& minus) const {
    Eigen::VectorXd g(dimension());
    for (int i = 0; i < dimension(); ++i) g[i] = 0.5 * (plus[i] - minus[i]);
    return g;
}

double VariationalOracle::do_value(const Eigen::VectorXd& theta) {
    return noisy_loss(f_, theta, noise_, rng_, &stats_);
}

double VariationalOracle::do_shifted_value(const Eigen::VectorXd& theta, std::size_t term, int sign) {
    return noisy_shifted_loss(f_, theta, term, sign, noise_, rng_, &stats_);
}

Eigen::VectorXd VariationalOracle::combine_shifts(double center, const std::vector<double>& plus,
                                                  const std::vector<double>& minus) const {
    // The channel returns L / l_max; the shift rule works on L.
    const double s = scale();
    std::vector<double> p(plus.size()), m(minus.size());
    for (std::size_t i = 0; i < plus.size(); ++i) {
        p[i] = plus[i] * s;
        m[i] = minus[i] * s;
    }
    return vqnoise::combine_shifts(f_, center * s, p, m) / s;
}

double VariationalOracle::to_sinusoidal(double loss) const { return vqnoise::to_sinusoidal(f_, loss * scale()); }

double VariationalOracle::from_sinusoidal(double value) const {
    return vqnoise::from_sinusoidal(f_, value) / scale();
}

Eigen::VectorXd parameter_shift_gradient(LossOracle& oracle, const Eigen::VectorXd& theta,
                                         std::optional<double> center) {
    double c = 0.0;
    if (oracle.needs_center()) c = center ? *center : oracle.value(theta);
    const std::size_t m = oracle.shift_term_count();
    std::vector<double> plus(m), minus(m);
    for (std::size_t t = 0; t < m; ++t) {
        plus[t] = oracle.shifted_value(theta, t, +1);
        minus[t] = oracle.shifted_value(theta, t, -1);
    }
    return oracle.combine_shifts(c, plus, minus);
}

void OptRun::record(int iteration, double loss) {
    trajectory.push_back({iteration, loss});
    if (loss < best_loss) {
        best_loss = loss;
        best_iteration = iteration;
    }
}

Eigen::VectorXd init_params(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("init_params needs n >= 1");
    return rng.normal_vector(n);
}

// ---------------------------------------------------------------------------
// NGD: theta <- theta - sqrt(pi n / 2) exp(-4 k^2 / k_max^2) grad / |grad|

OptRun run_ngd(LossOracle& oracle, const Eigen::VectorXd& theta0, const NgdOptions& options) {
    check_start(oracle, theta0);
    if (options.k_max < 1) throw std::invalid_argument("NGD needs k_max >= 1");
    const std::uint64_t start = oracle.calls();
    const int n = oracle.dimension();
    const double eta0 = std::sqrt(std::numbers::pi * n / 2.0);
    const double kk = static_cast<double>(options.k_max) * options.k_max;

    OptRun out;
    Eigen::VectorXd theta = theta0;
    try {
        for (int k = 0; k < options.k_max; ++k) {
            const double loss = oracle.value(theta);
            out.record(k, loss);
            const Eigen::VectorXd g = parameter_shift_gradient(oracle, theta, loss);
            const double norm = g.norm();
            out.iterations = k + 1;
            if (!(norm > 0.0) || !std::isfinite(norm)) {
                ++out.zero_gradient_events;
                continue;
            }
            theta -= eta0 * std::exp(-4.0 * k * k / kk) * (g / norm);
        }
    } catch (const BudgetExhausted&) {
        out.budget_exhausted = true;
    }
    out.theta_final = theta;
    out.n_calls = oracle.calls() - start;
    out.metadata["k_max"] = std::to_string(options.k_max);
    return out;
}

// ---------------------------------------------------------------------------
// SPSA

OptRun run_spsa(LossOracle& oracle, const Eigen::VectorXd& theta0, const SpsaOptions& o) {
    check_start(oracle, theta0);
    if (o.iterations < 1) throw std::invalid_argument("SPSA needs at least one iteration");
    if (o.budget != 0 && o.budget < 3) throw std::invalid_argument("SPSA needs a budget of at least 3");
    const std::uint64_t start = oracle.calls();
    const int n = oracle.dimension();
    const double big_a = o.stability_fraction * o.iterations;
    // Gains fall back to these when calibration is skipped or degenerate.
    double a = o.target_step * std::pow(1.0 + big_a, o.alpha);
    double c = o.c_min;

    const bool fixed = o.a.has_value() && o.c.has_value();
    std::uint64_t calibration = fixed ? 0 : static_cast<std::uint64_t>(o.noise_probes + 2 * o.calibration_pairs);
    std::uint64_t cap = o.budget != 0 ? o.budget : calibration + 2ULL * static_cast<std::uint64_t>(o.iterations);
    if (calibration + 2 > cap) calibration = 0;
    const int iterations =
        static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(o.iterations), (cap - calibration) / 2));

    OptRun out;
    Eigen::VectorXd theta = theta0;
    Eigen::VectorXd delta(n);
    auto draw = [&](Rng& rng) {
        for (int i = 0; i < n; ++i) delta[i] = rng.rademacher();
    };
    // The oracle owns the noise stream; perturbations use their own.
    Rng rng(o.seed);

    try {
        BudgetScope scope(oracle, cap);
        if (calibration > 0) {
            double sum = 0.0, sum2 = 0.0;
            for (int i = 0; i < o.noise_probes; ++i) {
                const double y = oracle.value(theta);
                out.record(0, y);
                sum += y;
                sum2 += y * y;
            }
            const double m = o.noise_probes;
            const double var = o.noise_probes > 1 ? std::max(0.0, (sum2 - sum * sum / m) / (m - 1.0)) : 0.0;
            c = std::clamp(std::sqrt(var), o.c_min, o.c_max);
            double dy = 0.0;
            for (int i = 0; i < o.calibration_pairs; ++i) {
                draw(rng);
                const double yp = oracle.value(theta + c * delta);
                const double ym = oracle.value(theta - c * delta);
                out.record(0, yp);
                out.record(0, ym);
                dy += std::abs(yp - ym);
            }
            dy /= o.calibration_pairs;
            // First step a_0 * dy / (2c) per component equals target_step.
            if (dy > 0.0) a = o.target_step * 2.0 * c * std::pow(1.0 + big_a, o.alpha) / dy;
        }
        if (o.a) a = *o.a;
        if (o.c) c = *o.c;

        for (int k = 0; k < iterations; ++k) {
            const double ak = a / std::pow(k + 1.0 + big_a, o.alpha);
            const double ck = c / std::pow(k + 1.0, o.gamma);
            draw(rng);
            const double yp = oracle.value(theta + ck * delta);
            const double ym = oracle.value(theta - ck * delta);
            out.record(k + 1, yp);
            out.record(k + 1, ym);
            // 1 / delta_i == delta_i for +/-1 entries.
            theta -= ak * ((yp - ym) / (2.0 * ck)) * delta;
            out.iterations = k + 1;
        }
    } catch (const BudgetExhausted&) {
        out.budget_exhausted = true;
    }
    out.theta_final = theta;
    out.n_calls = oracle.calls() - start;
    out.metadata["a"] = fmt(a);
    out.metadata["c"] = fmt(c);
    out.metadata["A"] = fmt(big_a);
    out.metadata["calibration_calls"] = std::to_string(calibration);
    return out;
}

// ---------------------------------------------------------------------------
// NFT

OptRun run_nft(LossOracle& oracle, const Eigen::VectorXd& theta0, const NftOptions& o) {
    check_start(oracle, theta0);
    if (o.reset_interval < 1) throw std::invalid_argument("NFT needs reset_interval >= 1");
    const std::uint64_t start = oracle.calls();
    const int n = oracle.dimension();
    const std::uint64_t max_updates =
        o.max_sweeps > 0 ? static_cast<std::uint64_t>(o.max_sweeps) * static_cast<std::uint64_t>(n)
                         : LossOracle::kUnlimited;

    OptRun out;
    out.approximate = !oracle.sinusoidal_coordinates();
    Eigen::VectorXd theta = theta0;
    try {
        BudgetScope scope(oracle, o.max_evaluations);
        std::optional<double> z0;  // sinusoidal value at theta, if known
        for (std::uint64_t update = 0; update < max_updates; ++update) {
            const int i = static_cast<int>(update % static_cast<std::uint64_t>(n));
            const int iter = static_cast<int>(update);
            if (update % static_cast<std::uint64_t>(o.reset_interval) == 0) z0.reset();
            if (remaining(oracle) < (z0 ? 2u : 3u)) break;
            if (!z0) {
                const double loss = oracle.value(theta);
                out.record(iter, loss);
                z0 = oracle.to_sinusoidal(loss);
            }
            Eigen::VectorXd probe = theta;
            probe[i] = theta[i] + kHalfPi;
            const double lp = oracle.value(probe);
            probe[i] = theta[i] - kHalfPi;
            const double lm = oracle.value(probe);
            out.record(iter, lp);
            out.record(iter, lm);
            const double zp = oracle.to_sinusoidal(lp);
            const double zm = oracle.to_sinusoidal(lm);
            // z(theta_i + x) = mid + p cos x + q sin x
            const double mid = 0.5 * (zp + zm);
            const double q = 0.5 * (zp - zm);
            const double p = *z0 - mid;
            const double r = std::hypot(p, q);
            out.iterations = iter + 1;
            if (r < 1e-12) continue;
            double step = std::atan2(q, p) + std::numbers::pi;
            if (step > std::numbers::pi) step -= 2.0 * std::numbers::pi;
            theta[i] += step;
            z0 = mid - r;
        }
    } catch (const BudgetExhausted&) {
        out.budget_exhausted = true;
    }
    out.theta_final = theta;
    out.n_calls = oracle.calls() - start;
    out.metadata["reset_interval"] = std::to_string(o.reset_interval);
    if (out.approximate) out.metadata["approximate"] = "non-sinusoidal coordinates";
    return out;
}

// ---------------------------------------------------------------------------
// Powell

namespace {

struct Bracket {
    double xa, xb, xc, fa, fb, fc;
};

Bracket bracket(const std::function<double(double)>& g, double xa, double xb) {
    constexpr double gold = 1.618034;
    constexpr double tiny = 1e-21;
    constexpr double grow_limit = 110.0;
    constexpr int max_iter = 1000;
    double fa = g(xa), fb = g(xb);
    if (fa < fb) {
        std::swap(xa, xb);
        std::swap(fa, fb);
    }
    double xc = xb + gold * (xb - xa);
    double fc = g(xc);
    int iter = 0;
    while (fc < fb) {
        const double t1 = (xb - xa) * (fb - fc);
        const double t2 = (xb - xc) * (fb - fa);
        const double val = t2 - t1;
        const double denom = std::abs(val) < tiny ? 2.0 * tiny : 2.0 * val;
        double w = xb - ((xb - xc) * t2 - (xb - xa) * t1) / denom;
        const double wlim = xb + grow_limit * (xc - xb);
        if (++iter > max_iter) break;
        double fw;
        if ((w - xc) * (xb - w) > 0.0) {
            fw = g(w);
            if (fw < fc) {
                xa = xb;
                xb = w;
                fa = fb;
                fb = fw;
                break;
            }
            if (fw > fb) {
                xc = w;
                fc = fw;
                break;
            }
            w = xc + gold * (xc - xb);
            fw = g(w);
        } else if ((w - wlim) * (wlim - xc) >= 0.0) {
            w = wlim;
            fw = g(w);
        } else if ((w - wlim) * (xc - w) > 0.0) {
            fw = g(w);
            if (fw < fc) {
                xb = xc;
                xc = w;
                w = xc + gold * (xc - xb);
                fb = fc;
                fc = fw;
                fw = g(w);
            }
        } else {
            w = xc + gold * (xc - xb);
            fw = g(w);
        }
        xa = xb;
        xb = xc;
        xc = w;
        fa = fb;
        fb = fc;
        fc = fw;
    }
    return {xa, xb, xc, fa, fb, fc};
}

std::pair<double, double> brent(const std::function<double(double)>& g, const Bracket& br, double tol) {
    constexpr double mintol = 1e-11;
    constexpr double cg = 0.3819660;
    constexpr int max_iter = 500;
    double x = br.xb, w = br.xb, v = br.xb;
    double fx = br.fb, fw = br.fb, fv = br.fb;
    double a = std::min(br.xa, br.xc), b = std::max(br.xa, br.xc);
    double deltax = 0.0, rat = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        const double tol1 = tol * std::abs(x) + mintol;
        const double tol2 = 2.0 * tol1;
        const double xmid = 0.5 * (a + b);
        if (std::abs(x - xmid) < tol2 - 0.5 * (b - a)) break;
        if (std::abs(deltax) <= tol1) {
            deltax = x >= xmid ? a - x : b - x;
            rat = cg * deltax;
        } else {
            double t1 = (x - w) * (fx - fv);
            double t2 = (x - v) * (fx - fw);
            double p = (x - v) * t2 - (x - w) * t1;
            t2 = 2.0 * (t2 - t1);
            if (t2 > 0.0) p = -p;
            t2 = std::abs(t2);
            const double dx_prev = deltax;
            deltax = rat;
            if (p > t2 * (a - x) && p < t2 * (b - x) && std::abs(p) < std::abs(0.5 * t2 * dx_prev)) {
                rat = p / t2;
                const double u = x + rat;
                if (u - a < tol2 || b - u < tol2) rat = xmid - x >= 0.0 ? tol1 : -tol1;
            } else {
                deltax = x >= xmid ? a - x : b - x;
                rat = cg * deltax;
            }
        }
        const double u = std::abs(rat) < tol1 ? (rat >= 0.0 ? x + tol1 : x - tol1) : x + rat;
        const double fu = g(u);
        if (fu > fx) {
            if (u < x)
                a = u;
            else
                b = u;
            if (fu <= fw || w == x) {
                v = w;
                w = u;
                fv = fw;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        } else {
            if (u >= x)
                a = x;
            else
                b = x;
            v = w;
            w = x;
            x = u;
            fv = fw;
            fw = fx;
            fx = fu;
        }
    }
    return {x, fx};
}

}  // namespace

std::pair<double, double> line_minimize(const std::function<double(double)>& g, double tol) {
    return brent(g, bracket(g, 0.0, 1.0), tol);
}

OptRun run_powell(LossOracle& oracle, const Eigen::VectorXd& theta0, const PowellOptions& o) {
    check_start(oracle, theta0);
    const int n = oracle.dimension();
    if (o.max_evaluations < static_cast<std::uint64_t>(n) + 1)
        throw std::invalid_argument("Powell needs a budget of at least n + 1");
    const std::uint64_t start = oracle.calls();
    const int max_iter = o.max_iterations > 0 ? o.max_iterations : 1000 * n;
    const double line_tol = 100.0 * o.xtol;

    OptRun out;
    Eigen::MatrixXd direc = Eigen::MatrixXd::Identity(n, n);  // rows are directions
    Eigen::VectorXd x = theta0;
    int iter = 0;
    auto f = [&](const Eigen::VectorXd& p) {
        const double y = oracle.value(p);
        out.record(iter, y);
        return y;
    };
    // Line minimization from x along d; updates x, fval and d (scaled to the step).
    auto line = [&](Eigen::VectorXd& xcur, double& fval, Eigen::VectorXd& d) {
        if (d.isZero(0.0)) return;
        const auto [t, ft] = line_minimize([&](double s) { return f(xcur + s * d); }, line_tol);
        d *= t;
        xcur += d;
        fval = ft;
    };

    try {
        BudgetScope scope(oracle, o.max_evaluations);
        double fval = f(x);
        Eigen::VectorXd x1 = x;
        while (true) {
            const double fx = fval;
            int bigind = 0;
            double delta = 0.0;
            for (int i = 0; i < n; ++i) {
                Eigen::VectorXd d = direc.row(i).transpose();
                const double fx2 = fval;
                Eigen::VectorXd xnew = x;
                double fnew = fval;
                line(xnew, fnew, d);
                x = xnew;
                fval = fnew;
                if (fx2 - fval > delta) {
                    delta = fx2 - fval;
                    bigind = i;
                }
            }
            ++iter;
            out.iterations = iter;
            const double bnd = o.ftol * (std::abs(fx) + std::abs(fval)) + 1e-20;
            if (2.0 * (fx - fval) <= bnd) break;
            if (iter >= max_iter) break;
            if (std::isnan(fx) && std::isnan(fval)) break;

            Eigen::VectorXd d = x - x1;
            x1 = x;
            const double fx2 = f(x + d);
            if (fx > fx2) {
                double t = 2.0 * (fx + fx2 - 2.0 * fval);
                double tmp = fx - fval - delta;
                t *= tmp * tmp;
                tmp = fx - fx2;
                t -= delta * tmp * tmp;
                if (t < 0.0) {
                    Eigen::VectorXd xnew = x;
                    double fnew = fval;
                    line(xnew, fnew, d);
                    x = xnew;
                    fval = fnew;
                    if (!d.isZero(0.0)) {
                        direc.row(bigind) = direc.row(n - 1);
                        direc.row(n - 1) = d.transpose();
                    }
                }
            }
        }
    } catch (const BudgetExhausted&) {
        out.budget_exhausted = true;
    }
    out.theta_final = x;
    out.n_calls = oracle.calls() - start;
    return out;
}

// ---------------------------------------------------------------------------
// Dispatch

namespace {

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

std::map<std::string, PluginOptimizer>& registry() {
    static std::map<std::string, PluginOptimizer> r;
    return r;
}

}  // namespace

std::string_view to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::kNgd: return "ngd";
        case OptimizerKind::kSpsa: return "spsa";
        case OptimizerKind::kNft: return "nft";
        case OptimizerKind::kPowell: return "powell";
        case OptimizerKind::kPlugin: return "plugin";
    }
    return "?";
}

void register_optimizer(const std::string& name, PluginOptimizer fn) {
    if (name.empty() || !fn) throw std::invalid_argument("plugin optimizer needs a name and a callable");
    std::lock_guard lock(registry_mutex());
    registry()[name] = std::move(fn);
}

bool has_optimizer(const std::string& name) {
    std::lock_guard lock(registry_mutex());
    return registry().count(name) != 0;
}

std::string OptimizerSpec::name() const {
    return kind == OptimizerKind::kPlugin ? plugin_name : std::string(to_string(kind));
}

std::map<std::string, std::string> OptimizerSpec::describe() const {
    std::map<std::string, std::string> d{{"optimizer", name()}};
    switch (kind) {
        case OptimizerKind::kNgd:
            d["k_max"] = std::to_string(ngd.k_max);
            break;
        case OptimizerKind::kSpsa:
            d["iterations"] = std::to_string(spsa.iterations);
            d["alpha"] = fmt(spsa.alpha);
            d["gamma"] = fmt(spsa.gamma);
            d["stability_fraction"] = fmt(spsa.stability_fraction);
            d["noise_probes"] = std::to_string(spsa.noise_probes);
            d["calibration_pairs"] = std::to_string(spsa.calibration_pairs);
            d["target_step"] = fmt(spsa.target_step);
            d["c_min"] = fmt(spsa.c_min);
            d["c_max"] = fmt(spsa.c_max);
            if (spsa.a) d["a"] = fmt(*spsa.a);
            if (spsa.c) d["c"] = fmt(*spsa.c);
            if (spsa.budget) d["budget"] = std::to_string(spsa.budget);
            break;
        case OptimizerKind::kNft:
            d["max_evaluations"] = std::to_string(nft.max_evaluations);
            d["reset_interval"] = std::to_string(nft.reset_interval);
            d["max_sweeps"] = std::to_string(nft.max_sweeps);
            break;
        case OptimizerKind::kPowell:
            d["max_evaluations"] = std::to_string(powell.max_evaluations);
            d["xtol"] = fmt(powell.xtol);
            d["ftol"] = fmt(powell.ftol);
            d["max_iterations"] = std::to_string(powell.max_iterations);
            break;
        case OptimizerKind::kPlugin:
            for (const auto& [k, v] : plugin_params) d[k] = fmt(v);
            break;
    }
    return d;
}

OptimizerSpec OptimizerSpec::parse(const std::string& name) {
    OptimizerSpec s;
    if (name == "ngd" || name == "NGD") {
        s.kind = OptimizerKind::kNgd;
    } else if (name == "spsa" || name == "SPSA") {
        s.kind = OptimizerKind::kSpsa;
    } else if (name == "nft" || name == "NFT") {
        s.kind = OptimizerKind::kNft;
    } else if (name == "powell" || name == "Powell" || name == "POWELL") {
        s.kind = OptimizerKind::kPowell;
    } else if (!name.empty()) {
        s.kind = OptimizerKind::kPlugin;
        s.plugin_name = name;
    } else {
        throw ConfigError("empty optimizer name");
    }
    return s;
}

OptRun run(const OptimizerSpec& spec, LossOracle& oracle, const Eigen::VectorXd& theta0) {
    OptRun out;
    switch (spec.kind) {
        case OptimizerKind::kNgd: out = run_ngd(oracle, theta0, spec.ngd); break;
        case OptimizerKind::kSpsa: out = run_spsa(oracle, theta0, spec.spsa); break;
        case OptimizerKind::kNft: out = run_nft(oracle, theta0, spec.nft); break;
        case OptimizerKind::kPowell: out = run_powell(oracle, theta0, spec.powell); break;
        case OptimizerKind::kPlugin: {
            PluginOptimizer fn;
            {
                std::lock_guard lock(registry_mutex());
                auto it = registry().find(spec.plugin_name);
                if (it == registry().end()) throw ConfigError("unknown optimizer '" + spec.plugin_name + "'");
                fn = it->second;
            }
            const std::uint64_t start = oracle.calls();
            out = fn(oracle, theta0, spec.plugin_params);
            out.n_calls = oracle.calls() - start;
            break;
        }
    }
    for (const auto& [k, v] : spec.describe()) out.metadata.emplace(k, v);
    return out;
}

}  // namespace vqnoise
