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

#include "vqnoise/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "vqnoise/fitlab.hpp"
#include "vqnoise/losses.hpp"
#include "vqnoise/noise.hpp"
#include "vqnoise/problems.hpp"
#include "vqnoise/random.hpp"

namespace vqnoise {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

const char* title_of(const std::string& id) {
    static const std::map<std::string, const char*> titles{
        {"qubo-ising", "QUBO and Ising energies agree on every bitstring, n 1..12"},
        {"gradient-check", "parameter shift matches central differences"},
        {"basis-states", "basis-state parameters reproduce the energy table"},
        {"variance-ordering", "BENQO loss variance exceeds QAOA and decays as a power law"},
        {"sigmoid-n6", "NGD solvability at n=6 is sigmoidal with sigma* near 0.13"},
        {"resilience-decay", "NGD sigma*(n) power-law exponent in [1.7, 2.9]"},
        {"finite-sampling", "shot-noise RAE scales as shots^-1/2 with the reference prefactor"},
        {"additive-error", "shot noise on BENQO is mostly additive at n=6"},
        {"solution-space", "fraction of states with AR >= 0.9 at n=10"},
        {"projection", "shot-requirement projection windows and runtime bound"},
        {"projection-formulas", "projection infeasibility below n=9, pl window and runtime bound"},
        {"determinism", "full sweep is bit-identical across worker counts"},
        {"determinism-quick", "small four-optimizer sweep is bit-identical across worker counts"},
        {"fit-engine", "tanh and decay fits recover known parameters"},
    };
    const auto it = titles.find(id);
    return it == titles.end() ? nullptr : it->second;
}

double rel(double got, double want) { return std::abs(got / want - 1.0); }

std::string records_csv(const SweepResult& r) {
    std::ostringstream os;
    write_records_csv(os, r.records, r.thresholds);
    write_cells_csv(os, r.cells, r.thresholds);
    return os.str();
}

}  // namespace

CheckRunner::CheckRunner(CheckOptions options) : options_(options) {
    workers_ = resolve_workers(options_.workers, default_config());
}

const std::vector<std::string>& CheckRunner::ids() {
    static const std::vector<std::string> v{"qubo-ising",   "gradient-check",   "basis-states",   "variance-ordering",
                                            "sigmoid-n6",   "resilience-decay", "finite-sampling", "additive-error",
                                            "solution-space", "projection",     "determinism",    "fit-engine"};
    return v;
}

const std::vector<std::string>& CheckRunner::validation_ids() {
    static const std::vector<std::string> v{"qubo-ising", "gradient-check",      "basis-states",
                                            "fit-engine", "projection-formulas", "determinism-quick"};
    return v;
}

CheckResult CheckRunner::run(const std::string& id) {
    const char* title = title_of(id);
    if (title == nullptr) throw std::invalid_argument("unknown check: " + id);
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        if (id == "qubo-ising") r = qubo_ising();
        else if (id == "gradient-check") r = gradient_check();
        else if (id == "basis-states") r = basis_states();
        else if (id == "variance-ordering") r = variance_ordering();
        else if (id == "sigmoid-n6") r = sigmoid_n6();
        else if (id == "resilience-decay") r = resilience_decay();
        else if (id == "finite-sampling") r = finite_sampling();
        else if (id == "additive-error") r = additive_error();
        else if (id == "solution-space") r = solution_space();
        else if (id == "projection") r = projection();
        else if (id == "projection-formulas") r = projection_formulas();
        else if (id == "determinism") r = determinism();
        else if (id == "determinism-quick") r = determinism_small();
        else r = fit_engine();
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.id = id;
    r.title = title;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

CheckResult CheckRunner::qubo_ising() {
    double worst = 0.0;
    long checked = 0;
    for (int n = 1; n <= 12; ++n) {
        for (int i = 0; i < 100; ++i) {
            const QuboInstance q = generate_random_qubo(n, derive_seed(options_.seed, {10, std::uint64_t(n), std::uint64_t(i)}));
            const IsingModel m = qubo_to_ising(q);
            for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n); ++idx) {
                const Bitstring b{idx, n};
                worst = std::max(worst, std::abs(q.evaluate(b.assignment()) - ising_energy(m, b, true)));
                ++checked;
            }
        }
    }
    CheckResult r;
    r.passed = worst <= 1e-9;
    r.detail = fmt("%ld bitstrings, max |xQx - (E + offset)| = %.3g (tol 1e-9)", checked, worst);
    return r;
}

// Relative to max(1, |fd|): losses near a stationary point have gradients
// that are zero up to rounding.
CheckResult CheckRunner::gradient_check() {
    constexpr double h = 1e-5;
    double worst = 0.0;
    int cases = 0;
    for (AnsatzKind kind : {AnsatzKind::kBenqo, AnsatzKind::kVqe2l, AnsatzKind::kQaoa}) {
        for (int n : {2, 4, 6}) {
            const LossFunction f(kind, qubo_to_ising(generate_random_qubo(n, derive_seed(options_.seed, {11, std::uint64_t(n)}))));
            Rng rng(derive_seed(options_.seed, {12, std::uint64_t(kind), std::uint64_t(n)}));
            for (int s = 0; s < 20; ++s) {
                const Eigen::VectorXd theta = rng.uniform_vector(n, -2 * kPi, 2 * kPi);
                const Eigen::VectorXd g = gradient_parameter_shift(f, theta);
                Eigen::VectorXd fd(n);
                for (int i = 0; i < n; ++i) {
                    Eigen::VectorXd tp = theta, tm = theta;
                    tp[i] += h;
                    tm[i] -= h;
                    fd[i] = (exact_loss(f, tp) - exact_loss(f, tm)) / (2 * h);
                }
                worst = std::max(worst, (g - fd).norm() / std::max(1.0, fd.norm()));
                ++cases;
            }
        }
    }
    CheckResult r;
    r.passed = worst <= 1e-6;
    r.detail = fmt("%d parameter points, max relative deviation %.3g (tol 1e-6)", cases, worst);
    return r;
}

CheckResult CheckRunner::basis_states() {
    double worst = 0.0;
    long checked = 0;
    for (int n = 1; n <= 10; ++n) {
        const IsingModel m = qubo_to_ising(generate_random_qubo(n, derive_seed(options_.seed, {13, std::uint64_t(n)})));
        const Eigen::VectorXd table = energy_table(m);
        for (AnsatzKind kind : {AnsatzKind::kBenqo, AnsatzKind::kVqe2l}) {
            const LossFunction f(kind, m);
            Eigen::VectorXd theta(n);
            for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n); ++idx) {
                for (int i = 0; i < n; ++i) theta[i] = ((idx >> i) & 1U) ? kPi : 0.0;
                worst = std::max(worst, std::abs(exact_loss(f, theta) - table[Eigen::Index(idx)]));
                ++checked;
            }
        }
    }
    CheckResult r;
    r.passed = worst <= 1e-9;
    r.detail = fmt("%ld basis points, max deviation %.3g (tol 1e-9)", checked, worst);
    return r;
}

// The residual criterion compares the root-mean-square residual with the mean
// variance so that both sides carry the same units.
CheckResult CheckRunner::variance_ordering() {
    const std::uint64_t seed = derive_seed(options_.seed, {14});
    const auto at10 = variance_table({AnsatzKind::kBenqo, AnsatzKind::kQaoa}, {10}, 10000, seed);
    const auto benqo = variance_table({AnsatzKind::kBenqo}, {8, 9, 10, 11, 12}, 10000, seed);
    const double vb = at10.at(0).scan.loss_variance;
    const double vq = at10.at(1).scan.loss_variance;
    std::vector<double> ns, vs;
    for (const VarianceRow& row : benqo) {
        ns.push_back(row.scan.n);
        vs.push_back(row.scan.loss_variance);
    }
    const DecayFit fit = fit_decay(ns, vs, DecayFamily::kPowerLaw);
    double mean = 0.0;
    for (double v : vs) mean += v / double(vs.size());
    const double rms = std::sqrt(fit.mse);
    CheckResult r;
    r.passed = vb > vq && fit.gamma > 0.0 && rms < 0.1 * mean;
    r.detail = fmt("n=10 Var BENQO %.4g vs QAOA %.4g; pl over n 8..12: k %.4g gamma %.4g, rms residual %.3g%% of mean",
                   vb, vq, fit.k, fit.gamma, 100 * rms / mean);
    return r;
}

const SweepResult& CheckRunner::ngd_sweep() {
    if (!ngd_sweep_) {
        ExperimentConfig c = default_config();
        c.master_seed = options_.seed;
        ngd_sweep_ = run_sweep(c, workers_);
    }
    return *ngd_sweep_;
}

CheckResult CheckRunner::sigmoid_n6() {
    const SweepResult& sweep = ngd_sweep();
    const FitReport rep = fit_sweep(sweep.cells, default_config().instances);
    const double want = 8.0 * std::pow(6.0, -2.3);
    CheckResult r;
    for (const TanhRow& row : rep.tanh) {
        if (row.n != 6) continue;
        const double s = row.resilience.sigma_star;
        const double ratio = s / want;
        r.passed = !row.fit.censored && !row.resilience.sigma_star_censored && ratio > 1.0 / 3.0 && ratio < 3.0;
        r.detail = fmt("sigma* = %.4g vs %.4g (ratio %.3g, allowed 1/3..3); p_u %.3g p_l %.3g b %.3g c %.3g%s", s, want,
                       ratio, row.fit.p_u, row.fit.p_l, row.fit.b, row.fit.c, row.fit.censored ? " censored" : "");
        return r;
    }
    r.detail = "no tanh fit at n=6";
    for (const auto& note : rep.notes) r.detail += "; " + note;
    return r;
}

CheckResult CheckRunner::resilience_decay() {
    const SweepResult& sweep = ngd_sweep();
    const FitReport rep = fit_sweep(sweep.cells, default_config().instances);
    CheckResult r;
    for (const DecayRow& d : rep.decay) {
        if (d.fit.family != DecayFamily::kPowerLaw) continue;
        r.passed = d.fit.gamma >= 1.7 && d.fit.gamma <= 2.9;
        std::string stars;
        for (std::size_t i = 0; i < d.sigma_star.size(); ++i)
            stars += fmt("%s%g:%.3g", i ? " " : "", d.fit.ns[i], d.sigma_star[i]);
        r.detail = fmt("pl k %.3g +- %.2g, gamma %.3g +- %.2g over %zu sizes (sigma* %s)", d.fit.k, d.fit.k_err,
                       d.fit.gamma, d.fit.gamma_err, d.fit.ns.size(), stars.c_str());
        return r;
    }
    r.detail = "no power-law decay fit";
    for (const auto& note : rep.notes) r.detail += "; " + note;
    return r;
}

CheckResult CheckRunner::finite_sampling() {
    FsScanOptions o;
    o.n_fixed = 6;
    o.instance_seed = derive_seed(options_.seed, {15});
    Rng rng(derive_seed(options_.seed, {16}));
    const FsErrorScan scan = fs_error_scan(o, rng);
    double rae10 = std::nan("");
    for (const FsScanPoint& p : scan.vs_n)
        if (p.n == 10) rae10 = p.rae;
    const double want = 4.0 * std::exp(0.4) / 32.0;
    const double ratio = rae10 / want;
    CheckResult r;
    r.passed = std::abs(scan.shots_exponent + 0.5) <= 0.05 && ratio >= 0.5 && ratio <= 2.0;
    r.detail = fmt("slope %.4f (want -0.50 +- 0.05); RAE(10, 1024) %.4g vs %.4g (ratio %.3g, allowed 0.5..2)",
                   scan.shots_exponent, rae10, want, ratio);
    return r;
}

CheckResult CheckRunner::additive_error() {
    const LossFunction f(AnsatzKind::kBenqo, qubo_to_ising(generate_random_qubo(6, derive_seed(options_.seed, {17}))));
    Rng rng(derive_seed(options_.seed, {18}));
    const ErrorProfile p = error_decomposition(f, 50, 500, 1024, rng);
    const double mult = p.slope * p.median_abs_loss;
    CheckResult r;
    r.passed = p.intercept > mult;
    r.detail = fmt("s[dL] = %.4g |L| + %.4g; additive %.4g vs multiplicative at median |L| %.4g", p.slope, p.intercept,
                   p.intercept, mult);
    return r;
}

CheckResult CheckRunner::solution_space() {
    const SpectrumSummary s = spectrum_summary(10, 100, {0.9}, derive_seed(options_.seed, {19}));
    const double frac = s.mean_fractions.at(0);
    CheckResult r;
    r.passed = std::abs(frac - 0.20) <= 0.10;
    r.detail = fmt("mean fraction with AR >= 0.9: %.4f (want 0.20 +- 0.10)", frac);
    return r;
}

namespace {

struct ProjectionOutcome {
    bool small_infeasible = true;
    int pl_window = -1;
    int log_window = -1;
    double runtime_pl = 0.0;
    double runtime_log = 0.0;
};

ProjectionOutcome projection_outcome() {
    ProjectionOutcome o;
    const auto tables = project_all(SamplingErrorModel{}, CallModel{}, 3, 100);
    for (const ProjectionTable& t : tables) {
        for (const ProjectionRow& row : t.rows)
            if (row.n < 9 && row.feasible) o.small_infeasible = false;
        const ProjectionRow& last = t.rows.back();
        const double rt = runtime_lower_bound(std::max(1.0, last.required_shots), last.n_calls, 1.0, 100e-9);
        if (t.family == DecayFamily::kPowerLaw) {
            o.pl_window = t.window_start;
            o.runtime_pl = rt;
        } else if (t.family == DecayFamily::kLog) {
            o.log_window = t.window_start;
            o.runtime_log = rt;
        }
    }
    return o;
}

}  // namespace

CheckResult CheckRunner::projection() {
    const ProjectionOutcome o = projection_outcome();
    CheckResult r;
    r.passed = o.small_infeasible && o.pl_window == 25 && o.log_window == 20 && o.runtime_pl > 3600.0 &&
               o.runtime_log > 3600.0;
    r.detail = fmt("n<9 infeasible: %s; window pl %d (want 25), log %d (want 20); runtime at n=100 pl %.3g s, log %.3g s",
                   o.small_infeasible ? "yes" : "no", o.pl_window, o.log_window, o.runtime_pl, o.runtime_log);
    return r;
}

CheckResult CheckRunner::projection_formulas() {
    const ProjectionOutcome o = projection_outcome();
    CheckResult r;
    r.passed = o.small_infeasible && o.pl_window == 25 && o.runtime_pl > 3600.0;
    r.detail = fmt("n<9 infeasible: %s; pl window %d; runtime at n=100 %.3g s", o.small_infeasible ? "yes" : "no",
                   o.pl_window, o.runtime_pl);
    return r;
}

CheckResult CheckRunner::determinism() {
    const SweepResult& cached = ngd_sweep();
    ExperimentConfig c = default_config();
    c.master_seed = options_.seed;
    const int other = workers_ == 1 ? 8 : 1;
    const SweepResult again = run_sweep(c, other);
    const bool same = records_csv(cached) == records_csv(again);
    CheckResult r;
    r.passed = same;
    r.detail = fmt("%zu runs, %d vs %d workers: records and cells CSV %s", again.records.size(), workers_, other,
                   same ? "identical" : "differ");
    return r;
}

CheckResult CheckRunner::determinism_small() {
    ExperimentConfig c = default_config();
    c.master_seed = options_.seed;
    c.n_grid = {3, 4};
    c.instances = 6;
    c.noise_grid = {NoiseSpec::none(), NoiseSpec::gaussian(0.1), NoiseSpec::finite_shots(256)};
    c.optimizers.clear();
    for (const char* name : {"ngd", "spsa", "nft", "powell"}) c.optimizers.push_back(OptimizerSpec::parse(name));
    const std::string a = records_csv(run_sweep(c, 1));
    const std::string b = records_csv(run_sweep(c, 4));
    CheckResult r;
    r.passed = a == b;
    r.detail = fmt("1 vs 4 workers: %s", a == b ? "identical" : "differ");
    return r;
}

CheckResult CheckRunner::fit_engine() {
    std::vector<std::string> failures;
    // Noiseless: every parameter within 1%.
    {
        const auto s = logspace(1e-3, 1e1, 16);
        std::vector<double> p;
        for (double v : s) p.push_back(tanh_model(v, 0.9, 0.1, 2.0, 1.0));
        const TanhFit t = fit_tanh(s, p);
        if (rel(t.p_u, 0.9) > 0.01 || rel(t.p_l, 0.1) > 0.01 || rel(t.b, 2.0) > 0.01 || rel(t.c, 1.0) > 0.01)
            failures.push_back("noiseless tanh");
    }
    struct Truth {
        DecayFamily family;
        double k, gamma;
    };
    const Truth truths[] = {{DecayFamily::kExp, 0.8, 0.3}, {DecayFamily::kPowerLaw, 8.0, 2.3}, {DecayFamily::kLog, 1.2, 2.5}};
    std::vector<double> ns;
    for (int n = 3; n <= 10; ++n) ns.push_back(n);
    for (const Truth& t : truths) {
        std::vector<double> v;
        for (double n : ns) v.push_back(decay_model(t.family, n, t.k, t.gamma));
        const DecayFit f = fit_decay(ns, v, t.family);
        if (rel(f.k, t.k) > 0.01 || rel(f.gamma, t.gamma) > 0.01)
            failures.push_back("noiseless " + std::string(to_string(t.family)));
    }
    // 1% multiplicative jitter over 100 seeds, on the 16-point sweep grid and
    // with the estimators the pipeline uses. The criterion is the RMS relative
    // error of every parameter over the seeds; per-seed hits are reported too.
    const auto s16 = logspace(1e-3, 1e1, 16);
    const double tanh_truth[4] = {0.9, 0.1, 2.0, 1.0};
    double tanh_ms[4] = {0, 0, 0, 0};
    double decay_ms[3][2] = {};
    int tanh_hits = 0, decay_hits = 0;
    constexpr int kSeeds = 100;
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
        Rng rng(derive_seed(options_.seed, {20, seed}));
        std::vector<double> p;
        for (double v : s16) p.push_back(tanh_model(v, 0.9, 0.1, 2.0, 1.0) * (1 + 0.01 * rng.normal()));
        const TanhFit t = fit_tanh(s16, p);
        if (t.censored) failures.push_back(fmt("jittered tanh censored at seed %d", int(seed)));
        const double got[4] = {t.p_u, t.p_l, t.b, t.c};
        bool hit = true;
        for (int i = 0; i < 4; ++i) {
            const double e = rel(got[i], tanh_truth[i]);
            tanh_ms[i] += e * e / kSeeds;
            hit = hit && e < 0.05;
        }
        tanh_hits += hit;
        hit = true;
        for (int i = 0; i < 3; ++i) {
            const Truth& tr = truths[i];
            std::vector<double> v;
            for (double n : ns) v.push_back(decay_model(tr.family, n, tr.k, tr.gamma) * (1 + 0.01 * rng.normal()));
            const DecayFit f = fit_decay(ns, v, tr.family);
            const double ek = rel(f.k, tr.k), eg = rel(f.gamma, tr.gamma);
            decay_ms[i][0] += ek * ek / kSeeds;
            decay_ms[i][1] += eg * eg / kSeeds;
            hit = hit && ek < 0.05 && eg < 0.05;
        }
        decay_hits += hit;
    }
    double worst = 0.0;
    std::string rms = "tanh";
    const char* tanh_names[4] = {"p_u", "p_l", "b", "c"};
    for (int i = 0; i < 4; ++i) {
        worst = std::max(worst, std::sqrt(tanh_ms[i]));
        rms += fmt(" %s %.2f%%", tanh_names[i], 100 * std::sqrt(tanh_ms[i]));
    }
    for (int i = 0; i < 3; ++i) {
        worst = std::max({worst, std::sqrt(decay_ms[i][0]), std::sqrt(decay_ms[i][1])});
        rms += fmt("; %s k %.2f%% gamma %.2f%%", std::string(to_string(truths[i].family)).c_str(),
                   100 * std::sqrt(decay_ms[i][0]), 100 * std::sqrt(decay_ms[i][1]));
    }
    if (worst > 0.05) failures.push_back("jittered RMS error above 5%");
    CheckResult r;
    r.passed = failures.empty();
    r.detail = fmt("noiseless within 1%%; jittered RMS error %s (max 5%%); seeds with every parameter within 5%%: "
                   "tanh %d/100, decay %d/100",
                   rms.c_str(), tanh_hits, decay_hits);
    for (const auto& f : failures) r.detail += "; failed " + f;
    return r;
}

std::string format_check(const CheckResult& r) {
    return fmt("%s %s: %s | %s (%.1f s)", r.passed ? "PASS" : "FAIL", r.id.c_str(), r.title.c_str(), r.detail.c_str(),
               r.seconds);
}

}  // namespace vqnoise
