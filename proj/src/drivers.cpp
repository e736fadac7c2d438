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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

#include "vqnoise/errors.hpp"
#include "vqnoise/harness.hpp"
#include "vqnoise/problems.hpp"

namespace vqnoise {

namespace {

using json = nlohmann::json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

FitReport fit_sweep(const std::vector<CellStats>& cells, int n_runs, double threshold) {
    FitReport report;
    // optimizer -> n -> (sigma, p_hat, runs)
    std::map<std::string, std::map<int, std::vector<std::tuple<double, double, int>>>> curves;
    std::vector<std::string> order;
    for (const CellStats& c : cells) {
        if (std::find(order.begin(), order.end(), c.optimizer) == order.end()) order.push_back(c.optimizer);
        if (NoiseSpec::parse(c.noise).kind != NoiseSpec::Kind::kGaussian || !(c.level > 0.0)) continue;
        for (const SolvabilityStat& s : c.stats) {
            if (std::abs(s.t - threshold) < 1e-12 && s.n_runs > 0)
                curves[c.optimizer][c.n].emplace_back(c.level, s.p_hat, s.n_runs);
        }
    }
    for (const std::string& opt : order) {
        DecayRow base;
        base.optimizer = opt;
        std::vector<double> ns, stars;
        for (auto& [n, pts] : curves[opt]) {
            std::sort(pts.begin(), pts.end());
            std::vector<double> sig, ph;
            int runs = n_runs;
            for (const auto& [s, p, r] : pts) {
                sig.push_back(s);
                ph.push_back(p);
                runs = std::min(runs, r);
            }
            TanhRow row;
            row.optimizer = opt;
            row.n = n;
            row.threshold = threshold;
            if (sig.size() < 4) {
                report.notes.push_back(opt + " n=" + std::to_string(n) + ": fewer than four noise levels");
                continue;
            }
            try {
                row.fit = fit_tanh(sig, ph, solvability_weights(ph, runs));
                censor_outside_grid(row.fit, sig.front(), sig.back());
            } catch (const FitFailure& e) {
                row.fit.censored = true;
                row.fit.censor_reason = e.what();
            }
            row.resilience = resilience_metrics(row.fit);
            if (row.fit.censored) {
                report.notes.push_back(opt + " n=" + std::to_string(n) + " censored: " + row.fit.censor_reason);
            } else {
                ns.push_back(n);
                stars.push_back(row.resilience.sigma_star);
            }
            report.tanh.push_back(row);
        }
        if (ns.size() < 3) {
            report.notes.push_back(opt + ": fewer than three uncensored sigma* values, no decay fit");
            continue;
        }
        for (DecayFamily fam : {DecayFamily::kExp, DecayFamily::kPowerLaw, DecayFamily::kLog}) {
            // log(n)^-g is singular at n = 1.
            std::vector<double> fn, fs;
            for (std::size_t i = 0; i < ns.size(); ++i) {
                if (fam == DecayFamily::kLog && ns[i] <= 1.0) continue;
                fn.push_back(ns[i]);
                fs.push_back(stars[i]);
            }
            DecayRow row = base;
            try {
                row.fit = fit_decay(fn, fs, fam);
                row.sigma_star = fs;
                report.decay.push_back(row);
            } catch (const std::exception& e) {
                report.notes.push_back(opt + " " + std::string(to_string(fam)) + " decay fit failed: " + e.what());
            }
        }
    }
    return report;
}

std::string fit_report_json(const FitReport& report) {
    json j;
    j["schema"] = kFitSchema;
    j["tanh"] = json::array();
    for (const TanhRow& r : report.tanh) {
        const TanhFit& f = r.fit;
        json e{{"optimizer", r.optimizer},
               {"n", r.n},
               {"threshold", r.threshold},
               {"p_u", num(f.p_u)},
               {"p_l", num(f.p_l)},
               {"b", num(f.b)},
               {"c", num(f.c)},
               {"residual_norm", num(f.residual_norm)},
               {"censored", f.censored},
               {"censor_reason", f.censor_reason},
               {"sigma_star", num(r.resilience.sigma_star)},
               {"m_star", num(r.resilience.m_star)},
               {"abs_m_star", num(std::abs(r.resilience.m_star))},
               {"sigma_res", num(r.resilience.sigma_res)}};
        e["std_errors"] = {{"p_u", num(std::sqrt(f.covariance(0, 0)))},
                           {"p_l", num(std::sqrt(f.covariance(1, 1)))},
                           {"b", num(std::sqrt(f.covariance(2, 2)))},
                           {"c", num(std::sqrt(f.covariance(3, 3)))}};
        j["tanh"].push_back(e);
    }
    // Table layout: optimizer -> family -> {k*, gamma*, uncertainties, mse}.
    j["decay"] = json::object();
    std::map<std::string, std::pair<std::string, double>> lowest;
    for (const DecayRow& r : report.decay) {
        const std::string fam(to_string(r.fit.family));
        j["decay"][r.optimizer][fam] = {{"k", num(r.fit.k)},
                                        {"k_err", num(r.fit.k_err)},
                                        {"gamma", num(r.fit.gamma)},
                                        {"gamma_err", num(r.fit.gamma_err)},
                                        {"mse", num(r.fit.mse)},
                                        {"ns", r.fit.ns},
                                        {"sigma_star", r.sigma_star},
                                        {"residuals", r.fit.residuals}};
        auto it = lowest.find(r.optimizer);
        if (it == lowest.end() || r.fit.mse < it->second.second) lowest[r.optimizer] = {fam, r.fit.mse};
    }
    for (const auto& [opt, best] : lowest) j["decay"][opt]["lowest_mse"] = best.first;
    j["notes"] = report.notes;
    return j.dump(2);
}

void write_tanh_csv(std::ostream& os, const FitReport& report) {
    os << "#schema=" << kFitSchema << "\n";
    os << "optimizer,n,threshold,p_u,p_l,b,c,sigma_star,m_star,sigma_res,censored\n";
    for (const TanhRow& r : report.tanh) {
        os << r.optimizer << ',' << r.n << ',' << csv_num(r.threshold) << ',' << csv_num(r.fit.p_u) << ','
           << csv_num(r.fit.p_l) << ',' << csv_num(r.fit.b) << ',' << csv_num(r.fit.c) << ','
           << csv_num(r.resilience.sigma_star) << ',' << csv_num(r.resilience.m_star) << ','
           << csv_num(r.resilience.sigma_res) << ',' << (r.fit.censored ? 1 : 0) << "\n";
    }
}

std::vector<ProjectionTable> project_all(const SamplingErrorModel& eps_fs, const CallModel& calls, int n_lo,
                                         int n_hi) {
    std::vector<ProjectionTable> out;
    for (DecayFamily fam : {DecayFamily::kExp, DecayFamily::kPowerLaw, DecayFamily::kLog}) {
        ProjectionTable t;
        t.family = fam;
        t.tolerance = published_tolerance(fam);
        t.rows = project_shots(t.tolerance, eps_fs, calls, n_lo, n_hi);
        t.window_start = feasibility_window_start(t.rows);
        out.push_back(std::move(t));
    }
    return out;
}

std::string projection_json(const std::vector<ProjectionTable>& tables, double depth, double t_gate) {
    json j;
    j["schema"] = kProjectionSchema;
    j["depth"] = depth;
    j["t_gate"] = t_gate;
    j["families"] = json::object();
    for (const ProjectionTable& t : tables) {
        json rows = json::array();
        for (const ProjectionRow& r : t.rows) {
            rows.push_back({{"n", r.n},
                            {"eps_star", num(r.eps_star)},
                            {"required_shots", num(r.required_shots)},
                            {"shot_ceiling", num(r.shot_ceiling)},
                            {"n_calls", num(r.n_calls)},
                            {"below_one_shot", r.below_one_shot},
                            {"feasible", r.feasible}});
        }
        json fam{{"tolerance",
                  {{"prefactor", t.tolerance.prefactor},
                   {"n_power", t.tolerance.n_power},
                   {"exp_rate", t.tolerance.exp_rate},
                   {"log_power", t.tolerance.log_power}}},
                 {"window_start", t.window_start < 0 ? json(nullptr) : json(t.window_start)},
                 {"rows", rows}};
        if (!t.rows.empty()) {
            const ProjectionRow& last = t.rows.back();
            fam["runtime_seconds_at_n_max"] =
                num(runtime_lower_bound(std::max(1.0, last.required_shots), last.n_calls, depth, t_gate));
        }
        j["families"][std::string(to_string(t.family))] = fam;
    }
    return j.dump(2);
}

void write_projection_csv(std::ostream& os, const std::vector<ProjectionTable>& tables) {
    os << "#schema=" << kProjectionSchema << "\n";
    os << "family,n,eps_star,required_shots,shot_ceiling,n_calls,below_one_shot,feasible\n";
    for (const ProjectionTable& t : tables) {
        for (const ProjectionRow& r : t.rows) {
            os << to_string(t.family) << ',' << r.n << ',' << csv_num(r.eps_star) << ',' << csv_num(r.required_shots)
               << ',' << csv_num(r.shot_ceiling) << ',' << csv_num(r.n_calls) << ',' << (r.below_one_shot ? 1 : 0)
               << ',' << (r.feasible ? 1 : 0) << "\n";
        }
    }
}

std::vector<VarianceRow> variance_table(const std::vector<AnsatzKind>& kinds, const std::vector<int>& ns, int samples,
                                        std::uint64_t seed, bool with_gradient) {
    std::vector<VarianceRow> out;
    for (int n : ns) {
        const IsingModel ising = qubo_to_ising(generate_random_qubo(n, derive_seed(seed, {static_cast<std::uint64_t>(n)})));
        for (AnsatzKind k : kinds) {
            if (k == AnsatzKind::kQaoa && n % 2 != 0) continue;
            const LossFunction f(k, ising);
            Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(n), 100 + static_cast<std::uint64_t>(k)}));
            out.push_back({k, loss_variance_scan(f, samples, -2 * std::numbers::pi, 2 * std::numbers::pi, rng,
                                                 with_gradient)});
        }
    }
    return out;
}

void write_variance_csv(std::ostream& os, const std::vector<VarianceRow>& rows) {
    os << "#schema=" << kVarianceSchema << "\n";
    os << "loss,n,samples,lo,hi,loss_variance,mean_loss,gradient_variance\n";
    for (const VarianceRow& r : rows) {
        os << to_string(r.kind) << ',' << r.scan.n << ',' << r.scan.n_samples << ',' << csv_num(r.scan.lo) << ','
           << csv_num(r.scan.hi) << ',' << csv_num(r.scan.loss_variance) << ',' << csv_num(r.scan.mean_loss) << ','
           << csv_num(r.scan.gradient_variance) << "\n";
    }
}

SpectrumSummary spectrum_summary(int n, int instances, const std::vector<double>& thresholds, std::uint64_t seed,
                                 int histogram_bins) {
    if (instances < 1) throw std::invalid_argument("spectrum_summary needs at least one instance");
    SpectrumSummary s;
    s.n = n;
    s.instances = instances;
    s.thresholds = thresholds;
    s.mean_fractions.assign(thresholds.size(), 0.0);
    s.mean_density.assign(static_cast<std::size_t>(histogram_bins), 0.0);
    for (int i = 0; i < instances; ++i) {
        const IsingModel ising = qubo_to_ising(generate_random_qubo(
            n, derive_seed(seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i)})));
        const SpectrumProfile p = solution_space_profile(ising, thresholds, histogram_bins);
        for (std::size_t t = 0; t < thresholds.size(); ++t) s.mean_fractions[t] += p.fractions[t] / instances;
        for (std::size_t b = 0; b < s.mean_density.size(); ++b) s.mean_density[b] += p.histogram_density[b] / instances;
        s.histogram_edges = p.histogram_edges;
    }
    return s;
}

std::string profile_json(const SpectrumSummary& spectrum, const ErrorProfile* errors) {
    json j;
    j["schema"] = kProfileSchema;
    j["spectrum"] = {{"n", spectrum.n},
                     {"instances", spectrum.instances},
                     {"thresholds", spectrum.thresholds},
                     {"mean_fractions", spectrum.mean_fractions},
                     {"histogram_edges", spectrum.histogram_edges},
                     {"mean_density", spectrum.mean_density}};
    if (errors) {
        const ErrorProfile& e = *errors;
        j["errors"] = {{"point_loss", e.point_loss},
                       {"point_error_std", e.point_error_std},
                       {"slope", e.slope},
                       {"intercept", e.intercept},
                       {"median_abs_loss", e.median_abs_loss},
                       {"additive_dominates", e.intercept > e.slope * e.median_abs_loss},
                       {"representative_loss", e.representative_loss},
                       {"representative_errors", e.representative_errors},
                       {"error_mean", e.error_mean},
                       {"error_std", e.error_std},
                       {"error_skewness", e.error_skewness},
                       {"histogram_edges", e.histogram_edges},
                       {"histogram_density", e.histogram_density}};
    }
    return j.dump(2);
}

}  // namespace vqnoise
