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

#include "vqnoise/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "vqnoise/errors.hpp"
#include "vqnoise/fitlab.hpp"
#include "vqnoise/problems.hpp"

namespace vqnoise {

NoiseSpec NoiseSpec::gaussian(double sigma) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("Gaussian noise needs sigma >= 0");
    return {Kind::kGaussian, sigma, 0};
}

NoiseSpec NoiseSpec::finite_shots(std::uint64_t shots) {
    if (shots < 1) throw std::invalid_argument("shot noise needs n_shots >= 1");
    return {Kind::kShots, 0.0, shots};
}

std::string NoiseSpec::label() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case Kind::kNone: return "none";
        case Kind::kGaussian: os << "gauss:" << sigma; break;
        case Kind::kShots: os << "shots:" << shots; break;
    }
    return os.str();
}

NoiseSpec NoiseSpec::parse(const std::string& text) {
    if (text == "none") return none();
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("bad noise label '" + text + "'");
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    try {
        std::size_t used = 0;
        if (head == "gauss") {
            const double s = std::stod(tail, &used);
            if (used == tail.size()) return gaussian(s);
        } else if (head == "shots") {
            const unsigned long long n = std::stoull(tail, &used);
            if (used == tail.size()) return finite_shots(n);
        }
    } catch (const std::logic_error&) {
    }
    throw std::invalid_argument("bad noise label '" + text + "'");
}

namespace {

double shot_estimate(const LossFunction& f, const Eigen::VectorXd& p, std::uint64_t shots, Rng& rng,
                     NoiseStats* stats) {
    if (f.kind() == AnsatzKind::kBenqo) {
        // Ancilla readout: P(0) = (1 + u)/2 with u = sum_q p_q sin(C_q / K).
        const double u = p.dot((f.energies() / f.scale_k()).array().sin().matrix());
        const double p0 = std::clamp((1.0 + u) / 2.0, 0.0, 1.0);
        std::uint64_t zeros = 0;
        for (std::uint64_t s = 0; s < shots; ++s) zeros += rng.uniform() < p0 ? 1 : 0;
        const double est = (2.0 * static_cast<double>(zeros) - static_cast<double>(shots)) / static_cast<double>(shots);
        if (stats && std::abs(est) >= 1.0) ++stats->clamp_events;
        return from_sinusoidal(f, est) / f.l_max();
    }
    const Counts counts = sample_counts(p, shots, rng);
    double total = 0.0;
    for (const auto& [idx, count] : counts) {
        total += static_cast<double>(count) * f.energies()[static_cast<Eigen::Index>(idx)];
    }
    return total / static_cast<double>(shots) / f.l_max();
}

}  // namespace

double noisy_loss_from_distribution(const LossFunction& f, const Eigen::VectorXd& probabilities,
                                    const NoiseSpec& spec, Rng& rng, NoiseStats* stats) {
    if (stats) ++stats->evaluations;
    switch (spec.kind) {
        case NoiseSpec::Kind::kNone:
            return f.is_zero() ? 0.0 : loss_from_distribution(f, probabilities) / f.l_max();
        case NoiseSpec::Kind::kGaussian: {
            const double exact = f.is_zero() ? 0.0 : loss_from_distribution(f, probabilities) / f.l_max();
            return exact + spec.sigma * rng.normal();
        }
        case NoiseSpec::Kind::kShots:
            if (spec.shots < 1) throw std::invalid_argument("shot noise needs n_shots >= 1");
            if (f.is_zero()) return 0.0;
            return shot_estimate(f, probabilities, spec.shots, rng, stats);
    }
    throw std::logic_error("unknown noise kind");
}

double noisy_loss(const LossFunction& f, const Eigen::VectorXd& theta, const NoiseSpec& spec, Rng& rng,
                  NoiseStats* stats) {
    return noisy_loss_from_distribution(f, candidate_distribution(f, theta), spec, rng, stats);
}

double noisy_shifted_loss(const LossFunction& f, const Eigen::VectorXd& theta, std::size_t term, int sign,
                          const NoiseSpec& spec, Rng& rng, NoiseStats* stats) {
    return noisy_loss_from_distribution(f, shifted_distribution(f, theta, term, sign), spec, rng, stats);
}

double rae(std::span<const double> exact, std::span<const double> noisy) {
    if (exact.size() != noisy.size()) throw std::invalid_argument("rae: sequences differ in length");
    if (exact.size() < 2) throw std::invalid_argument("rae: need at least two values");
    double mean = 0.0;
    for (double e : exact) mean += e;
    mean /= static_cast<double>(exact.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        num += std::abs(noisy[i] - exact[i]);
        den += std::abs(exact[i] - mean);
    }
    if (den == 0.0) throw DegenerateInputError("rae: exact values are all identical");
    return num / den;
}

double fs_rae_point(const LossFunction& f, std::uint64_t shots, int samples, Rng& rng, bool exact) {
    if (samples < 2) throw std::invalid_argument("fs_rae_point: need at least two samples");
    const NoiseSpec spec = exact ? NoiseSpec::none() : NoiseSpec::finite_shots(shots);
    std::vector<double> ex(static_cast<std::size_t>(samples)), noisy(ex.size());
    for (std::size_t s = 0; s < ex.size(); ++s) {
        const Eigen::VectorXd theta = rng.uniform_vector(f.n_params(), -2 * std::numbers::pi, 2 * std::numbers::pi);
        const Eigen::VectorXd p = candidate_distribution(f, theta);
        ex[s] = f.is_zero() ? 0.0 : loss_from_distribution(f, p) / f.l_max();
        noisy[s] = noisy_loss_from_distribution(f, p, spec, rng);
    }
    return rae(ex, noisy);
}

FsErrorScan fs_error_scan(const FsScanOptions& o, Rng& rng) {
    if (o.shots_grid.empty() || o.n_grid.empty()) throw std::invalid_argument("fs_error_scan: empty grid");
    auto loss_for = [&](int n) {
        return LossFunction(o.kind, qubo_to_ising(generate_random_qubo(n, derive_seed(o.instance_seed, {static_cast<std::uint64_t>(n)}))));
    };
    FsErrorScan out;
    {
        const LossFunction f = loss_for(o.n_fixed);
        for (std::uint64_t shots : o.shots_grid) {
            out.vs_shots.push_back({o.n_fixed, shots, fs_rae_point(f, shots, o.samples_per_point, rng, o.exact)});
        }
    }
    for (int n : o.n_grid) {
        const LossFunction f = loss_for(n);
        out.vs_n.push_back({n, o.shots_fixed, fs_rae_point(f, o.shots_fixed, o.samples_per_point, rng, o.exact)});
    }
    out.calibration_rae = fs_rae_point(loss_for(o.n_fixed), o.shots_fixed, o.samples_per_point, rng, o.exact);
    if (o.exact) return out;

    std::vector<double> lx, ly;
    for (const auto& p : out.vs_shots) {
        lx.push_back(std::log(static_cast<double>(p.shots)));
        ly.push_back(std::log(p.rae));
    }
    if (lx.size() >= 2) {
        const LinearFit lf = fit_line(lx, ly);
        out.shots_exponent = lf.slope;
        out.shots_prefactor = std::exp(lf.intercept);
    }
    std::vector<double> nx, ny;
    for (const auto& p : out.vs_n) {
        if (p.n >= o.exp_fit_min_n) {
            nx.push_back(p.n);
            ny.push_back(std::log(p.rae));
        }
    }
    if (nx.size() >= 2) {
        const LinearFit lf = fit_line(nx, ny);
        out.n_rate = lf.slope;
        out.n_prefactor = std::exp(lf.intercept);
    }
    out.calibration_prefactor = out.calibration_rae * std::sqrt(static_cast<double>(o.shots_fixed)) /
                                std::exp(out.n_rate * o.n_fixed);
    return out;
}

ErrorProfile error_decomposition(const LossFunction& f, int n_points, int samples_per_point, std::uint64_t shots,
                                 Rng& rng, int histogram_bins) {
    if (n_points < 10) throw std::invalid_argument("error_decomposition: need n_points >= 10");
    if (samples_per_point < 100) throw std::invalid_argument("error_decomposition: need samples_per_point >= 100");
    if (histogram_bins < 1) throw std::invalid_argument("error_decomposition: need histogram_bins >= 1");
    const NoiseSpec spec = NoiseSpec::finite_shots(shots);
    ErrorProfile out;
    std::vector<double> abs_loss;
    for (int pt = 0; pt < n_points; ++pt) {
        const Eigen::VectorXd theta = rng.uniform_vector(f.n_params(), -2 * std::numbers::pi, 2 * std::numbers::pi);
        const Eigen::VectorXd p = candidate_distribution(f, theta);
        const double exact = f.is_zero() ? 0.0 : loss_from_distribution(f, p) / f.l_max();
        std::vector<double> errs(static_cast<std::size_t>(samples_per_point));
        for (auto& e : errs) e = noisy_loss_from_distribution(f, p, spec, rng) - exact;
        double mean = 0.0;
        for (double e : errs) mean += e;
        mean /= static_cast<double>(errs.size());
        double ss = 0.0;
        for (double e : errs) ss += (e - mean) * (e - mean);
        out.point_loss.push_back(exact);
        out.point_error_std.push_back(std::sqrt(ss / static_cast<double>(errs.size() - 1)));
        abs_loss.push_back(std::abs(exact));
        if (pt == 0) {
            out.representative_errors = errs;
            out.representative_loss = exact;
        }
    }

    std::vector<double> sorted = abs_loss;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    out.median_abs_loss = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    try {
        const LinearFit lf = fit_line(abs_loss, out.point_error_std);
        out.slope = lf.slope;
        out.intercept = lf.intercept;
    } catch (const DegenerateInputError&) {
        // Every point has the same |loss| (e.g. a vanishing cost operator).
        out.slope = 0.0;
        double s = 0.0;
        for (double v : out.point_error_std) s += v;
        out.intercept = s / static_cast<double>(out.point_error_std.size());
    }

    const auto& e = out.representative_errors;
    const auto m = static_cast<double>(e.size());
    double mean = 0.0;
    for (double v : e) mean += v;
    mean /= m;
    double m2 = 0.0, m3 = 0.0;
    for (double v : e) {
        m2 += (v - mean) * (v - mean);
        m3 += (v - mean) * (v - mean) * (v - mean);
    }
    out.error_mean = mean;
    out.error_std = std::sqrt(m2 / (m - 1));
    out.error_skewness = m2 > 0.0 ? (m3 / m) / std::pow(m2 / m, 1.5) : 0.0;

    const auto [lo_it, hi_it] = std::minmax_element(e.begin(), e.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / histogram_bins;
    out.histogram_edges.resize(static_cast<std::size_t>(histogram_bins) + 1);
    for (int b = 0; b <= histogram_bins; ++b) out.histogram_edges[static_cast<std::size_t>(b)] = lo + b * width;
    out.histogram_density.assign(static_cast<std::size_t>(histogram_bins), 0.0);
    for (double v : e) {
        auto b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, histogram_bins - 1);
        out.histogram_density[static_cast<std::size_t>(b)] += 1.0 / (m * width);
    }
    return out;
}

}  // namespace vqnoise
