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

#include "vqnoise/losses.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vqnoise/errors.hpp"

namespace vqnoise {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

void check_theta(const LossFunction& f, const Eigen::VectorXd& theta) {
    if (theta.size() != f.n_params()) {
        throw std::invalid_argument("expected " + std::to_string(f.n_params()) + " parameters, got " +
                                    std::to_string(theta.size()));
    }
}

// Pauli Z_a (b < 0) or Z_a Z_b eigenvalue table.
Eigen::VectorXd pauli_table(int n, int a, int b) {
    Eigen::VectorXd t(Eigen::Index{1} << n);
    for (Eigen::Index x = 0; x < t.size(); ++x) {
        int parity = static_cast<int>((x >> a) & 1);
        if (b >= 0) parity ^= static_cast<int>((x >> b) & 1);
        t[x] = parity ? -1.0 : 1.0;
    }
    return t;
}

StateVector build_state(const LossFunction& f, const Eigen::VectorXd& theta, const ShiftTerm* term,
                        int sign) {
    const int n = f.n();
    switch (f.kind()) {
        case AnsatzKind::kBenqo:
        case AnsatzKind::kVqe2l: {
            Eigen::VectorXd t = theta;
            if (term) t[term->param] += sign * kHalfPi;
            StateVector s = ry_product_state(t);
            if (f.kind() == AnsatzKind::kVqe2l) {
                for (int i = 0; i + 1 < n; ++i) s.apply(CZ{i, i + 1});
            }
            return s;
        }
        case AnsatzKind::kQaoa: {
            StateVector s(n);
            for (int q = 0; q < n; ++q) s.apply(H{q});
            const std::span<const double> energies(f.energies().data(),
                                                   static_cast<std::size_t>(f.energies().size()));
            for (int layer = 0; layer < f.qaoa_layers(); ++layer) {
                const double gamma = theta[2 * layer];
                const double beta = theta[2 * layer + 1];
                s.apply(DiagonalPhase{gamma, energies});
                if (term && term->layer == layer &&
                    (term->type == ShiftTerm::Type::kZ || term->type == ShiftTerm::Type::kZZ)) {
                    const int b = term->type == ShiftTerm::Type::kZZ ? term->qubit_b : -1;
                    const Eigen::VectorXd pauli = pauli_table(n, term->qubit_a, b);
                    s.apply(DiagonalPhase{sign * std::numbers::pi / 4,
                                          std::span<const double>(pauli.data(), pauli.size())});
                }
                for (int q = 0; q < n; ++q) {
                    double angle = 2 * beta;
                    if (term && term->layer == layer && term->type == ShiftTerm::Type::kRx &&
                        term->qubit_a == q) {
                        angle += sign * kHalfPi;
                    }
                    s.apply(RX{angle, q});
                }
            }
            return s;
        }
    }
    throw std::logic_error("unknown ansatz kind");
}

double benqo_or_expectation(const LossFunction& f, const Eigen::VectorXd& p) {
    if (f.kind() == AnsatzKind::kBenqo) {
        if (f.is_zero()) return 0.0;
        const double u = p.dot((f.energies() / f.scale_k()).array().sin().matrix());
        return from_sinusoidal(f, u);
    }
    return p.dot(f.energies());
}

}  // namespace

std::string_view to_string(AnsatzKind kind) {
    switch (kind) {
        case AnsatzKind::kBenqo: return "benqo";
        case AnsatzKind::kVqe2l: return "vqe2l";
        case AnsatzKind::kQaoa: return "qaoa";
    }
    return "?";
}

AnsatzKind ansatz_from_string(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "benqo") return AnsatzKind::kBenqo;
    if (lower == "vqe2l" || lower == "vqe") return AnsatzKind::kVqe2l;
    if (lower == "qaoa") return AnsatzKind::kQaoa;
    throw std::invalid_argument("unknown ansatz '" + std::string(name) + "'");
}

LossFunction::LossFunction(AnsatzKind kind, IsingModel ising) : kind_(kind), ising_(std::move(ising)) {
    const int n = ising_.n();
    if (n < 1) throw std::invalid_argument("loss needs at least one qubit");
    if (kind_ == AnsatzKind::kQaoa && n % 2 != 0) {
        throw std::invalid_argument("QAOA with p = n/2 layers requires n to be even (got n = " +
                                    std::to_string(n) + ")");
    }
    energies_ = energy_table(ising_);
    l_max_ = energies_.cwiseAbs().maxCoeff();
    k_ = 2.0 / std::numbers::pi * l_max_;

    if (kind_ != AnsatzKind::kQaoa) {
        for (int i = 0; i < n; ++i) terms_.push_back({ShiftTerm::Type::kParameter, i, 0, i, 0, 0.5});
        return;
    }
    for (int layer = 0; layer < n / 2; ++layer) {
        const int gp = 2 * layer;
        for (int i = 0; i < n; ++i) {
            if (ising_.fields[i] != 0.0) {
                terms_.push_back({ShiftTerm::Type::kZ, gp, layer, i, 0, ising_.fields[i]});
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (ising_.couplings(i, j) != 0.0) {
                    terms_.push_back({ShiftTerm::Type::kZZ, gp, layer, i, j, ising_.couplings(i, j)});
                }
            }
        }
        for (int q = 0; q < n; ++q) terms_.push_back({ShiftTerm::Type::kRx, gp + 1, layer, q, 0, 1.0});
    }
}

StateVector prepare_state(const LossFunction& f, const Eigen::VectorXd& theta) {
    check_theta(f, theta);
    return build_state(f, theta, nullptr, 0);
}

StateVector prepare_shifted_state(const LossFunction& f, const Eigen::VectorXd& theta,
                                  const ShiftTerm& term, int sign) {
    check_theta(f, theta);
    if (sign != 1 && sign != -1) throw std::invalid_argument("shift sign must be +1 or -1");
    return build_state(f, theta, &term, sign);
}

double exact_loss(const LossFunction& f, const Eigen::VectorXd& theta) {
    check_theta(f, theta);
    if (f.kind() != AnsatzKind::kQaoa) {
        // The CZ chain of VQE2L only changes phases, so both product-state
        // ansatzes share the same measurement distribution.
        return benqo_or_expectation(f, ry_product_probabilities(theta));
    }
    return benqo_or_expectation(f, probabilities(build_state(f, theta, nullptr, 0)));
}

double normalized_loss(const LossFunction& f, const Eigen::VectorXd& theta) {
    if (f.is_zero()) {
        check_theta(f, theta);
        return 0.0;
    }
    return exact_loss(f, theta) / f.l_max();
}

Eigen::VectorXd candidate_distribution(const LossFunction& f, const Eigen::VectorXd& theta) {
    return probabilities(prepare_state(f, theta));
}

double loss_from_distribution(const LossFunction& f, const Eigen::VectorXd& probabilities) {
    if (probabilities.size() != f.energies().size()) {
        throw std::invalid_argument("distribution size must be 2^n");
    }
    return benqo_or_expectation(f, probabilities);
}

Eigen::VectorXd shifted_distribution(const LossFunction& f, const Eigen::VectorXd& theta, std::size_t term,
                                     int sign) {
    const ShiftTerm& t = f.shift_terms().at(term);
    if (t.type == ShiftTerm::Type::kParameter) {
        check_theta(f, theta);
        if (sign != 1 && sign != -1) throw std::invalid_argument("shift sign must be +1 or -1");
        Eigen::VectorXd shifted = theta;
        shifted[t.param] += sign * kHalfPi;
        return ry_product_probabilities(shifted);
    }
    return probabilities(prepare_shifted_state(f, theta, t, sign));
}

double shifted_loss(const LossFunction& f, const Eigen::VectorXd& theta, std::size_t term, int sign) {
    return benqo_or_expectation(f, shifted_distribution(f, theta, term, sign));
}

double to_sinusoidal(const LossFunction& f, double loss) {
    if (f.kind() != AnsatzKind::kBenqo) return loss;
    if (f.is_zero()) return 0.0;
    return std::sin(loss / f.scale_k());
}

double from_sinusoidal(const LossFunction& f, double value) {
    if (f.kind() != AnsatzKind::kBenqo) return value;
    if (f.is_zero()) return 0.0;
    return f.scale_k() * std::asin(std::clamp(value, -1.0, 1.0));
}

Eigen::VectorXd combine_shifts(const LossFunction& f, double center_loss, const std::vector<double>& plus,
                               const std::vector<double>& minus) {
    const auto& terms = f.shift_terms();
    if (plus.size() != terms.size() || minus.size() != terms.size()) {
        throw std::invalid_argument("combine_shifts: one plus/minus value per shift term expected");
    }
    Eigen::VectorXd g = Eigen::VectorXd::Zero(f.n_params());
    if (f.is_zero()) return g;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        g[terms[i].param] +=
            terms[i].coefficient * (to_sinusoidal(f, plus[i]) - to_sinusoidal(f, minus[i]));
    }
    if (f.kind() == AnsatzKind::kBenqo) {
        // d/dtheta K asin(u) = K u' / sqrt(1 - u^2)
        const double u0 = to_sinusoidal(f, center_loss);
        const double d = std::sqrt(std::max(0.0, 1.0 - u0 * u0));
        if (d < 1e-15) return Eigen::VectorXd::Zero(f.n_params());
        g *= f.scale_k() / d;
    }
    return g;
}

Eigen::VectorXd gradient_parameter_shift(const LossFunction& f, const Eigen::VectorXd& theta) {
    check_theta(f, theta);
    const std::size_t m = f.shift_terms().size();
    std::vector<double> plus(m), minus(m);
    for (std::size_t i = 0; i < m; ++i) {
        plus[i] = shifted_loss(f, theta, i, +1);
        minus[i] = shifted_loss(f, theta, i, -1);
    }
    const double center = f.kind() == AnsatzKind::kBenqo ? exact_loss(f, theta) : 0.0;
    return combine_shifts(f, center, plus, minus);
}

int gradient_evaluation_count(const LossFunction& f, bool center_known) {
    const int shifts = 2 * static_cast<int>(f.shift_terms().size());
    return f.kind() == AnsatzKind::kBenqo && !center_known ? shifts + 1 : shifts;
}

double benqo_hadamard_test_loss(const LossFunction& f, const Eigen::VectorXd& theta) {
    check_theta(f, theta);
    if (f.kind() != AnsatzKind::kBenqo) throw std::invalid_argument("Hadamard test applies to BENQO only");
    const int n = f.n();
    if (n > 12) throw ResourceLimitError("Hadamard-test simulation is limited to n <= 12");
    if (f.is_zero()) return 0.0;

    const int block = n;
    const int ancilla = n + 1;
    const StateVector system = ry_product_state(theta);
    StateVector::Amplitudes amps = StateVector::Amplitudes::Zero(Eigen::Index{1} << (n + 2));
    amps.head(system.dimension()) = system.amplitudes();
    StateVector s(n + 2, std::move(amps));

    s.apply(H{ancilla});
    const Eigen::Index anc_bit = Eigen::Index{1} << ancilla;
    const Eigen::Index block_bit = Eigen::Index{1} << block;
    auto& a = s.amplitudes();
    for (Eigen::Index q = 0; q < system.dimension(); ++q) {
        const double angle = f.energies()[q] / f.scale_k();
        const double sn = std::sin(angle);
        const double cs = std::cos(angle);
        const auto a0 = a[q | anc_bit];
        const auto a1 = a[q | anc_bit | block_bit];
        a[q | anc_bit] = sn * a0 + cs * a1;
        a[q | anc_bit | block_bit] = cs * a0 - sn * a1;
    }
    s.apply(H{ancilla});

    const Eigen::VectorXd p = probabilities(s);
    double p0 = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!(i & anc_bit)) p0 += p[i];
    }
    return from_sinusoidal(f, 2.0 * p0 - 1.0);
}

VarianceScan loss_variance_scan(const LossFunction& f, int n_samples, double lo, double hi, Rng& rng,
                                bool with_gradient) {
    if (n_samples < 2) throw std::invalid_argument("variance scan needs at least two samples");
    const int d = f.n_params();
    Eigen::VectorXd values(n_samples);
    Eigen::MatrixXd grads;
    if (with_gradient) grads.resize(n_samples, d);
    for (int s = 0; s < n_samples; ++s) {
        const Eigen::VectorXd theta = rng.uniform_vector(d, lo, hi);
        values[s] = normalized_loss(f, theta);
        if (with_gradient) {
            grads.row(s) = f.is_zero() ? Eigen::VectorXd::Zero(d)
                                       : Eigen::VectorXd(gradient_parameter_shift(f, theta) / f.l_max());
        }
    }
    VarianceScan out;
    out.n = f.n();
    out.n_samples = n_samples;
    out.lo = lo;
    out.hi = hi;
    out.mean_loss = values.mean();
    out.loss_variance = (values.array() - out.mean_loss).square().sum() / (n_samples - 1);
    out.gradient_variance = std::numeric_limits<double>::quiet_NaN();
    if (with_gradient) {
        const Eigen::RowVectorXd mean = grads.colwise().mean();
        const Eigen::RowVectorXd var =
            (grads.rowwise() - mean).array().square().colwise().sum() / (n_samples - 1);
        out.gradient_variance = var.mean();
    }
    return out;
}

}  // namespace vqnoise
