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

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vqnoise/problems.hpp"
#include "vqnoise/random.hpp"
#include "vqnoise/simstate.hpp"

namespace vqnoise {

enum class AnsatzKind { kBenqo, kVqe2l, kQaoa };

std::string_view to_string(AnsatzKind kind);
/// Accepts "benqo", "vqe2l", "qaoa" (case-insensitive).
AnsatzKind ansatz_from_string(std::string_view name);

/**
 * One elementary term of the parameter-shift rule.
 *
 * d(value)/d(theta_param) = sum over terms of coefficient * (v(+) - v(-)),
 * where v(+/-) is the circuit value with only this term's gate shifted.
 *
 *  - kParameter: theta_param itself shifted by +/- pi/2 (coefficient 1/2).
 *  - kRx:        one RX(2 beta) gate on `qubit_a`, gate angle shifted by
 *                +/- pi/2 (coefficient 1).
 *  - kZ, kZZ:    an extra exp(-/+ i pi/4 P) inserted in the phase separator
 *                of `layer`, P = Z_a or Z_a Z_b; coefficient is the Ising
 *                coefficient of P.
 */
struct ShiftTerm {
    enum class Type { kParameter, kRx, kZ, kZZ };
    Type type = Type::kParameter;
    int param = 0;
    int layer = 0;
    int qubit_a = 0;
    int qubit_b = 0;
    double coefficient = 0.5;
};

/**
 * A variational loss bound to an Ising cost operator.
 *
 * BENQO:  product state (x)_i RY(theta_i)|0>, loss K asin(sum_q p_q sin(C_q/K)).
 * VQE2L:  RY layer followed by a linear CZ chain, loss <C>.
 * QAOA:   p = n/2 layers, angles ordered (gamma_1, beta_1, gamma_2, ...), loss <C>.
 *
 * K = (2/pi) max_q |C_q| and l_max = max_q |C_q|, both over the energy table
 * without the constant offset. A zero cost operator gets K = l_max = 0.
 */
class LossFunction {
  public:
    LossFunction(AnsatzKind kind, IsingModel ising);

    AnsatzKind kind() const { return kind_; }
    const IsingModel& ising() const { return ising_; }
    int n() const { return ising_.n(); }
    int n_params() const { return ising_.n(); }
    int qaoa_layers() const { return kind_ == AnsatzKind::kQaoa ? n() / 2 : 0; }
    double scale_k() const { return k_; }
    double l_max() const { return l_max_; }
    const Eigen::VectorXd& energies() const { return energies_; }
    const std::vector<ShiftTerm>& shift_terms() const { return terms_; }
    bool is_zero() const { return l_max_ == 0.0; }

  private:
    AnsatzKind kind_;
    IsingModel ising_;
    Eigen::VectorXd energies_;
    double k_ = 0.0;
    double l_max_ = 0.0;
    std::vector<ShiftTerm> terms_;
};

/// The n-qubit circuit state. For BENQO this is the rotational layer only.
StateVector prepare_state(const LossFunction& f, const Eigen::VectorXd& theta);

/// State with one shift-rule term applied; sign is +1 or -1.
StateVector prepare_shifted_state(const LossFunction& f, const Eigen::VectorXd& theta,
                                  const ShiftTerm& term, int sign);

double exact_loss(const LossFunction& f, const Eigen::VectorXd& theta);

/// exact_loss / l_max; 0 when the cost operator vanishes.
double normalized_loss(const LossFunction& f, const Eigen::VectorXd& theta);

/// |<q|Psi(theta)>|^2 indexed by basis state.
Eigen::VectorXd candidate_distribution(const LossFunction& f, const Eigen::VectorXd& theta);

/// Measurement distribution of the circuit with one shift-rule term applied.
Eigen::VectorXd shifted_distribution(const LossFunction& f, const Eigen::VectorXd& theta, std::size_t term,
                                     int sign);

/// Exact loss of a measurement distribution over the n-qubit register.
double loss_from_distribution(const LossFunction& f, const Eigen::VectorXd& probabilities);

/// Loss at the circuit shifted by shift_terms()[term] in direction sign.
double shifted_loss(const LossFunction& f, const Eigen::VectorXd& theta, std::size_t term, int sign);

// The quantity on which the shift rule is exact: sin(L/K) for BENQO, L itself
// otherwise. from_sinusoidal clamps its argument into [-1, 1] for BENQO.
double to_sinusoidal(const LossFunction& f, double loss);
double from_sinusoidal(const LossFunction& f, double value);

/**
 * Assembles dL/dtheta from shifted loss values (plus[i], minus[i] belong to
 * shift_terms()[i]). `center_loss` is needed only for BENQO's chain rule.
 */
Eigen::VectorXd combine_shifts(const LossFunction& f, double center_loss,
                               const std::vector<double>& plus, const std::vector<double>& minus);

/// Exact gradient of exact_loss.
Eigen::VectorXd gradient_parameter_shift(const LossFunction& f, const Eigen::VectorXd& theta);

/// Loss evaluations a parameter-shift gradient costs. BENQO needs the centre
/// value too unless the caller already has it.
int gradient_evaluation_count(const LossFunction& f, bool center_known);

/// BENQO loss from the explicit Hadamard test over n + 2 qubits (system,
/// block-encoding qubit, ancilla). Slow; for cross-validation.
double benqo_hadamard_test_loss(const LossFunction& f, const Eigen::VectorXd& theta);

struct VarianceScan {
    int n = 0;
    int n_samples = 0;
    double lo = 0.0;
    double hi = 0.0;
    double loss_variance = 0.0;
    double mean_loss = 0.0;
    // Mean over components of the per-component sample variance of dL^/dtheta_i.
    // NaN when the gradient scan was not requested.
    double gradient_variance = 0.0;
};

/// Sample variance of the normalized loss over theta ~ U[lo, hi]^n.
VarianceScan loss_variance_scan(const LossFunction& f, int n_samples, double lo, double hi, Rng& rng,
                                bool with_gradient = false);

}  // namespace vqnoise
