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

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>

#include <Eigen/Core>

#include "vqnoise/random.hpp"

namespace vqnoise {

// Gate set. Basis ordering is little-endian: qubit q is bit q of the index.
//
// RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]], so RY(pi)|0> = |1> with a
// + sign. RX(t) = exp(-i t X / 2). DiagonalPhase multiplies amplitude x by
// exp(-i gamma E_x); `energies` must stay alive while the gate is applied.
struct RY {
    double angle;
    int target;
};
struct RX {
    double angle;
    int target;
};
struct H {
    int target;
};
struct CZ {
    int control;
    int target;
};
struct DiagonalPhase {
    double gamma;
    std::span<const double> energies;
};

using GateSpec = std::variant<RY, RX, H, CZ, DiagonalPhase>;

/// Dense 2^k amplitude vector.
template <typename Real>
class BasicStateVector {
    static_assert(std::is_floating_point_v<Real>);

  public:
    using Scalar = std::complex<Real>;
    using Amplitudes = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    /// |0...0> on k qubits.
    explicit BasicStateVector(int k) : k_(check_size(k)), amps_(Amplitudes::Zero(Eigen::Index{1} << k)) {
        amps_[0] = Scalar(1);
    }

    BasicStateVector(int k, Amplitudes amps) : k_(check_size(k)), amps_(std::move(amps)) {
        if (amps_.size() != (Eigen::Index{1} << k)) {
            throw std::invalid_argument("amplitude count must be 2^k");
        }
    }

    /// Basis state |index>.
    static BasicStateVector basis(int k, std::uint64_t index) {
        BasicStateVector s(k);
        s.amps_[0] = Scalar(0);
        s.amps_[static_cast<Eigen::Index>(index)] = Scalar(1);
        return s;
    }

    int qubits() const { return k_; }
    Eigen::Index dimension() const { return amps_.size(); }
    const Amplitudes& amplitudes() const { return amps_; }
    Amplitudes& amplitudes() { return amps_; }
    Real norm_squared() const { return amps_.squaredNorm(); }

    void apply(const GateSpec& gate) { std::visit([this](const auto& g) { apply_one(g); }, gate); }

  private:
    static int check_size(int k) {
        if (k < 0 || k > 30) throw std::invalid_argument("qubit count must lie in [0, 30]");
        return k;
    }

    void check_target(int q) const {
        if (q < 0 || q >= k_) {
            throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range for " +
                                        std::to_string(k_) + " qubits");
        }
    }

    // Applies [[m00, m01], [m10, m11]] to qubit q.
    void apply_1q(int q, Scalar m00, Scalar m01, Scalar m10, Scalar m11) {
        check_target(q);
        const Eigen::Index stride = Eigen::Index{1} << q;
        const Eigen::Index dim = amps_.size();
        for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
            for (Eigen::Index i = base; i < base + stride; ++i) {
                const Scalar a0 = amps_[i];
                const Scalar a1 = amps_[i + stride];
                amps_[i] = m00 * a0 + m01 * a1;
                amps_[i + stride] = m10 * a0 + m11 * a1;
            }
        }
    }

    void apply_one(const RY& g) {
        const Real c = std::cos(static_cast<Real>(g.angle) / 2);
        const Real s = std::sin(static_cast<Real>(g.angle) / 2);
        apply_1q(g.target, Scalar(c), Scalar(-s), Scalar(s), Scalar(c));
    }

    void apply_one(const RX& g) {
        const Real c = std::cos(static_cast<Real>(g.angle) / 2);
        const Real s = std::sin(static_cast<Real>(g.angle) / 2);
        apply_1q(g.target, Scalar(c), Scalar(0, -s), Scalar(0, -s), Scalar(c));
    }

    void apply_one(const H& g) {
        const Real r = Real(1) / std::sqrt(Real(2));
        apply_1q(g.target, Scalar(r), Scalar(r), Scalar(r), Scalar(-r));
    }

    void apply_one(const CZ& g) {
        check_target(g.control);
        check_target(g.target);
        if (g.control == g.target) throw std::invalid_argument("CZ needs two distinct qubits");
        const std::uint64_t mask = (std::uint64_t{1} << g.control) | (std::uint64_t{1} << g.target);
        for (Eigen::Index i = 0; i < amps_.size(); ++i) {
            if ((static_cast<std::uint64_t>(i) & mask) == mask) amps_[i] = -amps_[i];
        }
    }

    void apply_one(const DiagonalPhase& g) {
        if (static_cast<Eigen::Index>(g.energies.size()) != amps_.size()) {
            throw std::invalid_argument("DiagonalPhase needs 2^k energies");
        }
        if (g.gamma == 0.0) return;
        for (Eigen::Index i = 0; i < amps_.size(); ++i) {
            const Real phi = -static_cast<Real>(g.gamma * g.energies[static_cast<std::size_t>(i)]);
            amps_[i] *= Scalar(std::cos(phi), std::sin(phi));
        }
    }

    int k_;
    Amplitudes amps_;
};

using StateVector = BasicStateVector<double>;

/// Functional form: returns the transformed copy.
template <typename Real>
BasicStateVector<Real> apply_gate(BasicStateVector<Real> s, const GateSpec& g) {
    s.apply(g);
    return s;
}

template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> probabilities(const BasicStateVector<Real>& s) {
    return s.amplitudes().cwiseAbs2();
}

/// Measurement counts keyed by basis index.
using Counts = std::map<std::uint64_t, std::uint64_t>;

/// Draws `shots` samples from a probability vector by inverse CDF.
Counts sample_counts(const Eigen::VectorXd& probabilities, std::uint64_t shots, Rng& rng);

template <typename Real>
Counts sample_counts(const BasicStateVector<Real>& s, std::uint64_t shots, Rng& rng) {
    return sample_counts(probabilities(s).template cast<double>().eval(), shots, rng);
}

/// Product state (x)_i RY(theta_i)|0>, built directly in O(2^n).
StateVector ry_product_state(const Eigen::VectorXd& theta);

/// Probabilities of ry_product_state(theta) without forming amplitudes.
Eigen::VectorXd ry_product_probabilities(const Eigen::VectorXd& theta);

}  // namespace vqnoise
