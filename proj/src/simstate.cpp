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

#include "vqnoise/simstate.hpp"

#include <algorithm>
#include <vector>

namespace vqnoise {

Counts sample_counts(const Eigen::VectorXd& probabilities, std::uint64_t shots, Rng& rng) {
    if (shots == 0) throw std::invalid_argument("sample_counts: shots must be >= 1");
    std::vector<double> cdf(static_cast<std::size_t>(probabilities.size()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
        acc += probabilities[i];
        cdf[static_cast<std::size_t>(i)] = acc;
    }
    // Guard against the total falling a few ulps short of 1.
    const double total = acc;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        if (probabilities[static_cast<Eigen::Index>(i)] > 0.0) last_nonzero = i;
    }

    Counts counts;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        auto idx = static_cast<std::size_t>(it - cdf.begin());
        if (idx > last_nonzero) idx = last_nonzero;
        ++counts[idx];
    }
    return counts;
}

Eigen::VectorXd ry_product_probabilities(const Eigen::VectorXd& theta) {
    const auto n = static_cast<int>(theta.size());
    Eigen::VectorXd p(Eigen::Index{1} << n);
    p[0] = 1.0;
    Eigen::Index filled = 1;
    for (int i = 0; i < n; ++i) {
        const double c = std::cos(theta[i] / 2);
        const double s = std::sin(theta[i] / 2);
        const double p0 = c * c;
        const double p1 = s * s;
        p.segment(filled, filled) = p1 * p.head(filled);
        p.head(filled) *= p0;
        filled *= 2;
    }
    return p;
}

StateVector ry_product_state(const Eigen::VectorXd& theta) {
    const auto n = static_cast<int>(theta.size());
    StateVector::Amplitudes a(Eigen::Index{1} << n);
    a[0] = 1.0;
    Eigen::Index filled = 1;
    for (int i = 0; i < n; ++i) {
        const double c = std::cos(theta[i] / 2);
        const double s = std::sin(theta[i] / 2);
        a.segment(filled, filled) = s * a.head(filled);
        a.head(filled) *= c;
        filled *= 2;
    }
    return StateVector(n, std::move(a));
}

}  // namespace vqnoise
