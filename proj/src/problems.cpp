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

#include "vqnoise/problems.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vqnoise/errors.hpp"
#include "vqnoise/metrics.hpp"
#include "vqnoise/random.hpp"

namespace vqnoise {

namespace {

void check_enumerable(int n) {
    if (n > kMaxEnumerationQubits) {
        throw ResourceLimitError("exhaustive enumeration limited to n <= " +
                                 std::to_string(kMaxEnumerationQubits) + ", got " +
                                 std::to_string(n));
    }
}

// Same tolerance as used for argmin ties; energies of generated instances are
// multiples of 1/4 so this never merges distinct levels.
bool same_level(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
}

}  // namespace

std::string Bitstring::to_string() const {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i) {
        if (bit(i)) s[static_cast<std::size_t>(n - 1 - i)] = '1';
    }
    return s;
}

Bitstring Bitstring::from_string(std::string_view s) {
    if (s.size() > 64) throw std::invalid_argument("bitstring longer than 64 characters");
    Bitstring b{0, static_cast<int>(s.size())};
    for (std::size_t k = 0; k < s.size(); ++k) {
        const char c = s[s.size() - 1 - k];
        if (c == '1') {
            b.index |= (std::uint64_t{1} << k);
        } else if (c != '0') {
            throw std::invalid_argument("bitstring may only contain '0' and '1'");
        }
    }
    return b;
}

Bitstring Bitstring::from_assignment(const Eigen::VectorXd& x) {
    Bitstring b{0, static_cast<int>(x.size())};
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) b.index |= (std::uint64_t{1} << i);
    }
    return b;
}

Eigen::VectorXd Bitstring::assignment() const {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = bit(i) ? 0.0 : 1.0;
    return x;
}

IsingModel IsingModel::zero(int n) {
    return IsingModel{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0};
}

QuboInstance generate_random_qubo(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_random_qubo: n must be >= 1");
    Rng rng(seed);
    QuboInstance inst{Eigen::MatrixXd(n, n), seed};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto v = static_cast<double>(rng.uniform_int(1, 10));
            inst.q(i, j) = (i == j) ? -v : v;
        }
    }
    return inst;
}

IsingModel qubo_to_ising(const QuboInstance& q) {
    const int n = q.n();
    if (q.q.cols() != n) throw std::invalid_argument("qubo_to_ising: Q must be square");
    const Eigen::MatrixXd sym = 0.5 * (q.q + q.q.transpose());
    IsingModel m = IsingModel::zero(n);
    m.couplings = sym.triangularView<Eigen::StrictlyUpper>();
    m.couplings *= 0.5;
    m.fields = 0.5 * sym.rowwise().sum();
    // x = (1+z)/2: constant part is sum_ij Q_ij/4 plus the z_i^2 = 1 diagonal share.
    m.offset = 0.25 * sym.sum() + 0.25 * sym.trace();
    return m;
}

double ising_energy(const IsingModel& m, const Bitstring& bits, bool with_offset) {
    const int n = m.n();
    if (bits.n != n) {
        throw std::invalid_argument("ising_energy: bitstring length " + std::to_string(bits.n) +
                                    " does not match model size " + std::to_string(n));
    }
    double e = with_offset ? m.offset : 0.0;
    for (int i = 0; i < n; ++i) {
        const double zi = bits.bit(i) ? -1.0 : 1.0;
        e += zi * m.fields[i];
        for (int j = i + 1; j < n; ++j) {
            const double zj = bits.bit(j) ? -1.0 : 1.0;
            e += zi * zj * m.couplings(i, j);
        }
    }
    return e;
}

Eigen::VectorXd energy_table(const IsingModel& m) {
    const int n = m.n();
    check_enumerable(n);
    const std::uint64_t dim = std::uint64_t{1} << n;
    Eigen::VectorXd table(static_cast<Eigen::Index>(dim));

    // Column sums of the strict upper triangle: contribution of spins j < k
    // that are still +1 when k is the lowest set bit.
    Eigen::VectorXd upper_col(n);
    for (int k = 0; k < n; ++k) upper_col[k] = m.couplings.col(k).head(k).sum();

    table[0] = m.fields.sum() + m.couplings.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().sum();
    for (std::uint64_t x = 1; x < dim; ++x) {
        const int k = std::countr_zero(x);
        // Flip spin k from +1 to -1 starting from x with bit k cleared.
        double local = m.fields[k] + upper_col[k];
        for (int j = k + 1; j < n; ++j) {
            local += ((x >> j) & 1U) ? -m.couplings(k, j) : m.couplings(k, j);
        }
        table[static_cast<Eigen::Index>(x)] =
            table[static_cast<Eigen::Index>(x ^ (std::uint64_t{1} << k))] - 2.0 * local;
    }
    return table;
}

BruteForceResult brute_force_solve(const IsingModel& m) {
    check_enumerable(m.n());
    const Eigen::VectorXd table = energy_table(m);
    BruteForceResult r;
    r.c_min = table.minCoeff();
    r.c_max_attained = table.maxCoeff();
    for (Eigen::Index x = 0; x < table.size(); ++x) {
        if (same_level(table[x], r.c_min)) {
            r.argmin.push_back(Bitstring{static_cast<std::uint64_t>(x), m.n()});
        }
    }
    return r;
}

double cmax_bound(const IsingModel& m) {
    return m.fields.cwiseAbs().sum() +
           m.couplings.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().sum();
}

QuboInstance build_permutation_qubo(const QuboInstance& q0, double penalty,
                                    const PermutationQuboOptions& options) {
    const int dim = q0.n();
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
    if (n * n != dim || q0.q.cols() != dim) {
        throw std::invalid_argument("build_permutation_qubo: dimension " + std::to_string(dim) +
                                    " is not a perfect square");
    }
    const double diag_shift =
        options.convention == PenaltyConvention::kPublished ? -4.0 * penalty : -2.0 * penalty;

    QuboInstance out{q0.q, q0.seed};
    auto var = [n](int node, int pos) { return node * n + pos; };
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < n; ++a) {
            for (int j = 0; j < n; ++j) {
                for (int b = 0; b < n; ++b) {
                    const bool same_node = (i == j);
                    const bool same_pos = (a == b);
                    if (same_node && same_pos) {
                        out.q(var(i, a), var(j, b)) += diag_shift;
                    } else if (same_node != same_pos) {
                        out.q(var(i, a), var(j, b)) += penalty;
                    }
                }
            }
        }
    }
    if (!options.fix_start || n < 2) return out;

    // x_{0,0} = 1, x_{0,a} = 0 (a > 0), x_{i,0} = 0 (i > 0). The fixed one
    // contributes linear terms to the remaining variables; the constant is dropped.
    const int m = n - 1;
    QuboInstance reduced{Eigen::MatrixXd::Zero(m * m, m * m), q0.seed};
    const int fixed = var(0, 0);
    for (int i = 1; i < n; ++i) {
        for (int a = 1; a < n; ++a) {
            const int r = (i - 1) * m + (a - 1);
            for (int j = 1; j < n; ++j) {
                for (int b = 1; b < n; ++b) {
                    reduced.q(r, (j - 1) * m + (b - 1)) = out.q(var(i, a), var(j, b));
                }
            }
            reduced.q(r, r) += out.q(var(i, a), fixed) + out.q(fixed, var(i, a));
        }
    }
    return reduced;
}

SpectrumProfile solution_space_profile(const IsingModel& m, const std::vector<double>& thresholds,
                                       int histogram_bins) {
    if (m.n() > 20) {
        throw ResourceLimitError("solution_space_profile limited to n <= 20");
    }
    if (histogram_bins < 1) throw std::invalid_argument("histogram_bins must be >= 1");
    const Eigen::VectorXd table = energy_table(m);
    const EnergyBounds bounds{table.minCoeff(), cmax_bound(m)};

    SpectrumProfile p;
    p.n = m.n();
    p.thresholds = thresholds;
    p.fractions.assign(thresholds.size(), 0.0);
    const bool degenerate = bounds.c_min >= bounds.c_max;
    for (Eigen::Index x = 0; x < table.size(); ++x) {
        const double ar = degenerate ? 1.0 : approximation_ratio(table[x], bounds);
        for (std::size_t t = 0; t < thresholds.size(); ++t) {
            p.fractions[t] += approximation_index(ar, thresholds[t]);
        }
    }
    for (double& f : p.fractions) f /= static_cast<double>(table.size());

    const double scale = table.cwiseAbs().maxCoeff();
    p.histogram_edges.resize(static_cast<std::size_t>(histogram_bins) + 1);
    for (int b = 0; b <= histogram_bins; ++b) {
        p.histogram_edges[static_cast<std::size_t>(b)] = -1.0 + 2.0 * b / histogram_bins;
    }
    p.histogram_density.assign(static_cast<std::size_t>(histogram_bins), 0.0);
    const double width = 2.0 / histogram_bins;
    for (Eigen::Index x = 0; x < table.size(); ++x) {
        const double v = scale > 0.0 ? table[x] / scale : 0.0;
        int bin = static_cast<int>(std::floor((v + 1.0) / width));
        bin = std::clamp(bin, 0, histogram_bins - 1);
        p.histogram_density[static_cast<std::size_t>(bin)] += 1.0;
    }
    for (double& d : p.histogram_density) d /= static_cast<double>(table.size()) * width;
    return p;
}

std::string to_text(const QuboInstance& q) {
    std::ostringstream os;
    os.precision(17);
    os << q.n() << ' ' << q.seed << '\n';
    for (int i = 0; i < q.n(); ++i) {
        for (int j = 0; j < q.n(); ++j) {
            if (j) os << ' ';
            os << q.q(i, j);
        }
        os << '\n';
    }
    return os.str();
}

QuboInstance qubo_from_text(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    if (!next_line()) throw ParseError("empty QUBO text", 0);
    std::istringstream header(line);
    long long n = 0;
    std::uint64_t seed = 0;
    if (!(header >> n >> seed) || n < 1) throw ParseError("expected header 'n seed'", line_no);
    QuboInstance q{Eigen::MatrixXd(n, n), seed};
    for (long long i = 0; i < n; ++i) {
        if (!next_line()) throw ParseError("missing matrix row " + std::to_string(i), line_no + 1);
        std::istringstream row(line);
        for (long long j = 0; j < n; ++j) {
            double v;
            if (!(row >> v)) throw ParseError("expected " + std::to_string(n) + " numbers", line_no);
            q.q(i, j) = v;
        }
        std::string extra;
        if (row >> extra) throw ParseError("too many numbers in row", line_no);
    }
    return q;
}

std::string to_json(const QuboInstance& q) {
    nlohmann::json j;
    j["n"] = q.n();
    j["seed"] = q.seed;
    auto& rows = j["Q"] = nlohmann::json::array();
    for (int i = 0; i < q.n(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < q.n(); ++k) row.push_back(q.q(i, k));
        rows.push_back(std::move(row));
    }
    return j.dump();
}

QuboInstance qubo_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid QUBO JSON: ") + e.what(), 0);
    }
    try {
        const int n = j.at("n").get<int>();
        QuboInstance q{Eigen::MatrixXd(n, n), j.at("seed").get<std::uint64_t>()};
        const auto& rows = j.at("Q");
        if (static_cast<int>(rows.size()) != n) throw ParseError("Q has wrong row count", 0);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[i].size()) != n) throw ParseError("Q has wrong column count", 0);
            for (int k = 0; k < n; ++k) q.q(i, k) = rows[i][k].get<double>();
        }
        return q;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid QUBO JSON: ") + e.what(), 0);
    }
}

}  // namespace vqnoise
