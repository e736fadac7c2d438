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

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "vqnoise/errors.hpp"
#include "vqnoise/harness.hpp"
#include "vqnoise/problems.hpp"

namespace vqnoise {

namespace {

// FNV-1a, so optimizer streams depend on the name rather than list position.
std::uint64_t name_hash(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t kInstanceTag = 1;
constexpr std::uint64_t kRunTag = 2;

double noise_level(const NoiseSpec& s) {
    switch (s.kind) {
        case NoiseSpec::Kind::kGaussian: return s.sigma;
        case NoiseSpec::Kind::kShots: return static_cast<double>(s.shots);
        case NoiseSpec::Kind::kNone: break;
    }
    return 0.0;
}

}  // namespace

std::uint64_t instance_seed(std::uint64_t master, int n, int instance) {
    return derive_seed(master, {kInstanceTag, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(instance)});
}

std::uint64_t run_seed(std::uint64_t master, const std::string& optimizer, int n, std::size_t noise_index,
                       int instance) {
    return derive_seed(master, {kRunTag, name_hash(optimizer), static_cast<std::uint64_t>(n),
                                static_cast<std::uint64_t>(noise_index), static_cast<std::uint64_t>(instance)});
}

std::vector<Cell> plan_cells(const ExperimentConfig& config) {
    std::vector<Cell> cells;
    for (std::size_t o = 0; o < config.optimizers.size(); ++o)
        for (int n : config.n_grid)
            for (std::size_t k = 0; k < config.noise_grid.size(); ++k) cells.push_back({o, n, k});
    return cells;
}

std::string describe_plan(const ExperimentConfig& config) {
    const auto cells = plan_cells(config);
    std::ostringstream os;
    os << cells.size() << " cells x " << config.instances << " instances = " << cells.size() * config.instances
       << " runs, loss " << to_string(config.loss) << ", master seed " << config.master_seed << "\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& c = cells[i];
        os << "cell " << i << ": optimizer=" << config.optimizers[c.optimizer_index].name() << " n=" << c.n
           << " noise=" << config.noise_grid[c.noise_index].label() << "\n";
    }
    return os.str();
}

SweepRecord run_single(const ExperimentConfig& config, const Cell& cell, int instance) {
    const OptimizerSpec& opt = config.optimizers.at(cell.optimizer_index);
    const NoiseSpec& noise = config.noise_grid.at(cell.noise_index);
    SweepRecord rec;
    rec.optimizer = opt.name();
    rec.n = cell.n;
    rec.noise_index = cell.noise_index;
    rec.noise = noise.label();
    rec.instance = instance;
    rec.instance_seed = instance_seed(config.master_seed, cell.n, instance);

    const IsingModel ising = qubo_to_ising(generate_random_qubo(cell.n, rec.instance_seed));
    const LossFunction f(config.loss, ising);
    const EnergyBounds bounds = energy_bounds(ising, config.ar_reference);

    const std::uint64_t stream = run_seed(config.master_seed, rec.optimizer, cell.n, cell.noise_index, instance);
    VariationalOracle oracle(f, noise, derive_seed(stream, {1}));
    Rng init(derive_seed(stream, {2}));
    OptimizerSpec spec = opt;
    spec.spsa.seed = derive_seed(stream, {3});
    const Eigen::VectorXd theta0 = init_params(f.n_params(), init);
    const OptRun r = run(spec, oracle, theta0);

    const Bitstring bits = most_probable_state(candidate_distribution(f, r.theta_final), cell.n);
    rec.candidate = bits.to_string();
    rec.final_ar = approximation_ratio(ising_energy(ising, bits), bounds);
    rec.n_calls = r.n_calls;
    rec.best_loss = r.best_loss;
    for (double t : config.thresholds) rec.successes.push_back(approximation_index(rec.final_ar, t));
    return rec;
}

SweepResult run_sweep(const ExperimentConfig& config, int workers, const ProgressFn& progress) {
    config.validate();
    for (const auto& o : config.optimizers) {
        if (o.kind == OptimizerKind::kPlugin && !has_optimizer(o.plugin_name))
            throw ConfigError("unknown optimizer '" + o.plugin_name + "'");
    }
    const auto cells = plan_cells(config);
    const std::size_t per_cell = static_cast<std::size_t>(config.instances);
    const std::size_t total = cells.size() * per_cell;

    SweepResult result;
    result.thresholds = config.thresholds;
    // Slot t belongs to (cell t / N, instance t % N), so the output order is
    // fixed before any work starts.
    result.records.resize(total);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;

    auto worker = [&] {
        for (std::size_t t = next.fetch_add(1); t < total; t = next.fetch_add(1)) {
            const Cell& cell = cells[t / per_cell];
            const int instance = static_cast<int>(t % per_cell);
            const auto start = std::chrono::steady_clock::now();
            SweepRecord rec;
            try {
                rec = run_single(config, cell, instance);
            } catch (const std::exception& e) {
                rec.optimizer = config.optimizers[cell.optimizer_index].name();
                rec.n = cell.n;
                rec.noise_index = cell.noise_index;
                rec.noise = config.noise_grid[cell.noise_index].label();
                rec.instance = instance;
                rec.instance_seed = instance_seed(config.master_seed, cell.n, instance);
                rec.successes.assign(config.thresholds.size(), 0);
                rec.status = std::string("error: ") + e.what();
            }
            rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            result.records[t] = std::move(rec);
            const std::size_t d = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(d, total);
            }
        }
    };

    const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::size_t>(total, 1))));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    result.cells = aggregate_cells(result.records, config.thresholds);
    return result;
}

std::vector<CellStats> aggregate_cells(const std::vector<SweepRecord>& records, const std::vector<double>& thresholds) {
    using Key = std::tuple<std::string, int, std::size_t>;
    std::map<Key, std::size_t> index;
    std::vector<CellStats> cells;
    std::vector<std::vector<std::vector<int>>> hits;  // cell -> threshold -> x_t
    for (const SweepRecord& r : records) {
        const Key key{r.optimizer, r.n, r.noise_index};
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, cells.size()).first;
            CellStats c;
            c.optimizer = r.optimizer;
            c.n = r.n;
            c.noise_index = r.noise_index;
            c.noise = r.noise;
            c.level = noise_level(NoiseSpec::parse(r.noise));
            cells.push_back(std::move(c));
            hits.emplace_back(thresholds.size());
        }
        const std::size_t ci = it->second;
        if (!r.ok()) {
            ++cells[ci].failures;
            continue;
        }
        for (std::size_t k = 0; k < thresholds.size(); ++k) hits[ci][k].push_back(r.successes.at(k));
    }
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        for (std::size_t k = 0; k < thresholds.size(); ++k) {
            if (hits[ci][k].empty()) {
                SolvabilityStat empty;
                empty.t = thresholds[k];
                cells[ci].stats.push_back(empty);
            } else {
                cells[ci].stats.push_back(solvability(hits[ci][k], thresholds[k]));
            }
        }
    }
    return cells;
}

}  // namespace vqnoise
