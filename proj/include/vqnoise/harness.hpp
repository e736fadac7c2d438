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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vqnoise/fitlab.hpp"
#include "vqnoise/losses.hpp"
#include "vqnoise/metrics.hpp"
#include "vqnoise/noise.hpp"
#include "vqnoise/optimizers.hpp"

namespace vqnoise {

inline constexpr const char* kSweepSchema = "vqnoise.sweep.v1";
inline constexpr const char* kCellsSchema = "vqnoise.cells.v1";
inline constexpr const char* kFitSchema = "vqnoise.fit.v1";
inline constexpr const char* kProjectionSchema = "vqnoise.projection.v1";
inline constexpr const char* kVarianceSchema = "vqnoise.variance.v1";
inline constexpr const char* kProfileSchema = "vqnoise.profile.v1";
inline constexpr const char* kManifestSchema = "vqnoise.manifest.v1";
inline constexpr const char* kConfigSchema = "vqnoise.config.v1";

// ---------------------------------------------------------------------------
// Configuration

/**
 * A sweep over optimizer x n x noise x instance.
 *
 * Text form (comments start with '#'):
 *
 *   [experiment]
 *   master_seed = 1
 *   instances = 100
 *   loss = benqo                 # benqo | vqe2l | qaoa
 *   thresholds = 1.0, 0.99, 0.95
 *   ar_reference = analytic      # analytic | mixed
 *   output = out
 *   workers = 0                  # 0: VQNOISE_WORKERS or all cores
 *
 *   [grid]
 *   n = 3..10                    # or a list: 3, 4, 6
 *   include_none = true
 *   sigma = logspace(1e-3, 1e1, 16)   # or a list
 *   shots = 256, 1024
 *
 *   [optimizer ngd]
 *   k_max = 20
 *
 * One [optimizer NAME] section per optimizer; NAME is ngd, spsa, nft, powell
 * or a registered plugin, whose numeric keys are passed through.
 *
 * The JSON form has the same sections as objects ("experiment", "grid") and
 * an "optimizers" array of objects with a "name" member. Lists may be JSON
 * arrays.
 */
struct ExperimentConfig {
    std::uint64_t master_seed = 1;
    std::vector<int> n_grid{3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<NoiseSpec> noise_grid;  // default_config(): none + 16 sigmas
    std::vector<OptimizerSpec> optimizers;
    int instances = 100;
    AnsatzKind loss = AnsatzKind::kBenqo;
    std::vector<double> thresholds{1.0, 0.99, 0.95};
    ArReference ar_reference = ArReference::kAnalyticBound;
    std::string output_dir = "out";
    int workers = 0;

    /// Throws ConfigError on empty grids, N < 1, thresholds outside [0, 1].
    void validate() const;
};

/// n in [3, 10], none plus 16 log-spaced sigma in [1e-3, 1e1], NGD, N = 100.
ExperimentConfig default_config();

/// count values log-spaced over [lo, hi], endpoints included.
std::vector<double> logspace(double lo, double hi, int count);

/// Parses either form; JSON is recognised by a leading '{'. Syntax errors are
/// ParseError with a line number; invalid values are ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& config);
std::string to_json(const ExperimentConfig& config);

/// Worker count: explicit > 0 wins, then VQNOISE_WORKERS, then config, then
/// hardware concurrency.
int resolve_workers(int explicit_workers, const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Sweeps

struct Cell {
    std::size_t optimizer_index = 0;
    int n = 0;
    std::size_t noise_index = 0;
};

struct SweepRecord {
    std::string optimizer;
    int n = 0;
    std::size_t noise_index = 0;
    std::string noise;  // NoiseSpec label
    int instance = 0;
    std::uint64_t instance_seed = 0;
    std::string candidate;  // most probable bitstring, qubit n-1 first
    double final_ar = 0.0;
    std::uint64_t n_calls = 0;
    double best_loss = 0.0;
    std::vector<int> successes;  // x_t per configured threshold
    std::string status = "ok";   // otherwise the error message
    double wall_seconds = 0.0;   // not part of the record CSV

    bool ok() const { return status == "ok"; }
};

struct CellStats {
    std::string optimizer;
    int n = 0;
    std::size_t noise_index = 0;
    std::string noise;
    double level = 0.0;  // sigma, shots, or 0 for none
    std::vector<SolvabilityStat> stats;  // per threshold
    int failures = 0;
};

struct SweepResult {
    std::vector<double> thresholds;
    std::vector<SweepRecord> records;  // sorted by (cell, instance)
    std::vector<CellStats> cells;
};

/// Cells in execution order: optimizer, then n, then noise column.
std::vector<Cell> plan_cells(const ExperimentConfig& config);

/// Human-readable plan, one line per cell.
std::string describe_plan(const ExperimentConfig& config);

std::uint64_t instance_seed(std::uint64_t master, int n, int instance);
std::uint64_t run_seed(std::uint64_t master, const std::string& optimizer, int n, std::size_t noise_index,
                       int instance);

/// One optimizer run on one instance. Errors propagate.
SweepRecord run_single(const ExperimentConfig& config, const Cell& cell, int instance);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every (cell, instance) on `workers` threads. A failing run is
/// recorded with its error and excluded from the statistics; the sweep goes on.
SweepResult run_sweep(const ExperimentConfig& config, int workers, const ProgressFn& progress = {});

std::vector<CellStats> aggregate_cells(const std::vector<SweepRecord>& records, const std::vector<double>& thresholds);

// ---------------------------------------------------------------------------
// Artifacts. CSV files start with a "#schema=<id>" line; JSON documents carry
// a "schema" member. Readers reject other versions.

void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& records,
                       const std::vector<double>& thresholds);
/// Thresholds are recovered from the header.
std::vector<SweepRecord> read_records_csv(std::istream& is, std::vector<double>* thresholds = nullptr);

void write_cells_csv(std::ostream& os, const std::vector<CellStats>& cells, const std::vector<double>& thresholds);
void write_timings_csv(std::ostream& os, const std::vector<SweepRecord>& records);

std::string records_to_json(const std::vector<SweepRecord>& records, const std::vector<double>& thresholds);
std::vector<SweepRecord> records_from_json(const std::string& text, std::vector<double>* thresholds = nullptr);

/// Writes records.csv, cells.csv, timings.csv and records.json under dir.
void write_sweep(const std::string& dir, const SweepResult& result);

/// Reproducibility manifest: command, config echo, seed, code version.
std::string manifest_json(const std::string& command, const std::string& config_text, std::uint64_t seed,
                          const std::map<std::string, std::string>& extra = {});

std::string code_version();

// ---------------------------------------------------------------------------
// Analysis drivers

struct TanhRow {
    std::string optimizer;
    int n = 0;
    double threshold = 1.0;
    TanhFit fit;
    ResilienceProfile resilience;
};

struct DecayRow {
    std::string optimizer;
    DecayFit fit;
    std::vector<double> sigma_star;  // the fitted values, aligned with fit.ns
};

struct FitReport {
    std::vector<TanhRow> tanh;
    std::vector<DecayRow> decay;
    std::vector<std::string> notes;  // fit failures and censored points
};

/// tanh fits over the Gaussian columns of each (optimizer, n), then the three
/// decay families over the uncensored sigma*(n). The noise-free column is not
/// part of the tanh fit.
FitReport fit_sweep(const std::vector<CellStats>& cells, int n_runs, double threshold = 1.0);

/// JSON table: per optimizer and family k*, gamma*, uncertainties, mse.
std::string fit_report_json(const FitReport& report);
void write_tanh_csv(std::ostream& os, const FitReport& report);

struct ProjectionTable {
    DecayFamily family = DecayFamily::kPowerLaw;
    ToleranceModel tolerance;
    std::vector<ProjectionRow> rows;
    int window_start = -1;
};

std::vector<ProjectionTable> project_all(const SamplingErrorModel& eps_fs, const CallModel& calls, int n_lo,
                                         int n_hi);
std::string projection_json(const std::vector<ProjectionTable>& tables, double depth, double t_gate);
void write_projection_csv(std::ostream& os, const std::vector<ProjectionTable>& tables);

struct VarianceRow {
    AnsatzKind kind = AnsatzKind::kBenqo;
    VarianceScan scan;
};

/// Loss variance per kind and n, one instance per n (derive_seed(seed, {n})).
/// QAOA is skipped at odd n.
std::vector<VarianceRow> variance_table(const std::vector<AnsatzKind>& kinds, const std::vector<int>& ns,
                                        int samples, std::uint64_t seed, bool with_gradient = false);
void write_variance_csv(std::ostream& os, const std::vector<VarianceRow>& rows);

/// Solution-space fractions averaged over instances at one n.
struct SpectrumSummary {
    int n = 0;
    int instances = 0;
    std::vector<double> thresholds;
    std::vector<double> mean_fractions;
    std::vector<double> histogram_edges;
    std::vector<double> mean_density;
};

SpectrumSummary spectrum_summary(int n, int instances, const std::vector<double>& thresholds, std::uint64_t seed,
                                 int histogram_bins = 20);
std::string profile_json(const SpectrumSummary& spectrum, const ErrorProfile* errors);

}  // namespace vqnoise
