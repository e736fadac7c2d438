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

// vqnoise command-line harness. Run `vqnoise --help` for the subcommands.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vqnoise/checks.hpp"
#include "vqnoise/errors.hpp"
#include "vqnoise/harness.hpp"
#include "vqnoise/problems.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace vqnoise;

namespace {

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

/// Configuration problems found after argument parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (text.empty() || text.back() != '\n') f << '\n';
}

template <class Fn>
void write_stream(const fs::path& path, Fn&& fn) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    fn(f);
}

void write_manifest(const fs::path& dir, const std::string& command, const std::string& config_text,
                    std::uint64_t seed, const std::map<std::string, std::string>& extra = {}) {
    write_file(dir / "manifest.json", manifest_json(command, config_text, seed, extra));
}

std::vector<AnsatzKind> parse_kinds(const std::vector<std::string>& names) {
    std::vector<AnsatzKind> kinds;
    for (const auto& s : names) {
        try {
            kinds.push_back(ansatz_from_string(s));
        } catch (const std::exception&) {
            throw UsageError("unknown loss kind '" + s + "'");
        }
    }
    return kinds;
}

// Two columns, n and error; '#' lines and a non-numeric header are skipped.
std::vector<std::pair<int, double>> read_hardware_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open hardware curve '" + path + "'");
    std::vector<std::pair<int, double>> curve;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected 'n,error'", lineno);
        try {
            std::size_t used = 0;
            const int n = std::stoi(line.substr(0, comma), &used);
            const double e = std::stod(line.substr(comma + 1));
            curve.emplace_back(n, e);
        } catch (const std::invalid_argument&) {
            if (curve.empty() && lineno == 1) continue;  // header
            throw ParseError("bad number in hardware curve", lineno);
        }
    }
    return curve;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vqnoise: noisy variational QUBO experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", code_version());

    // gen ------------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "Emit seeded random QUBO instances");
    int gen_n = 6, gen_count = 1;
    std::uint64_t gen_seed = 1;
    std::string gen_out, gen_format = "json";
    gen->add_option("-n,--n", gen_n, "Number of variables")->check(CLI::Range(1, kMaxEnumerationQubits));
    gen->add_option("--count", gen_count, "Number of instances")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "Master seed; instance i uses the sweep's instance seed");
    gen->add_option("--format", gen_format, "json or text")->check(CLI::IsMember({"json", "text"}));
    gen->add_option("-o,--out", gen_out, "Output directory (default: stdout)");

    // variance -------------------------------------------------------------
    auto* var = app.add_subcommand("variance", "Loss variance over uniform parameters per loss kind and n");
    std::vector<std::string> var_kinds{"benqo", "vqe2l", "qaoa"};
    std::vector<int> var_ns{4, 6, 8, 10, 12};
    int var_samples = 10000;
    std::uint64_t var_seed = 1;
    bool var_gradient = false;
    std::string var_out = "out/variance";
    var->add_option("--kinds", var_kinds, "Loss kinds")->delimiter(',');
    var->add_option("--n", var_ns, "System sizes")->delimiter(',');
    var->add_option("--samples", var_samples, "Parameter samples per point")->check(CLI::Range(2, 100000000));
    var->add_option("--seed", var_seed, "Instance and sampling seed");
    var->add_flag("--gradient", var_gradient, "Also sample the gradient variance");
    var->add_option("-o,--out", var_out, "Output directory");

    // sweep ----------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "Run an optimizer x n x noise x instance sweep");
    std::string sweep_config, sweep_out;
    int sweep_workers = 0;
    std::uint64_t sweep_seed = 0;
    bool sweep_dry = false, sweep_quiet = false;
    sweep->add_option("-c,--config", sweep_config, "Config file (text or JSON); defaults when omitted")
        ->check(CLI::ExistingFile);
    sweep->add_option("-o,--out", sweep_out, "Output directory (overrides the config)");
    sweep->add_option("-j,--workers", sweep_workers, "Worker threads (overrides VQNOISE_WORKERS)")
        ->check(CLI::NonNegativeNumber);
    auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "Master seed (overrides the config)");
    sweep->add_flag("--dry-run", sweep_dry, "Print the cell plan and exit");
    sweep->add_flag("-q,--quiet", sweep_quiet, "No progress output");

    // fit ------------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "Fit sigmoids and decay families to sweep output");
    std::string fit_input, fit_out;
    double fit_threshold = 1.0;
    fit->add_option("-i,--input", fit_input, "records.csv or a sweep directory")->required()->check(CLI::ExistingPath);
    fit->add_option("-t,--threshold", fit_threshold, "Approximation threshold")->check(CLI::Range(0.0, 1.0));
    fit->add_option("-o,--out", fit_out, "Output directory (default: next to the input)");

    // project --------------------------------------------------------------
    auto* proj = app.add_subcommand("project", "Shot-requirement projections for the three decay families");
    SamplingErrorModel eps_fs;
    CallModel calls;
    int proj_lo = 3, proj_hi = 100;
    double depth = 1.0, t_gate = 100e-9;
    std::string proj_hw, proj_out = "out/projection";
    proj->add_option("--fs-prefactor", eps_fs.prefactor, "Sampling-error prefactor");
    proj->add_option("--fs-rate", eps_fs.exp_rate, "Sampling-error exponential rate");
    proj->add_option("--fs-power", eps_fs.n_power, "Sampling-error polynomial power");
    proj->add_option("--iterations", calls.iterations, "Optimizer iterations");
    proj->add_option("--calls-per-iteration", calls.per_iteration, "Loss calls per iteration");
    proj->add_option("--calls-per-parameter", calls.per_parameter, "Loss calls per parameter and iteration");
    proj->add_option("--n-lo", proj_lo, "Smallest n")->check(CLI::Range(2, 100000));
    proj->add_option("--n-hi", proj_hi, "Largest n")->check(CLI::Range(2, 100000));
    proj->add_option("--depth", depth, "Circuit depth D")->check(CLI::PositiveNumber);
    proj->add_option("--t-gate", t_gate, "Gate time in seconds")->check(CLI::PositiveNumber);
    proj->add_option("--hardware", proj_hw, "CSV of an external error curve (n,error)")->check(CLI::ExistingFile);
    proj->add_option("-o,--out", proj_out, "Output directory");

    // profile --------------------------------------------------------------
    auto* prof = app.add_subcommand("profile", "Solution-space fractions and the shot-error decomposition");
    int prof_n = 10, prof_instances = 100, err_n = 6, err_points = 50, err_samples = 500;
    std::vector<double> prof_thresholds{1.0, 0.99, 0.95, 0.9};
    std::uint64_t prof_seed = 1, err_shots = 1024;
    std::string err_kind = "benqo", prof_out = "out/profile";
    bool no_errors = false;
    prof->add_option("--n", prof_n, "System size of the spectrum")->check(CLI::Range(1, kMaxEnumerationQubits));
    prof->add_option("--instances", prof_instances, "Instances averaged")->check(CLI::PositiveNumber);
    prof->add_option("--thresholds", prof_thresholds, "AR thresholds")->delimiter(',');
    prof->add_option("--seed", prof_seed, "Seed");
    prof->add_flag("--no-errors", no_errors, "Skip the error decomposition");
    prof->add_option("--error-n", err_n, "System size of the error decomposition")->check(CLI::Range(1, 20));
    prof->add_option("--error-kind", err_kind, "Loss kind of the error decomposition");
    prof->add_option("--shots", err_shots, "Shots per evaluation")->check(CLI::PositiveNumber);
    prof->add_option("--points", err_points, "Parameter points")->check(CLI::Range(10, 1000000));
    prof->add_option("--samples", err_samples, "Repetitions per point")->check(CLI::Range(100, 100000000));
    prof->add_option("-o,--out", prof_out, "Output directory");

    // validate -------------------------------------------------------------
    auto* val = app.add_subcommand("validate", "Run the oracle and invariant checks");
    std::uint64_t val_seed = 1;
    int val_workers = 0;
    bool val_all = false;
    val->add_option("--seed", val_seed, "Seed");
    val->add_option("-j,--workers", val_workers, "Worker threads")->check(CLI::NonNegativeNumber);
    val->add_flag("--all", val_all, "Run the full reproduction suite (slow)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    const std::string echo = app.get_subcommands().front()->config_to_str(true, false);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        if (*gen) {
            for (int i = 0; i < gen_count; ++i) {
                const QuboInstance q = generate_random_qubo(gen_n, instance_seed(gen_seed, gen_n, i));
                const std::string text = gen_format == "json" ? to_json(q) : to_text(q);
                if (gen_out.empty()) {
                    std::cout << text << (text.back() == '\n' ? "" : "\n");
                } else {
                    char name[64];
                    std::snprintf(name, sizeof name, "qubo_n%d_%d.%s", gen_n, i, gen_format == "json" ? "json" : "txt");
                    write_file(fs::path(gen_out) / name, text);
                }
            }
            if (!gen_out.empty()) write_manifest(gen_out, command, echo, gen_seed);
        } else if (*var) {
            const auto rows = variance_table(parse_kinds(var_kinds), var_ns, var_samples, var_seed, var_gradient);
            write_stream(fs::path(var_out) / "variance.csv", [&](std::ostream& os) { write_variance_csv(os, rows); });
            write_manifest(var_out, command, echo, var_seed);
            std::cout << "wrote " << rows.size() << " rows to " << (fs::path(var_out) / "variance.csv").string() << "\n";
        } else if (*sweep) {
            ExperimentConfig cfg;
            try {
                cfg = sweep_config.empty() ? default_config() : load_config(sweep_config);
                if (!sweep_out.empty()) cfg.output_dir = sweep_out;
                if (sweep_seed_opt->count()) cfg.master_seed = sweep_seed;
                cfg.validate();
                for (const OptimizerSpec& o : cfg.optimizers)
                    if (o.kind == OptimizerKind::kPlugin && !has_optimizer(o.name()))
                        throw ConfigError("unknown optimizer '" + o.name() + "'");
            } catch (const ConfigError& e) {
                throw UsageError(e.what());
            } catch (const ParseError& e) {
                throw UsageError(e.what());
            }
            if (sweep_dry) {
                std::cout << describe_plan(cfg);
                return 0;
            }
            const int workers = resolve_workers(sweep_workers, cfg);
            ProgressFn progress;
            if (!sweep_quiet) {
                progress = [](std::size_t done, std::size_t total) {
                    if (done == total || done % 200 == 0) std::fprintf(stderr, "\r%zu/%zu runs", done, total);
                    if (done == total) std::fputc('\n', stderr);
                };
            }
            const SweepResult result = run_sweep(cfg, workers, progress);
            write_sweep(cfg.output_dir, result);
            write_file(fs::path(cfg.output_dir) / "config.txt", to_text(cfg));
            std::size_t failed = 0;
            for (const auto& r : result.records) failed += !r.ok();
            write_manifest(cfg.output_dir, command, to_text(cfg), cfg.master_seed,
                           {{"workers", std::to_string(workers)}, {"failed_runs", std::to_string(failed)}});
            std::cout << result.records.size() << " runs (" << failed << " failed) written to " << cfg.output_dir
                      << "\n";
        } else if (*fit) {
            fs::path in = fit_input;
            if (fs::is_directory(in)) in /= "records.csv";
            std::ifstream f(in);
            if (!f) throw UsageError("cannot open " + in.string());
            std::vector<double> thresholds;
            const auto records = read_records_csv(f, &thresholds);
            const auto cells = aggregate_cells(records, thresholds);
            int n_runs = 0;
            for (const CellStats& c : cells)
                for (const SolvabilityStat& s : c.stats) n_runs = std::max(n_runs, s.n_runs);
            const FitReport report = fit_sweep(cells, n_runs, fit_threshold);
            const fs::path out = fit_out.empty() ? in.parent_path() : fs::path(fit_out);
            write_file(out / "fit.json", fit_report_json(report));
            write_stream(out / "tanh.csv", [&](std::ostream& os) { write_tanh_csv(os, report); });
            write_manifest(out, command, echo, 0, {{"input", in.string()}});
            for (const auto& note : report.notes) std::cerr << "note: " << note << "\n";
            std::cout << report.tanh.size() << " sigmoid fits, " << report.decay.size() << " decay fits written to "
                      << out.string() << "\n";
        } else if (*proj) {
            if (proj_lo > proj_hi) throw UsageError("--n-lo exceeds --n-hi");
            const auto tables = project_all(eps_fs, calls, proj_lo, proj_hi);
            json doc = json::parse(projection_json(tables, depth, t_gate));
            if (!proj_hw.empty()) {
                json hw = json::array();
                for (const auto& [n, err] : read_hardware_curve(proj_hw)) {
                    json row{{"n", n}, {"error", err}};
                    for (const ProjectionTable& t : tables) {
                        const double eps = t.tolerance(n);
                        row[std::string(to_string(t.family))] = {{"eps_star", eps}, {"tolerable", err <= eps}};
                    }
                    hw.push_back(row);
                }
                doc["hardware"] = hw;
            }
            write_file(fs::path(proj_out) / "projection.json", doc.dump(2));
            write_stream(fs::path(proj_out) / "projection.csv",
                         [&](std::ostream& os) { write_projection_csv(os, tables); });
            write_manifest(proj_out, command, echo, 0);
            for (const ProjectionTable& t : tables)
                std::cout << to_string(t.family) << ": window "
                          << (t.window_start < 0 ? std::string("none") : "n >= " + std::to_string(t.window_start))
                          << "\n";
        } else if (*prof) {
            const SpectrumSummary s = spectrum_summary(prof_n, prof_instances, prof_thresholds, prof_seed);
            std::string doc;
            if (no_errors) {
                doc = profile_json(s, nullptr);
            } else {
                const AnsatzKind kind = parse_kinds({err_kind}).front();
                const LossFunction f(kind, qubo_to_ising(generate_random_qubo(err_n, derive_seed(prof_seed, {17}))));
                Rng rng(derive_seed(prof_seed, {18}));
                const ErrorProfile e = error_decomposition(f, err_points, err_samples, err_shots, rng);
                doc = profile_json(s, &e);
            }
            write_file(fs::path(prof_out) / "profile.json", doc);
            write_manifest(prof_out, command, echo, prof_seed);
            for (std::size_t i = 0; i < s.thresholds.size(); ++i)
                std::printf("AR >= %g: %.4f\n", s.thresholds[i], s.mean_fractions[i]);
        } else if (*val) {
            CheckRunner runner({val_seed, val_workers});
            bool ok = true;
            for (const auto& id : val_all ? CheckRunner::ids() : CheckRunner::validation_ids()) {
                const CheckResult r = runner.run(id);
                std::cout << format_check(r) << std::endl;
                ok = ok && r.passed;
            }
            return ok ? 0 : kRuntime;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return 0;
}
