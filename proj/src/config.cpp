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
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "vqnoise/errors.hpp"
#include "vqnoise/harness.hpp"

namespace vqnoise {

namespace {

using json = nlohmann::json;

struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct Section {
    std::string name;  // "experiment", "grid", "optimizer"
    std::string arg;   // optimizer name
    std::size_t line = 0;
    std::vector<Entry> entries;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : v) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void bad_value(const Entry& e, const std::string& why) {
    throw ConfigError("line " + std::to_string(e.line) + ": " + e.key + ": " + why);
}

double to_double(const Entry& e, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::logic_error&) {
    }
    bad_value(e, "expected a number, got '" + text + "'");
}

long long to_int(const Entry& e, const std::string& text) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used == text.size()) return v;
    } catch (const std::logic_error&) {
    }
    bad_value(e, "expected an integer, got '" + text + "'");
}

bool to_bool(const Entry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    bad_value(e, "expected true or false");
}

std::vector<double> to_doubles(const Entry& e) {
    const std::string v = trim(e.value);
    if (v.rfind("logspace(", 0) == 0 && v.back() == ')') {
        const auto args = split_list(v.substr(9, v.size() - 10));
        if (args.size() != 3) bad_value(e, "logspace takes (lo, hi, count)");
        const double lo = to_double(e, args[0]);
        const double hi = to_double(e, args[1]);
        const long long count = to_int(e, args[2]);
        if (!(lo > 0.0) || !(hi >= lo) || count < 1) bad_value(e, "logspace needs 0 < lo <= hi and count >= 1");
        return logspace(lo, hi, static_cast<int>(count));
    }
    std::vector<double> out;
    if (v.empty()) return out;
    for (const auto& item : split_list(v)) out.push_back(to_double(e, item));
    return out;
}

std::vector<int> to_int_range(const Entry& e) {
    const std::string v = trim(e.value);
    std::vector<int> out;
    const auto dots = v.find("..");
    if (dots != std::string::npos) {
        const long long lo = to_int(e, trim(v.substr(0, dots)));
        const long long hi = to_int(e, trim(v.substr(dots + 2)));
        if (hi < lo) bad_value(e, "empty range");
        for (long long i = lo; i <= hi; ++i) out.push_back(static_cast<int>(i));
        return out;
    }
    for (const auto& item : split_list(v)) out.push_back(static_cast<int>(to_int(e, item)));
    return out;
}

std::vector<Section> parse_ini(const std::string& text) {
    std::vector<Section> sections;
    std::istringstream is(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", line_no);
            const std::string inner = trim(line.substr(1, line.size() - 2));
            Section s;
            s.line = line_no;
            const auto space = inner.find_first_of(" \t");
            s.name = space == std::string::npos ? inner : inner.substr(0, space);
            s.arg = space == std::string::npos ? "" : trim(inner.substr(space));
            if (s.name != "experiment" && s.name != "grid" && s.name != "optimizer")
                throw ParseError("unknown section [" + s.name + "]", line_no);
            if (s.name == "optimizer" && s.arg.empty())
                throw ParseError("optimizer section needs a name: [optimizer ngd]", line_no);
            sections.push_back(std::move(s));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
        if (sections.empty()) throw ParseError("key outside of a section", line_no);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError("empty key", line_no);
        sections.back().entries.push_back({key, trim(line.substr(eq + 1)), line_no});
    }
    return sections;
}

std::string json_scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number()) return fmt(v.get<double>());
    throw ConfigError("unsupported JSON value " + v.dump());
}

std::string json_value(const json& v) {
    if (!v.is_array()) return json_scalar(v);
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + json_scalar(v[i]);
    return out;
}

std::vector<Section> parse_json_sections(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports a byte offset; convert to a line.
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n')) + 1;
        throw ParseError(std::string("invalid JSON: ") + e.what(), line);
    }
    if (!doc.is_object()) throw ConfigError("JSON config must be an object");
    if (doc.contains("schema") && doc["schema"] != kConfigSchema)
        throw ConfigError("config schema " + doc["schema"].dump() + " is not " + kConfigSchema);
    std::vector<Section> out;
    for (const char* name : {"experiment", "grid"}) {
        if (!doc.contains(name)) continue;
        Section s;
        s.name = name;
        for (const auto& [k, v] : doc[name].items()) s.entries.push_back({k, json_value(v), 0});
        out.push_back(std::move(s));
    }
    if (doc.contains("optimizers")) {
        for (const auto& o : doc["optimizers"]) {
            if (!o.is_object() || !o.contains("name")) throw ConfigError("optimizer entries need a name");
            Section s;
            s.name = "optimizer";
            s.arg = o["name"].get<std::string>();
            for (const auto& [k, v] : o.items())
                if (k != "name") s.entries.push_back({k, json_value(v), 0});
            out.push_back(std::move(s));
        }
    }
    for (const auto& [k, v] : doc.items()) {
        if (k != "experiment" && k != "grid" && k != "optimizers" && k != "schema")
            throw ConfigError("unknown top-level key '" + k + "'");
    }
    return out;
}

void apply_optimizer(OptimizerSpec& spec, const Entry& e) {
    const auto d = [&] { return to_double(e, e.value); };
    const auto i = [&] { return to_int(e, e.value); };
    const auto u = [&] {
        const long long v = i();
        if (v < 0) bad_value(e, "must be non-negative");
        return static_cast<std::uint64_t>(v);
    };
    switch (spec.kind) {
        case OptimizerKind::kNgd:
            if (e.key == "k_max") {
                spec.ngd.k_max = static_cast<int>(i());
                if (spec.ngd.k_max < 1) bad_value(e, "k_max must be >= 1");
                return;
            }
            break;
        case OptimizerKind::kSpsa: {
            auto& s = spec.spsa;
            if (e.key == "iterations") { s.iterations = static_cast<int>(i()); return; }
            if (e.key == "alpha") { s.alpha = d(); return; }
            if (e.key == "gamma") { s.gamma = d(); return; }
            if (e.key == "stability_fraction") { s.stability_fraction = d(); return; }
            if (e.key == "noise_probes") { s.noise_probes = static_cast<int>(i()); return; }
            if (e.key == "calibration_pairs") { s.calibration_pairs = static_cast<int>(i()); return; }
            if (e.key == "target_step") { s.target_step = d(); return; }
            if (e.key == "c_min") { s.c_min = d(); return; }
            if (e.key == "c_max") { s.c_max = d(); return; }
            if (e.key == "a") { s.a = d(); return; }
            if (e.key == "c") { s.c = d(); return; }
            if (e.key == "budget") { s.budget = u(); return; }
            break;
        }
        case OptimizerKind::kNft:
            if (e.key == "max_evaluations") { spec.nft.max_evaluations = u(); return; }
            if (e.key == "reset_interval") { spec.nft.reset_interval = static_cast<int>(i()); return; }
            if (e.key == "max_sweeps") { spec.nft.max_sweeps = static_cast<int>(i()); return; }
            break;
        case OptimizerKind::kPowell:
            if (e.key == "max_evaluations") { spec.powell.max_evaluations = u(); return; }
            if (e.key == "xtol") { spec.powell.xtol = d(); return; }
            if (e.key == "ftol") { spec.powell.ftol = d(); return; }
            if (e.key == "max_iterations") { spec.powell.max_iterations = static_cast<int>(i()); return; }
            break;
        case OptimizerKind::kPlugin:
            spec.plugin_params[e.key] = d();
            return;
    }
    bad_value(e, "unknown option for optimizer " + spec.name());
}

ExperimentConfig build(const std::vector<Section>& sections) {
    ExperimentConfig c = default_config();
    bool noise_set = false;
    std::optional<bool> include_none;
    std::vector<double> sigmas;
    std::vector<std::uint64_t> shots;
    bool optimizers_set = false;
    for (const Section& s : sections) {
        if (s.name == "experiment") {
            for (const Entry& e : s.entries) {
                if (e.key == "master_seed") {
                    try {
                        std::size_t used = 0;
                        c.master_seed = std::stoull(e.value, &used, 0);
                        if (used != e.value.size()) bad_value(e, "expected an unsigned integer");
                    } catch (const std::logic_error&) {
                        bad_value(e, "expected an unsigned integer");
                    }
                } else if (e.key == "instances") {
                    c.instances = static_cast<int>(to_int(e, e.value));
                } else if (e.key == "loss") {
                    try {
                        c.loss = ansatz_from_string(e.value);
                    } catch (const std::exception&) {
                        bad_value(e, "unknown loss '" + e.value + "'");
                    }
                } else if (e.key == "thresholds") {
                    c.thresholds = to_doubles(e);
                } else if (e.key == "ar_reference") {
                    if (e.value == "analytic")
                        c.ar_reference = ArReference::kAnalyticBound;
                    else if (e.value == "mixed")
                        c.ar_reference = ArReference::kMixedState;
                    else
                        bad_value(e, "expected analytic or mixed");
                } else if (e.key == "output") {
                    c.output_dir = e.value;
                } else if (e.key == "workers") {
                    c.workers = static_cast<int>(to_int(e, e.value));
                } else {
                    bad_value(e, "unknown key in [experiment]");
                }
            }
        } else if (s.name == "grid") {
            for (const Entry& e : s.entries) {
                if (e.key == "n") {
                    c.n_grid = to_int_range(e);
                } else if (e.key == "noise") {
                    noise_set = true;
                    c.noise_grid.clear();
                    for (const auto& item : split_list(e.value)) {
                        try {
                            c.noise_grid.push_back(NoiseSpec::parse(item));
                        } catch (const std::invalid_argument& ex) {
                            bad_value(e, ex.what());
                        }
                    }
                } else if (e.key == "include_none") {
                    include_none = to_bool(e);
                } else if (e.key == "sigma") {
                    sigmas = to_doubles(e);
                    for (double v : sigmas)
                        if (!(v >= 0.0)) bad_value(e, "sigma must be >= 0");
                } else if (e.key == "shots") {
                    for (double v : to_doubles(e)) {
                        if (!(v >= 1.0) || v != std::floor(v)) bad_value(e, "shots must be positive integers");
                        shots.push_back(static_cast<std::uint64_t>(v));
                    }
                } else {
                    bad_value(e, "unknown key in [grid]");
                }
            }
        } else {
            if (!optimizers_set) c.optimizers.clear();
            optimizers_set = true;
            OptimizerSpec spec;
            try {
                spec = OptimizerSpec::parse(s.arg);
            } catch (const ConfigError& ex) {
                throw ConfigError("line " + std::to_string(s.line) + ": " + ex.what());
            }
            for (const Entry& e : s.entries) apply_optimizer(spec, e);
            c.optimizers.push_back(std::move(spec));
        }
    }
    const bool convenience = include_none.has_value() || !sigmas.empty() || !shots.empty();
    if (noise_set && convenience) throw ConfigError("use either 'noise' or 'include_none'/'sigma'/'shots' in [grid]");
    if (convenience) {
        c.noise_grid.clear();
        if (include_none.value_or(true)) c.noise_grid.push_back(NoiseSpec::none());
        for (double s : sigmas) c.noise_grid.push_back(NoiseSpec::gaussian(s));
        for (auto n : shots) c.noise_grid.push_back(NoiseSpec::finite_shots(n));
    }
    c.validate();
    return c;
}

}  // namespace

std::vector<double> logspace(double lo, double hi, int count) {
    if (count < 1 || !(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("logspace needs 0 < lo <= hi, count >= 1");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < count; ++i) out[i] = count == 1 ? lo : std::pow(10.0, a + (b - a) * i / (count - 1));
    return out;
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.noise_grid.push_back(NoiseSpec::none());
    for (double s : logspace(1e-3, 1e1, 16)) c.noise_grid.push_back(NoiseSpec::gaussian(s));
    c.optimizers.push_back(OptimizerSpec::parse("ngd"));
    return c;
}

void ExperimentConfig::validate() const {
    if (n_grid.empty()) throw ConfigError("n grid is empty");
    if (noise_grid.empty()) throw ConfigError("noise grid is empty");
    if (optimizers.empty()) throw ConfigError("no optimizer configured");
    if (thresholds.empty()) throw ConfigError("no thresholds configured");
    if (instances < 1) throw ConfigError("instances must be >= 1");
    for (int n : n_grid) {
        if (n < 1 || n > 20) throw ConfigError("n = " + std::to_string(n) + " outside [1, 20]");
        if (loss == AnsatzKind::kQaoa && n % 2 != 0)
            throw ConfigError("QAOA requires n to be even (got " + std::to_string(n) + ")");
    }
    for (double t : thresholds)
        if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("threshold " + fmt(t) + " outside [0, 1]");
    std::vector<std::string> names;
    for (const auto& o : optimizers) names.push_back(o.name());
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        throw ConfigError("optimizer listed twice");
}

ExperimentConfig parse_config(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return build(parse_json_sections(text));
    return build(parse_ini(text));
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_text(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "[experiment]\n";
    os << "master_seed = " << c.master_seed << "\n";
    os << "instances = " << c.instances << "\n";
    os << "loss = " << to_string(c.loss) << "\n";
    os << "thresholds = ";
    for (std::size_t i = 0; i < c.thresholds.size(); ++i) os << (i ? ", " : "") << fmt(c.thresholds[i]);
    os << "\nar_reference = " << (c.ar_reference == ArReference::kAnalyticBound ? "analytic" : "mixed") << "\n";
    os << "output = " << c.output_dir << "\n";
    os << "workers = " << c.workers << "\n\n[grid]\nn = ";
    for (std::size_t i = 0; i < c.n_grid.size(); ++i) os << (i ? ", " : "") << c.n_grid[i];
    os << "\nnoise = ";
    for (std::size_t i = 0; i < c.noise_grid.size(); ++i) os << (i ? ", " : "") << c.noise_grid[i].label();
    os << "\n";
    for (const auto& o : c.optimizers) {
        os << "\n[optimizer " << o.name() << "]\n";
        for (const auto& [k, v] : o.describe())
            if (k != "optimizer") os << k << " = " << v << "\n";
    }
    return os.str();
}

std::string to_json(const ExperimentConfig& c) {
    json j;
    j["schema"] = kConfigSchema;
    j["experiment"] = {{"master_seed", c.master_seed},
                       {"instances", c.instances},
                       {"loss", std::string(to_string(c.loss))},
                       {"thresholds", c.thresholds},
                       {"ar_reference", c.ar_reference == ArReference::kAnalyticBound ? "analytic" : "mixed"},
                       {"output", c.output_dir},
                       {"workers", c.workers}};
    std::vector<std::string> labels;
    for (const auto& s : c.noise_grid) labels.push_back(s.label());
    j["grid"] = {{"n", c.n_grid}, {"noise", labels}};
    j["optimizers"] = json::array();
    for (const auto& o : c.optimizers) {
        json e{{"name", o.name()}};
        for (const auto& [k, v] : o.describe())
            if (k != "optimizer") e[k] = v;
        j["optimizers"].push_back(e);
    }
    return j.dump(2);
}

int resolve_workers(int explicit_workers, const ExperimentConfig& config) {
    if (explicit_workers > 0) return explicit_workers;
    if (const char* env = std::getenv("VQNOISE_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
        throw ConfigError(std::string("VQNOISE_WORKERS must be a positive integer, got '") + env + "'");
    }
    if (config.workers > 0) return config.workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace vqnoise
