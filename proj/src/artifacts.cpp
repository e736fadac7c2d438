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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vqnoise/errors.hpp"
#include "vqnoise/harness.hpp"

#ifndef VQNOISE_VERSION
#define VQNOISE_VERSION "unknown"
#endif

namespace vqnoise {

namespace {

using json = nlohmann::json;

// Shortest decimal that reads back to the same double.
std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line_no);
    out.push_back(cur);
    return out;
}

double parse_num(const std::string& s, std::size_t line_no, const char* column) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw ParseError(std::string("bad number in column ") + column + ": '" + s + "'", line_no);
    return v;
}

std::uint64_t parse_uint(const std::string& s, std::size_t line_no, const char* column) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || s.front() == '-')
        throw ParseError(std::string("bad integer in column ") + column + ": '" + s + "'", line_no);
    return v;
}

void expect_schema(const std::string& first_line, const char* schema) {
    const std::string want = std::string("#schema=") + schema;
    if (first_line.rfind("#schema=", 0) != 0) throw ParseError("missing schema line, expected '" + want + "'", 1);
    if (first_line != want)
        throw ParseError("schema version mismatch: file has '" + first_line.substr(8) + "', expected '" + schema + "'",
                         1);
}

const std::vector<std::string> kFixedColumns{"optimizer", "n",       "noise",     "noise_index", "instance",
                                             "instance_seed", "candidate", "final_ar", "n_calls", "best_loss"};

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& records,
                       const std::vector<double>& thresholds) {
    os << "#schema=" << kSweepSchema << "\n";
    for (const auto& c : kFixedColumns) os << c << ",";
    for (double t : thresholds) os << "x_" << num(t) << ",";
    os << "status\n";
    for (const SweepRecord& r : records) {
        os << csv_field(r.optimizer) << ',' << r.n << ',' << csv_field(r.noise) << ',' << r.noise_index << ','
           << r.instance << ',' << r.instance_seed << ',' << r.candidate << ',' << num(r.final_ar) << ','
           << r.n_calls << ',' << num(r.best_loss) << ',';
        for (std::size_t k = 0; k < thresholds.size(); ++k) os << (k < r.successes.size() ? r.successes[k] : 0) << ',';
        os << csv_field(r.status) << "\n";
    }
}

std::vector<SweepRecord> read_records_csv(std::istream& is, std::vector<double>* thresholds) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty file", 1);
    expect_schema(line, kSweepSchema);
    if (!std::getline(is, line)) throw ParseError("missing header", 2);
    const auto header = split_csv(line, 2);
    if (header.size() < kFixedColumns.size() + 1 || header.back() != "status")
        throw ParseError("unexpected header", 2);
    for (std::size_t i = 0; i < kFixedColumns.size(); ++i)
        if (header[i] != kFixedColumns[i]) throw ParseError("unexpected column '" + header[i] + "'", 2);
    std::vector<double> ts;
    for (std::size_t i = kFixedColumns.size(); i + 1 < header.size(); ++i) {
        if (header[i].rfind("x_", 0) != 0) throw ParseError("unexpected column '" + header[i] + "'", 2);
        ts.push_back(parse_num(header[i].substr(2), 2, "header"));
    }
    std::vector<SweepRecord> out;
    std::size_t line_no = 2;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv(line, line_no);
        if (f.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()),
                             line_no);
        SweepRecord r;
        r.optimizer = f[0];
        r.n = static_cast<int>(parse_uint(f[1], line_no, "n"));
        r.noise = f[2];
        r.noise_index = parse_uint(f[3], line_no, "noise_index");
        r.instance = static_cast<int>(parse_uint(f[4], line_no, "instance"));
        r.instance_seed = parse_uint(f[5], line_no, "instance_seed");
        r.candidate = f[6];
        r.final_ar = parse_num(f[7], line_no, "final_ar");
        r.n_calls = parse_uint(f[8], line_no, "n_calls");
        r.best_loss = parse_num(f[9], line_no, "best_loss");
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const auto x = parse_uint(f[kFixedColumns.size() + k], line_no, "x_t");
            if (x > 1) throw ParseError("success indicator must be 0 or 1", line_no);
            r.successes.push_back(static_cast<int>(x));
        }
        r.status = f.back();
        try {
            NoiseSpec::parse(r.noise);
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line_no);
        }
        out.push_back(std::move(r));
    }
    if (thresholds) *thresholds = ts;
    return out;
}

void write_cells_csv(std::ostream& os, const std::vector<CellStats>& cells, const std::vector<double>& thresholds) {
    os << "#schema=" << kCellsSchema << "\n";
    os << "optimizer,n,noise,noise_index,level,t,p_hat,std_err,n_runs,successes,failures\n";
    for (const CellStats& c : cells) {
        for (std::size_t k = 0; k < thresholds.size() && k < c.stats.size(); ++k) {
            const SolvabilityStat& s = c.stats[k];
            os << csv_field(c.optimizer) << ',' << c.n << ',' << csv_field(c.noise) << ',' << c.noise_index << ','
               << num(c.level) << ',' << num(s.t) << ',' << num(s.p_hat) << ',' << num(s.std_err) << ',' << s.n_runs
               << ',' << s.successes << ',' << c.failures << "\n";
        }
    }
}

void write_timings_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
    os << "#schema=vqnoise.timings.v1\n";
    os << "optimizer,n,noise_index,instance,wall_seconds\n";
    for (const SweepRecord& r : records)
        os << csv_field(r.optimizer) << ',' << r.n << ',' << r.noise_index << ',' << r.instance << ','
           << num(r.wall_seconds) << "\n";
}

std::string records_to_json(const std::vector<SweepRecord>& records, const std::vector<double>& thresholds) {
    json j;
    j["schema"] = kSweepSchema;
    j["thresholds"] = thresholds;
    j["records"] = json::array();
    for (const SweepRecord& r : records) {
        j["records"].push_back({{"optimizer", r.optimizer},
                                {"n", r.n},
                                {"noise", r.noise},
                                {"noise_index", r.noise_index},
                                {"instance", r.instance},
                                {"instance_seed", r.instance_seed},
                                {"candidate", r.candidate},
                                {"final_ar", num_or_null(r.final_ar)},
                                {"n_calls", r.n_calls},
                                {"best_loss", num_or_null(r.best_loss)},
                                {"successes", r.successes},
                                {"status", r.status}});
    }
    return j.dump(1);
}

std::vector<SweepRecord> records_from_json(const std::string& text, std::vector<double>* thresholds) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        throw ParseError(std::string("invalid JSON: ") + e.what(),
                         static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n')) + 1);
    }
    if (!j.is_object() || !j.contains("schema")) throw ParseError("missing schema member", 0);
    if (j["schema"] != kSweepSchema)
        throw ParseError("schema version mismatch: document has " + j["schema"].dump() + ", expected '" +
                             kSweepSchema + "'",
                         0);
    const auto ts = j.at("thresholds").get<std::vector<double>>();
    std::vector<SweepRecord> out;
    const auto opt_num = [](const json& v) {
        return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
    };
    try {
        for (const auto& e : j.at("records")) {
            SweepRecord r;
            r.optimizer = e.at("optimizer").get<std::string>();
            r.n = e.at("n").get<int>();
            r.noise = e.at("noise").get<std::string>();
            r.noise_index = e.at("noise_index").get<std::size_t>();
            r.instance = e.at("instance").get<int>();
            r.instance_seed = e.at("instance_seed").get<std::uint64_t>();
            r.candidate = e.at("candidate").get<std::string>();
            r.final_ar = e.at("final_ar").is_null() ? std::nan("") : e.at("final_ar").get<double>();
            r.n_calls = e.at("n_calls").get<std::uint64_t>();
            r.best_loss = opt_num(e.at("best_loss"));
            r.successes = e.at("successes").get<std::vector<int>>();
            r.status = e.at("status").get<std::string>();
            out.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed record: ") + e.what(), 0);
    }
    if (thresholds) *thresholds = ts;
    return out;
}

void write_sweep(const std::string& dir, const SweepResult& result) {
    std::filesystem::create_directories(dir);
    const auto open = [&](const char* name) {
        std::ofstream f(std::filesystem::path(dir) / name);
        if (!f) throw std::runtime_error(std::string("cannot write ") + name + " in " + dir);
        return f;
    };
    {
        auto f = open("records.csv");
        write_records_csv(f, result.records, result.thresholds);
    }
    {
        auto f = open("cells.csv");
        write_cells_csv(f, result.cells, result.thresholds);
    }
    {
        auto f = open("timings.csv");
        write_timings_csv(f, result.records);
    }
    {
        auto f = open("records.json");
        f << records_to_json(result.records, result.thresholds) << "\n";
    }
}

std::string code_version() { return VQNOISE_VERSION; }

std::string manifest_json(const std::string& command, const std::string& config_text, std::uint64_t seed,
                          const std::map<std::string, std::string>& extra) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json j{{"schema", kManifestSchema}, {"command", command},     {"config", config_text},
           {"master_seed", seed},       {"version", code_version()}, {"created", stamp}};
    for (const auto& [k, v] : extra) j[k] = v;
    return j.dump(2);
}

}  // namespace vqnoise
