// Copyright 2026 The vdshadow Authors
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

#ifndef VDSHADOW_CONFIG_H
#define VDSHADOW_CONFIG_H

#include <fstream>
#include <map>
#include <sstream>

#include "vdshadow/shadows.hpp"

namespace vdshadow {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &message) : std::runtime_error(message) {}
};

/// Flat key = value configuration. '#' starts a comment; keys are unique.
struct Config {
    std::map<std::string, std::string> values;

    static Config parse_text(const std::string &text, const std::string &origin = "<config>") {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            lineno++;
            size_t hash = line.find('#');
            if (hash != std::string::npos) {
                line = line.substr(0, hash);
            }
            auto trim = [](std::string s) {
                size_t b = s.find_first_not_of(" \t\r");
                size_t e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            std::string stripped = trim(line);
            if (stripped.empty()) {
                continue;
            }
            size_t eq = stripped.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
            }
            std::string key = trim(stripped.substr(0, eq));
            std::string value = trim(stripped.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
            }
            if (cfg.values.count(key)) {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
            }
            cfg.values[key] = value;
        }
        return cfg;
    }

    static Config parse_file(const std::string &path) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError(path + ": cannot open config file");
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_text(buf.str(), path);
    }

    /// Canonical serialization: sorted keys, one per line.
    std::string serialize() const {
        std::ostringstream out;
        for (const auto &[key, value] : values) {
            out << key << " = " << value << "\n";
        }
        return out.str();
    }

    bool has(const std::string &key) const {
        return values.count(key) != 0;
    }

    std::string get(const std::string &key, const std::string &fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }

    std::string require(const std::string &key) const {
        auto it = values.find(key);
        if (it == values.end()) {
            throw ConfigError("missing required key '" + key + "'");
        }
        return it->second;
    }

    long get_int(const std::string &key, long fallback) const {
        auto it = values.find(key);
        if (it == values.end()) {
            return fallback;
        }
        try {
            return std::stol(it->second);
        } catch (const std::exception &) {
            throw ConfigError("key '" + key + "' is not an integer: " + it->second);
        }
    }

    double get_double(const std::string &key, double fallback) const {
        auto it = values.find(key);
        if (it == values.end()) {
            return fallback;
        }
        try {
            return std::stod(it->second);
        } catch (const std::exception &) {
            throw ConfigError("key '" + key + "' is not a number: " + it->second);
        }
    }

    std::vector<long> get_int_list(const std::string &key, std::vector<long> fallback) const {
        auto it = values.find(key);
        if (it == values.end()) {
            return fallback;
        }
        std::vector<long> out;
        std::istringstream in(it->second);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            try {
                out.push_back(std::stol(tok));
            } catch (const std::exception &) {
                throw ConfigError("key '" + key + "' has a non-integer entry: " + tok);
            }
        }
        if (out.empty()) {
            throw ConfigError("key '" + key + "' is an empty list");
        }
        return out;
    }
};

/// Observable grammar: a Pauli label over {I,X,Y,Z} (character q names
/// qubit q), optionally prefixed with '-', or "proj0" for |0><0| on every
/// qubit of the subsystem.
inline SubsystemOperator parse_observable(const std::string &text, int n) {
    if (text == "proj0") {
        return SubsystemOperator::projector0(n);
    }
    std::string label = text;
    int sign = +1;
    if (!label.empty() && label[0] == '-') {
        sign = -1;
        label = label.substr(1);
    }
    if (static_cast<int>(label.size()) != n) {
        throw ConfigError("observable '" + text + "' does not match subsystem size " + std::to_string(n));
    }
    try {
        return SubsystemOperator::from_pauli(PauliString::from_label(label, sign));
    } catch (const std::exception &e) {
        throw ConfigError("observable '" + text + "': " + e.what());
    }
}

inline std::vector<SubsystemOperator> parse_observable_list(const std::string &text, int n) {
    std::vector<SubsystemOperator> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        out.push_back(parse_observable(tok, n));
    }
    if (out.empty()) {
        throw ConfigError("empty observable list");
    }
    return out;
}

/// Experiment-level configuration shared by the CLI commands.
struct ExperimentConfig {
    ExperimentCore core;
    size_t shots = 1000;
    int threads = 0;
    int a = 1;
    size_t bootstrap = 1000;
    std::string estimator = "linear";
    std::string observable = "ZZI";
    std::string observable2;
    std::string ops;
    std::vector<long> m_list;
    std::string out_dir = "out";
    std::string label = "run";

    static ExperimentConfig from_config(const Config &cfg) {
        ExperimentConfig ec;
        ec.core.n = static_cast<int>(cfg.get_int("n", 3));
        long m = cfg.get_int("m", 2);
        ec.core.m = static_cast<int>(m);
        ec.m_list = cfg.get_int_list("m_list", {m});
        ec.shots = static_cast<size_t>(cfg.get_int("shots", 1000));
        ec.core.seed = static_cast<uint64_t>(cfg.get_int("seed", 1));
        ec.threads = static_cast<int>(cfg.get_int("threads", 0));
        ec.a = static_cast<int>(cfg.get_int("a", 1));
        ec.bootstrap = static_cast<size_t>(cfg.get_int("bootstrap", 1000));
        std::string prep = cfg.get("prep", "ghz");
        if (prep != "ghz") {
            throw ConfigError("prep '" + prep + "' is not supported in config files (use ghz)");
        }
        ec.core.prep = StatePrep::ghz();
        ec.core.noise.error_rate = cfg.get_double("noise_p", 0.0);
        std::string pauli = cfg.get("noise_pauli", "Y");
        if (pauli.size() != 1) {
            throw ConfigError("noise_pauli must be one of X, Y, Z");
        }
        ec.core.noise.pauli_op = pauli[0];
        ec.core.noise.target_qubit = static_cast<int>(cfg.get_int("noise_qubit", 0));
        ec.estimator = cfg.get("estimator", "linear");
        ec.observable = cfg.get("observable", "");
        ec.observable2 = cfg.get("observable2", "");
        ec.ops = cfg.get("ops", "");
        ec.out_dir = cfg.get("out_dir", "out");
        ec.label = cfg.get("label", "run");
        std::string tags = cfg.get("tags", "pauli");
        ec.tag_spec = tags;
        static const std::vector<std::string> known = {
            "n",          "m",          "m_list",   "shots",     "seed",    "threads", "a",
            "bootstrap",  "prep",       "noise_p",  "noise_pauli", "noise_qubit", "estimator",
            "observable", "observable2", "ops",     "out_dir",   "label",   "tags",
            "bench_n_list", "bench_a_list", "bench_fixed_n", "bench_fixed_a", "bench_reps",
            "sweep", "sweep_min", "sweep_max"};
        for (const auto &[key, value] : cfg.values) {
            bool ok = false;
            for (const auto &k : known) {
                if (k == key) {
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                throw ConfigError("unknown key '" + key + "'");
            }
        }
        return ec;
    }

    std::string tag_spec = "pauli";

    /// Tags instantiated for a given order M.
    ShadowTypeTag tags_for(int m) const {
        if (tag_spec == "pauli") {
            return ShadowTypeTag::all_pauli(m);
        }
        if (tag_spec == "clifford") {
            return ShadowTypeTag::all_clifford(m);
        }
        ShadowTypeTag t = ShadowTypeTag::from_string(tag_spec);
        if (t.order() != m) {
            throw ConfigError("tags string length does not match order M=" + std::to_string(m));
        }
        return t;
    }

    ExperimentCore core_for(int m) const {
        ExperimentCore c = core;
        c.m = m;
        c.tags = tags_for(m);
        c.validate();
        return c;
    }
};

}  // namespace vdshadow

#endif
