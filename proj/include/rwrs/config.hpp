#pragma once
// Experiment configuration: a flat key = value file with '#' comments.
// Parsing reports every problem at once; serialization round-trips.

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rwrs/dist.hpp"

namespace rwrs {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::vector<std::string>& problems)
        : std::runtime_error(join(problems)), issues(problems) {}
    std::vector<std::string> issues;

  private:
    static std::string join(const std::vector<std::string>& ps) {
        std::string s = "configuration invalid:";
        for (const auto& p : ps) {
            s += "\n  - ";
            s += p;
        }
        return s;
    }
};

struct ExperimentConfig {
    std::string command;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    unsigned workers = 1;

    std::uint64_t n = 4096;       // walk length / sample count
    std::uint32_t m = 4096;       // lattice refinement (perfect square)
    double horizon = 1.0;         // fine path horizon T
    double time = 1.0;            // evaluation time t
    std::uint64_t replicas = 100;
    std::string dist_text = "rademacher";
    DistSpec dist{};

    std::uint64_t n_max = 1ull << 12;   // coupling walker horizon
    std::uint32_t exit_refine = 4096;   // coupling exit grid refinement
    std::uint64_t first_checkpoint = 256;

    double dx = 1e-4;                   // embedding exit grid step
    std::uint64_t embed_n = 100000;     // embedded values per side

    double var_halfwidth = 5.0;
    double var_h = 0.005;
    double var_step = 1e-5;
    double var_tol = 1e-9;
    std::uint64_t var_max_iter = 400000;

    std::string inputs;  // report: directory of summaries to merge

    std::string to_text() const;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace detail

inline const std::set<std::string>& config_commands() {
    static const std::set<std::string> cmds = {"rwrs",  "bmbs",     "couple", "embed-test",
                                              "sisq",  "varsolve", "report"};
    return cmds;
}

inline ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::vector<std::string> errors;
    std::map<std::string, std::string> kv;
    std::size_t lineno = 0;
    std::string_view rest = text;
    while (!rest.empty()) {
        ++lineno;
        auto nl = rest.find('\n');
        std::string_view line = nl == std::string_view::npos ? rest : rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string val(detail::trim(line.substr(eq + 1)));
        if (key.empty() || val.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": empty key or value");
            continue;
        }
        if (kv.count(key))
            errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = val;
    }

    auto take = [&kv](const std::string& key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto parse_u64 = [&errors](const std::string& key, const std::string& v, std::uint64_t& out) {
        try {
            std::size_t used = 0;
            const auto parsed = std::stoull(v, &used);
            if (used != v.size()) throw std::invalid_argument("trailing");
            out = parsed;
        } catch (const std::exception&) {
            errors.push_back("key '" + key + "': not an unsigned integer: '" + v + "'");
        }
    };
    auto parse_f = [&errors](const std::string& key, const std::string& v, double& out) {
        try {
            std::size_t used = 0;
            const double parsed = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument("trailing");
            out = parsed;
        } catch (const std::exception&) {
            errors.push_back("key '" + key + "': not a number: '" + v + "'");
        }
    };

    static const std::set<std::string> known = {
        "command",    "seed",        "out",           "workers",          "n",
        "m",          "horizon",     "time",          "replicas",         "dist",
        "n_max",      "exit_refine", "first_checkpoint", "dx",            "embed_n",
        "var_halfwidth", "var_h",    "var_step",      "var_tol",          "var_max_iter",
        "inputs"};
    for (const auto& [k, v] : kv)
        if (!known.count(k)) errors.push_back("unknown key '" + k + "'");

    if (const auto* v = take("command")) cfg.command = *v;
    if (const auto* v = take("seed")) parse_u64("seed", *v, cfg.seed);
    if (const auto* v = take("out")) cfg.out_dir = *v;
    if (const auto* v = take("workers")) {
        std::uint64_t w = 1;
        parse_u64("workers", *v, w);
        cfg.workers = static_cast<unsigned>(w);
    }
    if (const auto* v = take("n")) parse_u64("n", *v, cfg.n);
    if (const auto* v = take("m")) {
        std::uint64_t m64 = 0;
        parse_u64("m", *v, m64);
        cfg.m = static_cast<std::uint32_t>(m64);
        if (m64 != cfg.m) errors.push_back("key 'm': out of range");
    }
    if (const auto* v = take("horizon")) parse_f("horizon", *v, cfg.horizon);
    if (const auto* v = take("time")) parse_f("time", *v, cfg.time);
    if (const auto* v = take("replicas")) parse_u64("replicas", *v, cfg.replicas);
    if (const auto* v = take("dist")) cfg.dist_text = *v;
    if (const auto* v = take("n_max")) parse_u64("n_max", *v, cfg.n_max);
    if (const auto* v = take("exit_refine")) {
        std::uint64_t r = 0;
        parse_u64("exit_refine", *v, r);
        cfg.exit_refine = static_cast<std::uint32_t>(r);
        if (r != cfg.exit_refine) errors.push_back("key 'exit_refine': out of range");
    }
    if (const auto* v = take("first_checkpoint")) parse_u64("first_checkpoint", *v, cfg.first_checkpoint);
    if (const auto* v = take("dx")) parse_f("dx", *v, cfg.dx);
    if (const auto* v = take("embed_n")) parse_u64("embed_n", *v, cfg.embed_n);
    if (const auto* v = take("var_halfwidth")) parse_f("var_halfwidth", *v, cfg.var_halfwidth);
    if (const auto* v = take("var_h")) parse_f("var_h", *v, cfg.var_h);
    if (const auto* v = take("var_step")) parse_f("var_step", *v, cfg.var_step);
    if (const auto* v = take("var_tol")) parse_f("var_tol", *v, cfg.var_tol);
    if (const auto* v = take("var_max_iter")) parse_u64("var_max_iter", *v, cfg.var_max_iter);
    if (const auto* v = take("inputs")) cfg.inputs = *v;

    if (cfg.command.empty())
        errors.push_back("missing required key 'command'");
    else if (!config_commands().count(cfg.command))
        errors.push_back("unknown command '" + cfg.command + "'");

    try {
        cfg.dist = parse_dist(cfg.dist_text);
    } catch (const std::exception& e) {
        errors.push_back(std::string("key 'dist': ") + e.what());
    }

    // Range checks (only for keys the commands actually consume).
    if (cfg.command == "rwrs" || cfg.command == "bmbs" || cfg.command == "sisq" ||
        cfg.command == "couple" || cfg.command == "embed-test") {
        const auto r = static_cast<std::uint32_t>(std::uint64_t(std::llround(std::sqrt(double(cfg.m)))));
        if (cfg.m < 4 || r * r != cfg.m)
            errors.push_back("key 'm': must be a perfect square >= 4");
    }
    if (cfg.command == "couple") {
        if (cfg.n_max < 1) errors.push_back("key 'n_max': must be >= 1");
        if (!detail::is_pow2(cfg.first_checkpoint))
            errors.push_back("key 'first_checkpoint': must be a power of two");
        if (cfg.first_checkpoint > cfg.n_max)
            errors.push_back("key 'first_checkpoint': beyond n_max");
        if (cfg.exit_refine < 1) errors.push_back("key 'exit_refine': must be >= 1");
        if (cfg.replicas < 3) errors.push_back("key 'replicas': coupling needs >= 3");
    }
    if (cfg.command == "embed-test") {
        if (!(cfg.dx > 0.0 && cfg.dx <= 0.01))
            errors.push_back("key 'dx': need 0 < dx <= 0.01");
        if (cfg.embed_n < 100) errors.push_back("key 'embed_n': need >= 100");
    }
    if (cfg.command == "varsolve") {
        if (!(cfg.var_halfwidth >= 5.0)) errors.push_back("key 'var_halfwidth': need >= 5");
        if (!(cfg.var_h > 0.0 && cfg.var_h <= 0.01))
            errors.push_back("key 'var_h': need 0 < var_h <= 0.01");
        if (!(cfg.var_step > 0.0)) errors.push_back("key 'var_step': must be > 0");
        if (!(cfg.var_tol > 0.0)) errors.push_back("key 'var_tol': must be > 0");
    }
    if (!(cfg.horizon >= 0.0)) errors.push_back("key 'horizon': must be >= 0");
    if (!(cfg.time >= 0.0)) errors.push_back("key 'time': must be >= 0");
    if (cfg.command == "report" && cfg.inputs.empty())
        errors.push_back("command 'report' needs key 'inputs'");

    if (!errors.empty()) throw ConfigError(errors);
    return cfg;
}

inline std::string ExperimentConfig::to_text() const {
    std::ostringstream os;
    char buf[64];
    auto emit_f = [&os, &buf](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << key << " = " << buf << "\n";
    };
    os << "command = " << command << "\n";
    os << "seed = " << seed << "\n";
    os << "out = " << out_dir << "\n";
    os << "workers = " << workers << "\n";
    os << "n = " << n << "\n";
    os << "m = " << m << "\n";
    emit_f("horizon", horizon);
    emit_f("time", time);
    os << "replicas = " << replicas << "\n";
    os << "dist = " << dist_text << "\n";
    os << "n_max = " << n_max << "\n";
    os << "exit_refine = " << exit_refine << "\n";
    os << "first_checkpoint = " << first_checkpoint << "\n";
    emit_f("dx", dx);
    os << "embed_n = " << embed_n << "\n";
    emit_f("var_halfwidth", var_halfwidth);
    emit_f("var_h", var_h);
    emit_f("var_step", var_step);
    emit_f("var_tol", var_tol);
    os << "var_max_iter = " << var_max_iter << "\n";
    if (!inputs.empty()) os << "inputs = " << inputs << "\n";
    return os.str();
}

}  // namespace rwrs
