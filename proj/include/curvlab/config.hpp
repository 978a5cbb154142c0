#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvlab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key = value text, '#' comments; duplicate keys are rejected with the
/// offending line number.
class KeyValues {
public:
    void set(const std::string& key, const std::string& value, int line = 0) {
        if (entries_.count(key))
            throw ConfigError("duplicate key '" + key + "'" +
                              (line ? " (line " + std::to_string(line) + ")" : ""));
        entries_[key] = value;
    }
    void override_with(const KeyValues& other) {
        for (const auto& [k, v] : other.entries_) entries_[k] = v;
    }
    const std::map<std::string, std::string>& entries() const { return entries_; }
    std::optional<std::string> get(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::map<std::string, std::string> entries_;
};

inline KeyValues parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    KeyValues kv;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        kv.set(key, value, lineno);
    }
    return kv;
}

/// "--key value" pairs; "--key=value" also accepted.
inline KeyValues parse_cli_flags(const std::vector<std::string>& args) {
    KeyValues kv;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0) throw ConfigError("expected --flag, got '" + a + "'");
        std::string key = a.substr(2), value;
        const auto eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
        } else {
            if (i + 1 >= args.size()) throw ConfigError("flag --" + key + " needs a value");
            value = args[++i];
        }
        kv.set(key, value);
    }
    return kv;
}

/// Modes of the batch front end.
inline const std::vector<std::string>& known_modes() {
    static const std::vector<std::string> m{"verify-elliptic", "verify-parabolic",
                                            "ellipse-scan",    "barrier-audit",
                                            "karamata-check",  "sweep"};
    return m;
}

struct RunConfig {
    std::string mode;
    std::string shape = "ball";  // ball | ellipse | halfspace
    int dim = 3;
    double radius = 1.0;
    double a = 2.0, b = 1.0;
    double sigma_plus = 1.0, sigma_minus = 4.0;
    std::vector<double> lambda_ladder;  // default set per mode
    std::string solver = "bessel";      // bessel | fd (verify-elliptic)
    double t0_factor = 1e-4, tmax_factor = 1.0, time_ratio = 1.15;
    int startup_steps = 4;
    double h0_factor = 0.0;  // 0 = per-solver default
    double stretch = 1.05;
    double margin_factor = 12.0;
    int nx = 1024, ny = 1024;
    int points = 16;
    double tolerance = 0.0;  // 0 = mode default
    std::string measure = "sqrt_t";  // sqrt_t | lebesgue | ell
    double alpha = 1.5;
    double k_override = -1.0;  // barrier-audit; < 0 means use K_cal
    int count = 20;
    std::uint64_t seed = 12345;
    int jobs = 1;
    std::string out_dir;  // resolved by the runner (flag/env/default)
    bool export_fields = false;

    static RunConfig from_keyvalues(const KeyValues& kv);
};

namespace detail {

inline std::vector<double> parse_ladder(const std::string& s) {
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {  // from:to:factorx
        std::istringstream is(s);
        std::string fa, fb, fc;
        std::getline(is, fa, ':');
        std::getline(is, fb, ':');
        std::getline(is, fc);
        if (fc.empty() || (fc.back() != 'x' && fc.back() != 'X'))
            throw ConfigError("ladder '" + s + "': expected from:to:factorx");
        const double from = std::stod(fa), to = std::stod(fb);
        const double factor = std::stod(fc.substr(0, fc.size() - 1));
        if (!(from > 0 && to > from && factor > 1))
            throw ConfigError("ladder '" + s + "': need 0 < from < to and factor > 1");
        for (double v = from; v <= to * (1 + 1e-9); v *= factor) out.push_back(v);
    } else {
        std::istringstream is(s);
        std::string item;
        while (std::getline(is, item, ',')) out.push_back(std::stod(item));
        for (std::size_t i = 1; i < out.size(); ++i)
            if (!(out[i] > out[i - 1]))
                throw ConfigError("ladder '" + s + "': values must increase");
    }
    if (out.size() < 3) throw ConfigError("ladder '" + s + "': need >= 3 entries");
    return out;
}

}  // namespace detail

inline RunConfig RunConfig::from_keyvalues(const KeyValues& kv) {
    RunConfig cfg;
    std::vector<std::string> errors;
    auto fail = [&](const std::string& m) { errors.push_back(m); };

    static const std::vector<std::string> known_keys{
        "mode",        "shape",      "dim",        "radius",        "a",
        "b",           "sigma-plus", "sigma-minus", "lambda-ladder", "solver",
        "t0-factor",   "tmax-factor", "time-ratio", "startup-steps", "h0-factor",
        "stretch",     "margin-factor", "nx",       "ny",            "points",
        "tolerance",   "measure",    "alpha",      "k-override",    "count",
        "seed",        "jobs",       "out",        "export-fields", "config"};
    for (const auto& [k, v] : kv.entries()) {
        if (std::find(known_keys.begin(), known_keys.end(), k) == known_keys.end())
            fail("unknown key '" + k + "'");
    }

    auto num = [&](const char* key, double& dst, bool positive = true) {
        if (auto v = kv.get(key)) {
            try {
                dst = std::stod(*v);
            } catch (...) {
                fail(std::string(key) + ": not a number: '" + *v + "'");
                return;
            }
            if (positive && !(dst > 0)) fail(std::string(key) + " must be positive");
        }
    };
    auto integer = [&](const char* key, int& dst, int lo) {
        if (auto v = kv.get(key)) {
            try {
                dst = std::stoi(*v);
            } catch (...) {
                fail(std::string(key) + ": not an integer: '" + *v + "'");
                return;
            }
            if (dst < lo) fail(std::string(key) + " must be >= " + std::to_string(lo));
        }
    };

    if (auto v = kv.get("mode")) {
        cfg.mode = *v;
        if (std::find(known_modes().begin(), known_modes().end(), cfg.mode) ==
            known_modes().end())
            fail("unknown mode '" + cfg.mode + "'");
    } else {
        fail("missing required key 'mode'");
    }
    if (auto v = kv.get("shape")) {
        cfg.shape = *v;
        if (cfg.shape != "ball" && cfg.shape != "ellipse" && cfg.shape != "halfspace")
            fail("shape must be ball, ellipse or halfspace");
    }
    integer("dim", cfg.dim, 2);
    num("radius", cfg.radius);
    num("a", cfg.a);
    num("b", cfg.b);
    num("sigma-plus", cfg.sigma_plus);
    num("sigma-minus", cfg.sigma_minus);
    if (auto v = kv.get("lambda-ladder")) {
        try {
            cfg.lambda_ladder = detail::parse_ladder(*v);
        } catch (const ConfigError& e) {
            fail(e.what());
        }
    }
    if (auto v = kv.get("solver")) {
        cfg.solver = *v;
        if (cfg.solver != "bessel" && cfg.solver != "fd")
            fail("solver must be bessel or fd");
    }
    num("t0-factor", cfg.t0_factor);
    num("tmax-factor", cfg.tmax_factor);
    num("time-ratio", cfg.time_ratio);
    if (!(cfg.time_ratio > 1.0)) fail("time-ratio must be > 1");
    integer("startup-steps", cfg.startup_steps, 1);
    num("h0-factor", cfg.h0_factor, false);
    if (cfg.h0_factor < 0) fail("h0-factor must be >= 0");
    num("stretch", cfg.stretch);
    if (!(cfg.stretch >= 1.0)) fail("stretch must be >= 1");
    num("margin-factor", cfg.margin_factor);
    integer("nx", cfg.nx, 4);
    integer("ny", cfg.ny, 4);
    integer("points", cfg.points, 1);
    num("tolerance", cfg.tolerance, false);
    if (cfg.tolerance < 0) fail("tolerance must be >= 0");
    if (auto v = kv.get("measure")) {
        cfg.measure = *v;
        if (cfg.measure != "sqrt_t" && cfg.measure != "lebesgue" && cfg.measure != "ell")
            fail("measure must be sqrt_t, lebesgue or ell");
    }
    num("alpha", cfg.alpha);
    num("k-override", cfg.k_override, false);
    integer("count", cfg.count, 1);
    if (auto v = kv.get("seed")) {
        try {
            cfg.seed = std::stoull(*v);
        } catch (...) {
            fail("seed: not an integer");
        }
    }
    integer("jobs", cfg.jobs, 1);
    if (auto v = kv.get("out")) cfg.out_dir = *v;
    if (auto v = kv.get("export-fields")) {
        if (*v == "true" || *v == "1")
            cfg.export_fields = true;
        else if (*v == "false" || *v == "0")
            cfg.export_fields = false;
        else
            fail("export-fields must be true/false");
    }
    if (cfg.shape == "ellipse" && !(cfg.a >= cfg.b)) fail("ellipse requires a >= b");

    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

/// FNV-1a over the canonical sorted key=value listing.
inline std::string config_hash(const KeyValues& kv) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& [k, v] : kv.entries()) {
        for (char c : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace curvlab
