#include "pilotwave/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace pilotwave {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Thrown by the value parsers; converted to ConfigError with location.
struct BadValue {
    std::string message;
};

double to_double(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) {
        throw BadValue{"expected a number, got nothing"};
    }
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        throw BadValue{"expected a finite number, got '" + s + "'"};
    }
    return v;
}

long long to_integer(const std::string& text) {
    const std::string s = trim(text);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
        throw BadValue{"expected an integer, got '" + s + "'"};
    }
    return v;
}

bool to_bool(const std::string& text) {
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no" || s == "off") {
        return false;
    }
    throw BadValue{"expected true or false, got '" + s + "'"};
}

std::vector<double> to_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(to_double(item));
    }
    if (out.empty()) {
        throw BadValue{"expected a comma-separated list of numbers"};
    }
    return out;
}

double positive(const std::string& text) {
    const double v = to_double(text);
    if (!(v > 0.0)) {
        throw BadValue{"must be > 0, got " + trim(text)};
    }
    return v;
}

std::size_t count_at_least(const std::string& text, long long minimum) {
    const long long v = to_integer(text);
    if (v < minimum) {
        throw BadValue{"must be >= " + std::to_string(minimum) + ", got " + trim(text)};
    }
    return static_cast<std::size_t>(v);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"seed",
         [](RunConfig& c, const std::string& v) {
             const long long s = to_integer(v);
             if (s < 0) {
                 throw BadValue{"must be >= 0"};
             }
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"n", [](RunConfig& c, const std::string& v) { c.n = count_at_least(v, 1); }},
        {"output_dir",
         [](RunConfig& c, const std::string& v) {
             if (trim(v).empty()) {
                 throw BadValue{"must not be empty"};
             }
             c.output_dir = trim(v);
         }},
        {"hbar", [](RunConfig& c, const std::string& v) { c.constants.hbar = positive(v); }},
        {"electron_mass",
         [](RunConfig& c, const std::string& v) { c.constants.electron_mass = positive(v); }},
        {"silver_mass",
         [](RunConfig& c, const std::string& v) { c.constants.silver_mass = positive(v); }},
        {"bohr_magneton",
         [](RunConfig& c, const std::string& v) { c.constants.bohr_magneton = positive(v); }},

        {"slit_half_width",
         [](RunConfig& c, const std::string& v) { c.slits.half_width = positive(v); }},
        {"slit_separation",
         [](RunConfig& c, const std::string& v) { c.slits.separation = positive(v); }},
        {"d1", [](RunConfig& c, const std::string& v) { c.slits.d1 = positive(v); }},
        {"d2", [](RunConfig& c, const std::string& v) { c.slits.d2 = positive(v); }},
        {"beam_speed", [](RunConfig& c, const std::string& v) { c.slits.beam_speed = positive(v); }},
        {"source_sigma", [](RunConfig& c, const std::string& v) { c.source_sigma = positive(v); }},
        {"hbar_divisor",
         [](RunConfig& c, const std::string& v) {
             const double d = to_double(v);
             if (!(d >= 1.0)) {
                 throw BadValue{"must be >= 1, got " + trim(v)};
             }
             c.hbar_divisor = d;
         }},
        {"quad_rel_tol",
         [](RunConfig& c, const std::string& v) {
             const double t = positive(v);
             if (!(t < 1.0)) {
                 throw BadValue{"must be < 1"};
             }
             c.slit_numerics.rel_tol = t;
         }},
        {"panels",
         [](RunConfig& c, const std::string& v) {
             c.slit_numerics.min_panels = static_cast<int>(count_at_least(v, 2));
         }},
        {"panels_per_radian",
         [](RunConfig& c, const std::string& v) { c.slit_numerics.panels_per_radian = positive(v); }},
        {"z_start", [](RunConfig& c, const std::string& v) { c.z_start = positive(v); }},
        {"output_points",
         [](RunConfig& c, const std::string& v) { c.output_points = count_at_least(v, 1); }},
        {"slit_pos_tol", [](RunConfig& c, const std::string& v) { c.slit_pos_tol = positive(v); }},
        {"cross_section_distances",
         [](RunConfig& c, const std::string& v) {
             auto list = to_list(v);
             for (const double d : list) {
                 if (!(d > 0.0)) {
                     throw BadValue{"distances must be > 0"};
                 }
             }
             c.cross_section_distances = std::move(list);
         }},
        {"cross_section_points",
         [](RunConfig& c, const std::string& v) { c.cross_section_points = count_at_least(v, 3); }},
        {"hbar_study", [](RunConfig& c, const std::string& v) { c.hbar_study = to_bool(v); }},
        {"hbar_divisors",
         [](RunConfig& c, const std::string& v) {
             auto list = to_list(v);
             for (const double d : list) {
                 if (!(d >= 1.0)) {
                     throw BadValue{"divisors must be >= 1"};
                 }
             }
             c.hbar_divisors = std::move(list);
         }},
        {"equivariance_bins",
         [](RunConfig& c, const std::string& v) { c.equivariance_bins = count_at_least(v, 2); }},

        {"B0", [](RunConfig& c, const std::string& v) { c.magnet.B0 = positive(v); }},
        {"gradient", [](RunConfig& c, const std::string& v) { c.magnet.gradient = positive(v); }},
        {"length", [](RunConfig& c, const std::string& v) { c.magnet.length = positive(v); }},
        {"drift", [](RunConfig& c, const std::string& v) { c.magnet.drift = positive(v); }},
        {"v0", [](RunConfig& c, const std::string& v) { c.magnet.v0 = positive(v); }},
        {"sigma0", [](RunConfig& c, const std::string& v) { c.sigma0 = positive(v); }},
        {"mode",
         [](RunConfig& c, const std::string& v) {
             const std::string s = trim(v);
             if (s == "pure") {
                 c.mode = SgMode::Pure;
             } else if (s == "mixture") {
                 c.mode = SgMode::Mixture;
             } else {
                 throw BadValue{"expected pure or mixture, got '" + s + "'"};
             }
         }},
        {"theta0",
         [](RunConfig& c, const std::string& v) {
             const double t = to_double(v);
             if (!(t >= 0.0 && t <= std::numbers::pi)) {
                 throw BadValue{"must lie in [0, pi], got " + trim(v)};
             }
             c.theta0 = t;
         }},
        {"phi0",
         [](RunConfig& c, const std::string& v) {
             const double p = to_double(v);
             if (!(p >= 0.0 && p < 2.0 * std::numbers::pi)) {
                 throw BadValue{"must lie in [0, 2 pi), got " + trim(v)};
             }
             c.phi0 = p;
         }},
        {"spin_samples",
         [](RunConfig& c, const std::string& v) { c.spin_samples = count_at_least(v, 1); }},
        {"sg_pos_tol", [](RunConfig& c, const std::string& v) { c.sg_pos_tol = positive(v); }},
        {"density_points",
         [](RunConfig& c, const std::string& v) { c.density_points = count_at_least(v, 2); }},
        {"deltas", [](RunConfig& c, const std::string& v) { c.deltas = to_list(v); }},
    };
    return table;
}

}  // namespace

std::string experiment_name(Experiment e) {
    switch (e) {
        case Experiment::DoubleSlit:
            return "double-slit";
        case Experiment::SternGerlach:
            return "stern-gerlach";
        case Experiment::Eprb:
            return "eprb";
    }
    return "unknown";
}

Experiment parse_experiment(const std::string& name) {
    if (name == "double-slit") {
        return Experiment::DoubleSlit;
    }
    if (name == "stern-gerlach") {
        return Experiment::SternGerlach;
    }
    if (name == "eprb") {
        return Experiment::Eprb;
    }
    throw std::invalid_argument("unknown experiment '" + name + "'");
}

ConfigError::ConfigError(const std::string& source, int line, const std::string& key,
                         const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                         ": " + key + ": " + message),
      line_(line),
      key_(key) {}

std::size_t RunConfig::trajectories() const {
    if (n > 0) {
        return n;
    }
    return experiment == Experiment::DoubleSlit ? 100 : 1000;
}

void RunConfig::validate() const {
    if (!(slits.separation > 2.0 * slits.half_width)) {
        throw ConfigError("<config>", 0, "slit_separation", "must exceed 2 slit_half_width");
    }
    if (!(z_start < slits.d2)) {
        throw ConfigError("<config>", 0, "z_start", "must be smaller than d2");
    }
    for (const double d : cross_section_distances) {
        if (d > slits.d2) {
            throw ConfigError("<config>", 0, "cross_section_distances", "must not exceed d2");
        }
    }
    try {
        constants.with_hbar_divided(hbar_divisor).validate();
    } catch (const std::exception& e) {
        throw ConfigError("<config>", 0, "hbar", e.what());
    }
}

RunConfig default_config(Experiment experiment) {
    RunConfig c;
    c.experiment = experiment;
    return c;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const std::string& source, int line) {
    if (key == "experiment") {
        Experiment e;
        try {
            e = parse_experiment(trim(value));
        } catch (const std::invalid_argument& err) {
            throw ConfigError(source, line, key, err.what());
        }
        if (e != config.experiment) {
            throw ConfigError(source, line, key,
                              "file is for '" + trim(value) + "' but the run is '" +
                                  experiment_name(config.experiment) + "'");
        }
        return;
    }
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) {
        throw ConfigError(source, line, key, "unknown key");
    }
    try {
        it->second(config, value);
    } catch (const BadValue& bad) {
        throw ConfigError(source, line, key, bad.message);
    }
}

void apply_config_text(RunConfig& config, const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (content.empty()) {
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source, line, content, "expected 'key = value'");
        }
        const std::string key = trim(content.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(source, line, "<empty>", "missing key before '='");
        }
        apply_setting(config, key, content.substr(eq + 1), source, line);
    }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path.string(), 0, "<file>", "cannot be opened");
    }
    std::ostringstream text;
    text << in.rdbuf();
    apply_config_text(config, text.str(), path.string());
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys{"experiment"};
    for (const auto& [key, setter] : setters()) {
        keys.push_back(key);
    }
    return keys;
}

}  // namespace pilotwave
