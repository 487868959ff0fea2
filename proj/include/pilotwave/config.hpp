#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "pilotwave/constants.hpp"
#include "pilotwave/double_slit.hpp"
#include "pilotwave/stern_gerlach.hpp"

namespace pilotwave {

enum class Experiment { DoubleSlit, SternGerlach, Eprb };

[[nodiscard]] std::string experiment_name(Experiment e);
/// "double-slit", "stern-gerlach" or "eprb"; std::invalid_argument otherwise.
[[nodiscard]] Experiment parse_experiment(const std::string& name);

/// Bad key, value or range.  line() is 0 for command-line overrides.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& key,
                const std::string& message);

    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

struct RunConfig {
    Experiment experiment = Experiment::SternGerlach;
    std::uint64_t seed = 1;
    std::size_t n = 0;  // 0: per-experiment default
    std::filesystem::path output_dir = "pilotwave_out";
    PhysicalConstants constants;

    // double-slit
    SlitGeometry slits;
    double source_sigma = 3.0e-6;
    double hbar_divisor = 1.0;
    DoubleSlitNumerics slit_numerics;
    double z_start = 5e-3;
    std::size_t output_points = 48;
    double slit_pos_tol = 1e-10;
    std::vector<double> cross_section_distances{3.5e-4, 3.5e-3, 3.5e-2, 0.35};
    std::size_t cross_section_points = 2001;
    bool hbar_study = false;
    std::vector<double> hbar_divisors{1.0, 10.0, 100.0, 1000.0, 10000.0};
    std::size_t equivariance_bins = 50;

    // stern-gerlach and eprb
    MagnetSpec magnet;
    double sigma0 = 1.0e-4;
    SgMode mode = SgMode::Pure;
    double theta0 = 1.0471975511965976;  // pi / 3
    double phi0 = 0.0;
    std::size_t spin_samples = 40;
    double sg_pos_tol = 1e-12;
    std::size_t density_points = 201;
    std::vector<double> deltas{0.0, 0.7853981633974483, 1.5707963267948966, 2.356194490192345,
                               3.141592653589793};

    /// Trajectory count after applying the per-experiment default.
    [[nodiscard]] std::size_t trajectories() const;
    /// Cross-field checks (e.g. separation > 2 half_width); throws ConfigError.
    void validate() const;
};

/// Defaults for the experiment.
[[nodiscard]] RunConfig default_config(Experiment experiment);

/// Sets one key from its text value.  `source` and `line` only label errors.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const std::string& source = "<override>", int line = 0);

/// Flat "key = value" text; '#' starts a comment, blank lines are ignored.
/// An `experiment` key, if present, must agree with config.experiment.
void apply_config_text(RunConfig& config, const std::string& text,
                       const std::string& source = "<config>");
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Every recognised key, for documentation and tests.
[[nodiscard]] std::vector<std::string> config_keys();

}  // namespace pilotwave
