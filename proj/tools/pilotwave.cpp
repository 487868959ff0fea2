#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pilotwave/config.hpp"
#include "pilotwave/errors.hpp"
#include "pilotwave/runner.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<long long> seed;
    std::optional<long long> n;
    std::optional<std::string> out;
    std::optional<double> hbar_divisor;
    std::optional<double> theta0;
    std::optional<double> phi0;
    std::optional<double> delta;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "flat key = value configuration file");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--n", f.n, "number of trajectories or pairs");
    sub->add_option("--out", f.out, "output directory");
}

// Flags override the file; values go through the same checks as file keys.
void apply_flags(pilotwave::RunConfig& config, const Flags& f) {
    auto set = [&](const std::string& key, const std::string& value) {
        pilotwave::apply_setting(config, key, value, "--" + key, 0);
    };
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    if (f.seed) {
        set("seed", std::to_string(*f.seed));
    }
    if (f.n) {
        set("n", std::to_string(*f.n));
    }
    if (f.out) {
        set("output_dir", *f.out);
    }
    if (f.hbar_divisor) {
        set("hbar_divisor", num(*f.hbar_divisor));
    }
    if (f.theta0) {
        set("theta0", num(*f.theta0));
        set("mode", "pure");
    }
    if (f.phi0) {
        set("phi0", num(*f.phi0));
        set("mode", "pure");
    }
    if (f.delta) {
        set("deltas", num(*f.delta));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pilot-wave trajectory experiments: double slit, Stern-Gerlach, EPR-B"};
    app.require_subcommand(1);
    Flags flags;

    auto* ds = app.add_subcommand("double-slit", "electron double slit");
    add_common(ds, flags);
    ds->add_option("--hbar-divisor", flags.hbar_divisor, "divide hbar by this factor (>= 1)");

    auto* sg = app.add_subcommand("stern-gerlach", "silver atoms through a Stern-Gerlach magnet");
    add_common(sg, flags);
    sg->add_option("--theta0", flags.theta0, "initial polar angle (pure mode)");
    sg->add_option("--phi0", flags.phi0, "initial azimuth (pure mode)");

    auto* ep = app.add_subcommand("eprb", "EPR-B pairs with two sequential magnets");
    add_common(ep, flags);
    ep->add_option("--delta", flags.delta, "single analyser angle instead of the default list");

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string name = app.get_subcommands().front()->get_name();
        pilotwave::RunConfig config = pilotwave::default_config(pilotwave::parse_experiment(name));
        if (!flags.config.empty()) {
            pilotwave::apply_config_file(config, flags.config);
        }
        apply_flags(config, flags);
        const pilotwave::RunResult result = pilotwave::run_experiment(config);
        std::cout << name << ": wrote " << result.files.size() << " files to "
                  << config.output_dir.string() << '\n';
        return 0;
    } catch (const pilotwave::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const pilotwave::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
