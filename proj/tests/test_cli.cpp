#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "pilotwave/config.hpp"
#include "pilotwave/csv.hpp"
#include "pilotwave/runner.hpp"

using namespace pilotwave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pilotwave_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out[entry.path().filename().string()] = ss.str();
    }
    return out;
}

std::map<std::string, std::string> run_with_workers(RunConfig config, const std::string& tag,
                                                    const char* workers) {
    config.output_dir = scratch(tag);
    ::setenv("PILOTWAVE_WORKERS", workers, 1);
    (void)run_experiment(config);
    ::unsetenv("PILOTWAVE_WORKERS");
    return read_tree(config.output_dir);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PILOTWAVE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

double number(const RunResult& r, const std::string& key) { return std::stod(r.value(key)); }

}  // namespace

TEST_CASE("stern-gerlach defaults") {
    RunConfig c = default_config(Experiment::SternGerlach);
    apply_config_text(c, "", "empty");
    CHECK(c.magnet.B0 == 5.0);
    CHECK(c.magnet.gradient == 1e3);
    CHECK(c.magnet.length == 0.01);
    CHECK(c.magnet.drift == 0.2);
    CHECK(c.magnet.v0 == 500.0);
    CHECK(c.sigma0 == 1e-4);
    CHECK(c.trajectories() == 1000);
    CHECK(default_config(Experiment::DoubleSlit).trajectories() == 100);
    CHECK(parse_experiment("eprb") == Experiment::Eprb);
    CHECK(experiment_name(Experiment::DoubleSlit) == "double-slit");
    CHECK_THROWS_AS((void)parse_experiment("bell"), std::invalid_argument);
}

TEST_CASE("config text parsing") {
    RunConfig c = default_config(Experiment::DoubleSlit);
    apply_config_text(c,
                      "# comment\n"
                      "seed = 3\n"
                      "\n"
                      "slit_half_width = 2e-7   # trailing\n"
                      "cross_section_distances = 1e-3, 0.1\n"
                      "hbar_study = true\n",
                      "file");
    CHECK(c.seed == 3);
    CHECK(c.slits.half_width == 2e-7);
    CHECK(c.cross_section_distances == std::vector<double>{1e-3, 0.1});
    CHECK(c.hbar_study);
    for (const auto& key : config_keys()) {
        CHECK(!key.empty());
    }
}

TEST_CASE("errors name key and line") {
    RunConfig c = default_config(Experiment::DoubleSlit);
    try {
        apply_config_text(c, "seed = 1\npanels = -4\n", "f.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "panels");
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("panels") != std::string::npos);
    }
    try {
        apply_config_text(c, "\n\nwarp_factor = 9\n", "f.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "warp_factor");
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(apply_config_text(c, "sigma0 = -1\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(c, "hbar_divisor = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(c, "seed = abc\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(c, "no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(c, "experiment = eprb\n"), ConfigError);
    RunConfig bad = default_config(Experiment::DoubleSlit);
    apply_config_text(bad, "slit_separation = 1e-7\n");
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("command line") {
    const fs::path dir = scratch("cli_flags");
    fs::create_directories(dir);
    const fs::path cfg = dir / "run.cfg";
    std::ofstream(cfg) << "seed = 3\nn = 40\nspin_samples = 4\n";
    const fs::path out = dir / "out";
    CHECK(run_cli("stern-gerlach --config " + cfg.string() + " --seed 7 --out " + out.string()) == 0);
    const auto tree = read_tree(out);
    REQUIRE(tree.count("summary.csv") == 1);
    CHECK(tree.at("summary.csv").find("seed,7") != std::string::npos);

    std::ofstream(dir / "bad.cfg") << "panels = -4\n";
    CHECK(run_cli("double-slit --config " + (dir / "bad.cfg").string() + " --out " + out.string()) == 2);
    CHECK(run_cli("stern-gerlach --out " + out.string() + " --n 0") == 2);
    CHECK(run_cli("nonsense") != 0);
    CHECK(run_cli("stern-gerlach --config " + (dir / "missing.cfg").string()) == 2);
}

TEST_CASE("stern-gerlach summary") {
    RunConfig c = default_config(Experiment::SternGerlach);
    c.n = 300;
    c.spin_samples = 4;
    c.output_dir = scratch("sg_summary");
    const RunResult r = run_experiment(c);
    CHECK(number(r, "z_delta") == doctest::Approx(1.0e-5).epsilon(0.05));
    CHECK(number(r, "u") == doctest::Approx(1.0304).epsilon(1e-3));
    CHECK(number(r, "t_D") == doctest::Approx(2.9e-4).epsilon(0.05));
    CHECK(number(r, "threshold_violations") == 0.0);
    for (const char* f : {"sg_trajectories.csv", "sg_impacts.csv", "sg_density.csv",
                          "sg_density_matrix.csv", "summary.csv"}) {
        CHECK(fs::exists(c.output_dir / f));
    }
    CHECK_THROWS_AS((void)r.value("no_such_key"), std::out_of_range);
}

TEST_CASE("eprb summary") {
    RunConfig c = default_config(Experiment::Eprb);
    c.n = 100;
    c.deltas = {0.0};
    c.output_dir = scratch("eprb_summary");
    const RunResult r = run_experiment(c);
    CHECK(number(r, "E_0.000000") == -1.0);
    CHECK(fs::exists(c.output_dir / "eprb_pairs.csv"));
    CHECK(fs::exists(c.output_dir / "eprb_correlations.csv"));
    CHECK(fs::exists(c.output_dir / "eprb_spin_history.csv"));
}

TEST_CASE("outputs do not depend on the worker count") {
    RunConfig sg = default_config(Experiment::SternGerlach);
    sg.n = 60;
    sg.spin_samples = 5;
    sg.density_points = 21;
    CHECK(run_with_workers(sg, "sg_w1", "1") == run_with_workers(sg, "sg_w3", "3"));

    RunConfig ep = default_config(Experiment::Eprb);
    ep.n = 40;
    CHECK(run_with_workers(ep, "ep_w1", "1") == run_with_workers(ep, "ep_w4", "4"));

    RunConfig ds = default_config(Experiment::DoubleSlit);
    ds.n = 6;
    ds.output_points = 6;
    ds.cross_section_distances = {0.35};
    ds.cross_section_points = 201;
    const auto a = run_with_workers(ds, "ds_w1", "1");
    const auto b = run_with_workers(ds, "ds_w2", "2");
    CHECK(a.size() == b.size());
    CHECK(a == b);
}

TEST_CASE("csv writer") {
    const fs::path dir = scratch("csv");
    fs::create_directories(dir);
    {
        CsvWriter w(dir / "t.csv", {"a", "b", "c"});
        w.row({CsvCell(std::int64_t{3}), CsvCell(0.1), CsvCell(std::string("x"))});
        CHECK_THROWS(w.row({CsvCell(1.0)}));
        w.close();
    }
    const auto tree = read_tree(dir);
    CHECK(tree.at("t.csv") == "a,b,c\n3,1.0000000000000001e-01,x\n");
}
