// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pilotwave/config.hpp"
#include "pilotwave/double_slit.hpp"
#include "pilotwave/eprb.hpp"
#include "pilotwave/equivariance.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/runner.hpp"
#include "pilotwave/stern_gerlach.hpp"

using namespace pilotwave;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

// pinned tolerances
constexpr double kTolU = 0.05;                 // u against 1 m/s, and z_delta against 1e-5 m
constexpr double kTolIdentity = 1e-12;         // closed-form identities
constexpr double kTolTD = 0.05;                // t_D against 2.9e-4 s
constexpr double kTolOverlap = 0.10;           // overlap time against t_D
constexpr double kTolOffDiagonal = 1e-4;
constexpr double kTolDiagonal = 1e-6;
constexpr std::size_t kBornN = 10000;
constexpr double kBornSigmas = 3.0;
constexpr std::size_t kThresholdN = 1000;
constexpr double kNearDiscrepancy = 0.05;
constexpr double kFarVisibility = 0.9;
constexpr double kTolFringe = 0.05;
constexpr std::size_t kSlitEnsemble = 10000;
constexpr int kBins = 50;
constexpr double kHbarRatio = 0.02;
constexpr double kTolMarginalB = 1e-12;
constexpr double kTolOpposite = 1e-9;
constexpr std::size_t kPairs = 1000;
constexpr double kTolKernel = 1e-6;
constexpr double kTolWidth = 1e-12;

int failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
    std::printf("criterion %2d: %s  %s  [%.1f s]\n", id, pass ? "PASS" : "FAIL", detail.c_str(),
                seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void timed(int id, const std::function<std::pair<bool, std::string>()>& body) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        std::tie(pass, detail) = body();
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(id, pass, detail, s);
}

const PhysicalConstants kC;

const SternGerlach& magnet() {
    static const SternGerlach sg(MagnetSpec{}, 1e-4, kC);
    return sg;
}

double t_D_total() { return magnet().derived().field_time + magnet().decoherence_time(); }

// shared between criteria 4, 5 and 7
std::map<double, SgEnsemble> born_runs;

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

}  // namespace

int main() {
    timed(1, [] {
        const auto& d = magnet().derived();
        const double dt = 0.01 / 500.0;
        const double z_formula = kC.bohr_magneton * 1e3 * dt * dt / (2.0 * kC.silver_mass);
        const double u_formula = kC.bohr_magneton * 1e3 * dt / kC.silver_mass;
        const bool identity = std::fabs(d.z_delta / z_formula - 1.0) < kTolIdentity &&
                              std::fabs(d.u / u_formula - 1.0) < kTolIdentity &&
                              std::fabs(d.field_time / 2e-5 - 1.0) < kTolIdentity;
        const bool close = std::fabs(d.u - 1.0) < kTolU && std::fabs(d.z_delta / 1e-5 - 1.0) < kTolU;
        return std::pair{identity && close,
                         fmt("z_delta=%.6e m u=%.6f m/s dt=%.3e s (u within %.0f%% of 1)", d.z_delta,
                             d.u, d.field_time, 100 * kTolU)};
    });

    timed(2, [] {
        const SternGerlach& sg = magnet();
        const double tD = sg.decoherence_time();
        const double formula = (3e-4 - sg.derived().z_delta) / sg.derived().u;
        const double overlap = sg.overlap_separation_time();
        const bool pass = std::fabs(tD / formula - 1.0) < kTolIdentity &&
                          std::fabs(tD / 2.9e-4 - 1.0) < kTolTD &&
                          std::fabs(overlap / tD - 1.0) < kTolOverlap;
        return std::pair{pass, fmt("t_D=%.6e s overlap-criterion=%.6e s (ratio %.6f)", tD, overlap,
                                   overlap / tD)};
    });

    timed(3, [] {
        const SternGerlach& sg = magnet();
        const double dt = sg.derived().field_time;
        double off = 0.0, diag = 0.0;
        for (double s : {sg.decoherence_time(), 1.5 * sg.decoherence_time(),
                         2.0 * sg.decoherence_time(), sg.magnet().drift_time()}) {
            const auto rho = sg.spin_density_matrix({pi / 3.0, 0.0}, dt + s);
            off = std::max({off, std::abs(rho[1]), std::abs(rho[2])});
            diag = std::max({diag, std::fabs(rho[0].real() - 0.75), std::fabs(rho[3].real() - 0.25)});
        }
        return std::pair{off < kTolOffDiagonal && diag < kTolDiagonal,
                         fmt("max|rho_+-|=%.3e max|diag-(0.75,0.25)|=%.3e for t >= t_D", off, diag)};
    });

    timed(4, [] {
        bool pass = true;
        std::string detail;
        for (double theta : {pi / 6.0, pi / 3.0, pi / 2.0}) {
            SgEnsembleOptions opts;
            opts.pure = {theta, 0.0};
            opts.n = kBornN;
            opts.seed = 2024;
            opts.spin_samples = 8;
            opts.extra_times = {t_D_total()};
            const SgEnsemble e = run_sg_ensemble(magnet(), opts);
            const double p = std::pow(std::cos(theta / 2.0), 2);
            const double bound = kBornSigmas * std::sqrt(p * (1.0 - p) / kBornN);
            pass = pass && std::fabs(e.up_fraction - p) < bound;
            detail += fmt("theta=%.4f up=%.4f expected=%.4f bound=%.4f; ", theta, e.up_fraction, p, bound);
            born_runs[theta] = e;
        }
        return std::pair{pass, detail};
    });

    timed(5, [] {
        std::size_t violations = 0;
        std::string detail;
        for (double theta : {pi / 6.0, pi / 3.0, pi / 2.0}) {
            SgEnsembleOptions opts;
            opts.pure = {theta, 0.0};
            opts.n = kThresholdN;
            opts.seed = 5;
            const SgEnsemble e = run_sg_ensemble(magnet(), opts);
            violations += e.violations;
            detail += fmt("theta=%.4f violations=%zu aligned=%.3f; ", theta, e.violations,
                          e.spin_aligned_fraction);
        }
        return std::pair{violations == 0, detail + fmt("over %zu trajectories each", kThresholdN)};
    });

    static const DoubleSlit slits(SlitGeometry{}, GaussianPacket{0.0, 3e-6, 0.0, 0.0, kC.electron_mass},
                                  kC.hbar);
    timed(6, [] {
        const auto cs = density_cross_sections(slits, {3.5e-4, 0.35}, 2001);
        const double spacing = two_source_fringe_spacing(slits.geometry(), kC.electron_mass, kC.hbar, 0.35);
        const double near = cs[0].discrepancy();
        const double vis = cs[1].central_visibility(spacing);
        const double measured = cs[1].measured_fringe_spacing(4.0 * spacing);
        const bool pass = near < kNearDiscrepancy && vis > kFarVisibility &&
                          std::fabs(measured / spacing - 1.0) < kTolFringe;
        return std::pair{pass, fmt("discrepancy(0.35 mm)=%.4f visibility(35 cm)=%.4f spacing=%.4e m "
                                   "oracle=%.4e m",
                                   near, vis, measured, spacing)};
    });

    timed(7, [] {
        BundleOptions opts;
        opts.n = kSlitEnsemble;
        opts.seed = 7;
        opts.output_points = 8;
        opts.probe_distances = {};
        const TrajectoryBundle b = run_trajectory_bundle(slits, opts);
        const TabulatedDistribution screen = probe_distribution(slits, slits.geometry().d2);
        const auto ds = equivariance_check(b.screen.impacts, screen, kBins);

        const double t = t_D_total();
        const auto& e = born_runs.at(pi / 3.0);
        std::vector<Trajectory> trs;
        for (const auto& r : e.runs) trs.push_back(r.trajectory);
        const auto sg = equivariance_check(trs, t, magnet().z_marginal(pi / 3.0, t), kBins);
        return std::pair{ds.passed && sg.passed,
                         fmt("double-slit screen chi2=%.2f SG z(t_D) chi2=%.2f threshold=%.2f "
                             "(%d bins, N=%zu each)",
                             ds.chi_square, sg.chi_square, ds.threshold, kBins, kSlitEnsemble)};
    });

    timed(8, [] {
        BundleOptions opts;
        opts.n = 100;
        opts.seed = 1;
        const auto entries = hbar_scaling_study(slits.geometry(), slits.source(), kC, opts, {});
        bool decreasing = true;
        std::string detail;
        for (std::size_t k = 0; k < entries.size(); ++k) {
            detail += fmt("D=%g dev=%.3e; ", entries[k].divisor, entries[k].deviation);
            if (k > 0 && !(entries[k].deviation < entries[k - 1].deviation)) decreasing = false;
        }
        const double ratio = entries.back().deviation / entries.front().deviation;
        return std::pair{decreasing && ratio < kHbarRatio, detail + fmt("last/first=%.2e", ratio)};
    });

    static const EprbExperiment epr(MagnetSpec{}, 1e-4, kC);
    timed(9, [] {
        double sup = 0.0;
        for (int i = -40; i <= 40; ++i) {
            const double zB = 1.5e-5 * i;
            const double ref = epr.marginal_B(zB, 0.0);
            for (int k = 1; k <= 12; ++k) {
                sup = std::max(sup, std::fabs(epr.marginal_B(zB, epr.step_duration() * k / 12.0) - ref));
            }
        }
        double opposite = 0.0;
        EprbOptions opts;
        opts.spin_samples = 40;
        for (std::uint64_t i = 0; i < 50; ++i) {
            const PairRun r = epr.causal_pair_run(sample_pair(99, i, epr.sigma0()), pi / 3.0, opts);
            opposite = std::max(opposite, r.max_opposite_error);
        }
        return std::pair{sup < kTolMarginalB && opposite < kTolOpposite,
                         fmt("sup|rho_B(t)-rho_B(0)|=%.3e max|theta_A+theta_B-pi|=%.3e (50 pairs)",
                             sup, opposite)};
    });

    timed(10, [] {
        const std::vector<double> deltas{0.0, pi / 4.0, pi / 2.0, 3.0 * pi / 4.0, pi};
        EprbOptions opts;
        opts.spin_samples = 8;
        const auto rows = epr.correlation_study(deltas, kPairs, 10, opts);
        std::string detail;
        for (const auto& r : rows) {
            detail += fmt("E(%.4f)=%+.4f ref=%+.4f; ", r.delta, r.E, r.reference);
        }
        return std::pair{rows.front().E == -1.0 && rows.back().E == 1.0, detail};
    });

    timed(11, [] {
        const SternGerlach& sg = magnet();
        const double dt = sg.derived().field_time;
        const double force = -kC.bohr_magneton * sg.magnet().gradient;  // upper component
        const GaussianPacket packet{0.3e-4, 1e-4, 0.0, 0.0, kC.silver_mass};
        const GaussianEvolution closed(packet, kC.hbar, force);
        double worst = 0.0;
        for (double offset : {-1.5, 0.0, 1.0}) {
            const double y = closed.mean(dt) + offset * 1e-4;
            const auto kq = evolve_by_kernel(packet, kC.hbar, force, y, dt);
            worst = std::max(worst, std::abs(kq.value - closed.value(y, dt)) / std::abs(closed.value(y, dt)));
        }
        const double width = closed.width(dt) / packet.sigma - 1.0;
        const double spread = kC.hbar * dt / (2.0 * kC.silver_mass * packet.sigma);
        return std::pair{worst < kTolKernel && width < kTolWidth,
                         fmt("max relative error=%.3e sigma_t/sigma0-1=%.3e hbar dt/(2 m sigma0)=%.3e m",
                             worst, width, spread)};
    });

    timed(12, [] {
        const fs::path root = fs::temp_directory_path() / "pilotwave_acceptance_repro";
        fs::remove_all(root);
        bool same = true;
        std::string detail;
        for (auto exp : {Experiment::SternGerlach, Experiment::Eprb, Experiment::DoubleSlit}) {
            RunConfig c = default_config(exp);
            c.seed = 31;
            if (exp == Experiment::SternGerlach) c.n = 300;
            if (exp == Experiment::Eprb) c.n = 200;
            if (exp == Experiment::DoubleSlit) {
                c.n = 12;
                c.cross_section_distances = {3.5e-3, 0.35};
            }
            std::map<std::string, std::string> first;
            for (const char* w : {"1", "4"}) {
                c.output_dir = root / (experiment_name(exp) + "_" + w);
                ::setenv("PILOTWAVE_WORKERS", w, 1);
                (void)run_experiment(c);
                ::unsetenv("PILOTWAVE_WORKERS");
                auto tree = read_tree(c.output_dir);
                if (first.empty()) {
                    first = std::move(tree);
                } else {
                    const bool eq = first == tree;
                    same = same && eq;
                    detail += fmt("%s: %zu files %s; ", experiment_name(exp).c_str(), tree.size(),
                                  eq ? "identical" : "DIFFER");
                }
            }
        }
        return std::pair{same, detail + "workers 1 vs 4"};
    });

    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
