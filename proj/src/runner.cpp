#include "pilotwave/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "pilotwave/csv.hpp"
#include "pilotwave/double_slit.hpp"
#include "pilotwave/eprb.hpp"
#include "pilotwave/equivariance.hpp"
#include "pilotwave/gaussian.hpp"
#include "pilotwave/stern_gerlach.hpp"

namespace pilotwave {

namespace {

namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

class Summary {
public:
    void add(const std::string& key, const CsvCell& value) {
        rows_.emplace_back(key, format_cell(value));
    }
    void add(const std::string& key, bool flag) { add(key, CsvCell(std::int64_t{flag ? 1 : 0})); }
    void add(const std::string& key, std::size_t count) {
        add(key, CsvCell(static_cast<std::int64_t>(count)));
    }
    void add(const std::string& key, int count) { add(key, CsvCell(std::int64_t{count})); }
    void add(const std::string& key, double v) { add(key, CsvCell(v)); }
    void add(const std::string& key, const char* text) { add(key, CsvCell(std::string(text))); }

    void equivariance(const std::string& prefix, const EquivarianceReport& r) {
        add(prefix + "_bins", r.bins);
        add(prefix + "_chi_square", r.chi_square);
        add(prefix + "_threshold", r.threshold);
        add(prefix + "_passed", r.passed);
    }

    [[nodiscard]] std::vector<std::pair<std::string, std::string>> rows() const { return rows_; }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

// Distances print as %g metres, e.g. cross_section_0.00035.csv.
std::string distance_tag(double d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", d);
    return buf;
}

std::string angle_tag(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", a);
    return buf;
}

struct Output {
    fs::path dir;
    std::vector<fs::path> files;

    CsvWriter open(const std::string& name, std::vector<std::string> header) {
        files.push_back(dir / name);
        return CsvWriter(dir / name, std::move(header));
    }
};

bool ordering_preserved(const std::vector<Trajectory>& trajectories) {
    std::vector<std::size_t> order(trajectories.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return trajectories[a].initial_position < trajectories[b].initial_position;
    });
    if (order.empty()) {
        return true;
    }
    const std::size_t samples = trajectories[order[0]].samples.size();
    for (std::size_t k = 0; k < samples; ++k) {
        for (std::size_t j = 1; j < order.size(); ++j) {
            if (!(trajectories[order[j - 1]].samples[k].position <
                  trajectories[order[j]].samples[k].position)) {
                return false;
            }
        }
    }
    return true;
}

void write_bundle(CsvWriter& csv, const TrajectoryBundle& bundle, const CsvCell* divisor) {
    for (std::size_t i = 0; i < bundle.trajectories.size(); ++i) {
        for (const auto& s : bundle.trajectories[i].samples) {
            std::vector<CsvCell> row;
            if (divisor != nullptr) {
                row.push_back(*divisor);
            }
            row.push_back(static_cast<std::int64_t>(i));
            row.push_back(s.t);
            row.push_back(s.position);
            csv.row(row);
        }
    }
}

void run_double_slit(const RunConfig& config, Output& out, Summary& summary) {
    const PhysicalConstants consts = config.constants.with_hbar_divided(config.hbar_divisor);
    const GaussianPacket source{0.0, config.source_sigma, 0.0, 0.0, consts.electron_mass};
    const DoubleSlit ds(config.slits, source, consts.hbar, config.slit_numerics);
    const SlitGeometry& g = config.slits;

    summary.add("hbar_divisor", config.hbar_divisor);
    summary.add("t1", g.t1());
    summary.add("screen_time", g.screen_time());
    summary.add("slit_plane_sigma", ds.slit_plane_sigma());
    summary.add("transmitted_mass", ds.transmitted_mass());

    const auto sections =
        density_cross_sections(ds, config.cross_section_distances, config.cross_section_points);
    for (const auto& cs : sections) {
        const std::string tag = distance_tag(cs.distance);
        auto csv = out.open("cross_section_" + tag + ".csv", {"y", "interference", "sum"});
        for (std::size_t i = 0; i < cs.y.size(); ++i) {
            csv.row({cs.y[i], cs.interference[i], cs.sum[i]});
        }
        csv.close();
        const double spacing = two_source_fringe_spacing(g, ds.mass(), ds.hbar(), cs.distance);
        summary.add("discrepancy_" + tag, cs.discrepancy());
        summary.add("visibility_" + tag, cs.central_visibility(spacing));
        summary.add("fringe_spacing_expected_" + tag, spacing);
        summary.add("fringe_spacing_measured_" + tag, cs.measured_fringe_spacing(4.0 * spacing));
    }

    BundleOptions opts;
    opts.n = config.trajectories();
    opts.seed = config.seed;
    opts.z_start = std::min(config.z_start * config.hbar_divisor, 0.5 * g.d2);
    opts.output_points = config.output_points;
    opts.step.pos_tol = config.slit_pos_tol;
    const TrajectoryBundle bundle = run_trajectory_bundle(ds, opts);
    summary.add("n", opts.n);
    summary.add("seed", CsvCell(static_cast<std::int64_t>(config.seed)));
    summary.add("z_start", opts.z_start);
    {
        auto csv = out.open("trajectories.csv", {"traj_id", "t", "y"});
        write_bundle(csv, bundle, nullptr);
        csv.close();
        auto impacts = out.open("impacts.csv", {"y"});
        for (const double y : bundle.screen.impacts) {
            impacts.row({y});
        }
        impacts.close();
    }
    summary.add("no_crossing", ordering_preserved(bundle.trajectories));
    summary.add("classical_deviation", classical_deviation(ds, bundle));

    const auto bins = static_cast<int>(config.equivariance_bins);
    if (opts.n >= 5 * config.equivariance_bins) {
        for (const double d : {0.01, 0.1, g.d2}) {
            if (d <= opts.z_start || d > g.d2) {
                continue;
            }
            const TabulatedDistribution dist = probe_distribution(ds, d);
            summary.equivariance("equivariance_" + distance_tag(d),
                                 equivariance_check(bundle.trajectories, g.time_at_distance(d),
                                                    dist, bins));
        }
    } else {
        summary.add("equivariance", "skipped: n < 5 bins");
    }

    if (config.hbar_study) {
        HbarStudyOptions study;
        study.divisors = config.hbar_divisors;
        BundleOptions base = opts;
        base.z_start = config.z_start;
        const auto entries = hbar_scaling_study(g, source, config.constants, base, study,
                                                config.slit_numerics);
        auto csv = out.open("hbar_study.csv", {"divisor", "traj_id", "t", "y"});
        bool decreasing = true;
        for (std::size_t k = 0; k < entries.size(); ++k) {
            const CsvCell divisor(entries[k].divisor);
            write_bundle(csv, entries[k].bundle, &divisor);
            summary.add("hbar_deviation_" + distance_tag(entries[k].divisor), entries[k].deviation);
            if (k > 0 && !(entries[k].deviation < entries[k - 1].deviation)) {
                decreasing = false;
            }
        }
        csv.close();
        summary.add("hbar_deviation_strictly_decreasing", decreasing);
        summary.add("hbar_deviation_last_over_first",
                    entries.back().deviation / entries.front().deviation);
    }
}

void run_stern_gerlach(const RunConfig& config, Output& out, Summary& summary) {
    const SternGerlach sg(config.magnet, config.sigma0, config.constants);
    const auto& d = sg.derived();
    const double dt = d.field_time;
    const double tD = d.decoherence_time;
    const double t_sep = dt + tD;

    summary.add("z_delta", d.z_delta);
    summary.add("u", d.u);
    summary.add("t_D", tD);
    summary.add("t_D_overlap", sg.overlap_separation_time());
    summary.add("field_time", dt);
    summary.add("screen_time", sg.screen_time());
    summary.add("larmor_frequency", d.larmor_frequency);
    const GaussianPacket probe{0.0, config.sigma0, 0.0, 0.0, config.constants.silver_mass};
    summary.add("width_ratio_minus_one_at_field_exit",
                GaussianEvolution(probe, config.constants.hbar).width(dt) / config.sigma0 - 1.0);

    SgEnsembleOptions opts;
    opts.mode = config.mode;
    opts.pure = {config.theta0, config.phi0};
    opts.n = config.trajectories();
    opts.seed = config.seed;
    opts.spin_samples = config.spin_samples;
    opts.extra_times = {t_sep};
    opts.step.pos_tol = config.sg_pos_tol;
    const SgEnsemble ens = run_sg_ensemble(sg, opts);

    const bool pure = config.mode == SgMode::Pure;
    const double c = std::cos(0.5 * config.theta0);
    const double p_up = pure ? c * c : 0.5;
    summary.add("mode", pure ? "pure" : "mixture");
    summary.add("theta0", config.theta0);
    summary.add("phi0", config.phi0);
    summary.add("n", opts.n);
    summary.add("seed", CsvCell(static_cast<std::int64_t>(config.seed)));
    summary.add("up_fraction", ens.up_fraction);
    summary.add("up_fraction_expected", p_up);
    summary.add("up_fraction_bound",
                3.0 * std::sqrt(p_up * (1.0 - p_up) / static_cast<double>(opts.n)));
    summary.add("threshold_violations", ens.violations);
    summary.add("spin_aligned_fraction", ens.spin_aligned_fraction);

    {
        auto csv = out.open("sg_trajectories.csv", {"traj_id", "t", "z", "theta", "phi"});
        for (std::size_t i = 0; i < ens.runs.size(); ++i) {
            for (const auto& s : ens.runs[i].trajectory.samples) {
                const SpinOrientation o = s.spin.value_or(ens.runs[i].initial);
                csv.row({static_cast<std::int64_t>(i), s.t, s.position, o.theta, o.phi});
            }
        }
        csv.close();
        auto impacts = out.open("sg_impacts.csv", {"z", "outcome"});
        for (const auto& run : ens.runs) {
            impacts.row({run.trajectory.final_position(), static_cast<std::int64_t>(run.outcome)});
        }
        impacts.close();
    }

    // equivariance of the z-marginal when the packets have separated
    const double weight_theta = pure ? config.theta0 : 0.5 * kPi;
    if (opts.n >= 5 * config.equivariance_bins) {
        std::vector<Trajectory> trajectories;
        trajectories.reserve(ens.runs.size());
        for (const auto& r : ens.runs) {
            trajectories.push_back(r.trajectory);
        }
        summary.equivariance("equivariance_t_D",
                             equivariance_check(trajectories, t_sep,
                                                sg.z_marginal(weight_theta, t_sep),
                                                static_cast<int>(config.equivariance_bins)));
    } else {
        summary.add("equivariance", "skipped: n < 5 bins");
    }

    {
        const std::vector<double> times{0.0, dt, t_sep, sg.screen_time()};
        auto csv = out.open("sg_density.csv", {"z", "t", "rho"});
        for (const double t : times) {
            const double reach = sg.component_center(t) + 6.0 * config.sigma0;
            for (std::size_t k = 0; k < config.density_points; ++k) {
                const double z = -reach + 2.0 * reach * static_cast<double>(k) /
                                              static_cast<double>(config.density_points - 1);
                csv.row({z, t, sg.density_total(weight_theta, z, t)});
            }
        }
        csv.close();
    }
    {
        const SpinOrientation initial{config.theta0, config.phi0};
        const std::vector<double> times{0.0,          0.5 * dt,           dt,
                                        dt + 0.25 * tD, dt + 0.5 * tD,    t_sep,
                                        dt + 2.0 * tD};
        auto csv = out.open("sg_density_matrix.csv",
                            {"t", "rho_pp_re", "rho_pp_im", "rho_pm_re", "rho_pm_im", "rho_mp_re",
                             "rho_mp_im", "rho_mm_re", "rho_mm_im"});
        for (const double t : times) {
            const auto rho = sg.spin_density_matrix(initial, t);
            csv.row({t, rho[0].real(), rho[0].imag(), rho[1].real(), rho[1].imag(), rho[2].real(),
                     rho[2].imag(), rho[3].real(), rho[3].imag()});
            if (t == t_sep) {
                summary.add("rho_pp_at_t_D", rho[0].real());
                summary.add("rho_mm_at_t_D", rho[3].real());
                summary.add("rho_pm_abs_at_t_D", std::abs(rho[1]));
            }
        }
        csv.close();
    }
    {
        auto csv = out.open("sg_summary.csv", {"z_delta", "u", "t_D", "up_fraction"});
        csv.row({d.z_delta, d.u, tD, ens.up_fraction});
        csv.close();
    }
}

void run_eprb(const RunConfig& config, Output& out, Summary& summary) {
    const EprbExperiment ex(config.magnet, config.sigma0, config.constants);
    const std::size_t n = config.trajectories();
    EprbOptions opts;
    opts.spin_samples = config.spin_samples;
    opts.step.pos_tol = config.sg_pos_tol;
    std::vector<std::vector<PairRun>> runs;
    const auto rows = ex.correlation_study(config.deltas, n, config.seed, opts, &runs);

    summary.add("n", n);
    summary.add("seed", CsvCell(static_cast<std::int64_t>(config.seed)));
    summary.add("step_duration", ex.step_duration());
    {
        auto csv = out.open("eprb_correlations.csv", {"delta", "E", "P++", "P+-", "P-+", "P--", "n",
                                                      "E_reference", "std_error"});
        for (const auto& r : rows) {
            csv.row({r.delta, r.E, r.p_pp, r.p_pm, r.p_mp, r.p_mm, static_cast<std::int64_t>(r.n),
                     r.reference, r.std_error});
            const std::string tag = angle_tag(r.delta);
            summary.add("E_" + tag, r.E);
            summary.add("E_reference_" + tag, r.reference);
            summary.add("E_std_error_" + tag, r.std_error);
        }
        csv.close();
    }

    double opposite = 0.0;
    double module = 0.0;
    std::size_t mismatches = 0;
    std::size_t a_up = 0;
    {
        auto csv = out.open("eprb_pairs.csv", {"pair_id", "theta0A", "phi0A", "z0A", "z0B",
                                               "outcome_A", "outcome_B", "delta"});
        for (std::size_t d = 0; d < runs.size(); ++d) {
            for (std::size_t i = 0; i < runs[d].size(); ++i) {
                const PairState pair = sample_pair(config.seed, i, config.sigma0);
                const PairRun& run = runs[d][i];
                csv.row({static_cast<std::int64_t>(i), pair.spin_A.theta, pair.spin_A.phi, pair.z0A,
                         pair.z0B, static_cast<std::int64_t>(run.record.outcome_A),
                         static_cast<std::int64_t>(run.record.outcome_B), config.deltas[d]});
                opposite = std::max(opposite, run.max_opposite_error);
                module = std::max(module, run.max_module_error);
                mismatches += static_cast<std::size_t>(run.trajectory_mismatches);
                if (d == 0 && run.record.outcome_A > 0) {
                    ++a_up;
                }
            }
        }
        csv.close();
    }
    if (!runs.empty()) {
        auto csv = out.open("eprb_spin_history.csv", {"pair_id", "t", "thetaA", "thetaB"});
        for (std::size_t i = 0; i < runs[0].size(); ++i) {
            for (const auto& h : runs[0][i].history) {
                csv.row({static_cast<std::int64_t>(i), h.t, h.A.theta, h.B.theta});
            }
        }
        csv.close();
    }
    summary.add("A_up_fraction", static_cast<double>(a_up) / static_cast<double>(n));
    summary.add("max_opposite_spin_error", opposite);
    summary.add("max_spin_module_error", module);
    summary.add("trajectory_threshold_mismatches", mismatches);

    // B's position marginal over step 1 against its initial value
    double sup = 0.0;
    const double sigma = config.sigma0;
    const std::vector<double> times = uniform_times(0.0, ex.step_duration(), config.spin_samples);
    for (int k = -60; k <= 60; ++k) {
        const double zB = 0.1 * sigma * k;
        const double initial = ex.marginal_B(zB, 0.0);
        for (const double t : times) {
            sup = std::max(sup, std::abs(ex.marginal_B(zB, t) - initial));
        }
    }
    summary.add("B_marginal_sup_change", sup);
}

}  // namespace

const std::string& RunResult::value(const std::string& key) const {
    for (const auto& [k, v] : summary) {
        if (k == key) {
            return v;
        }
    }
    throw std::out_of_range("summary has no key " + key);
}

RunResult run_experiment(const RunConfig& config) {
    config.validate();
    fs::create_directories(config.output_dir);
    Output out{config.output_dir, {}};
    Summary summary;
    summary.add("experiment", CsvCell(experiment_name(config.experiment)));
    switch (config.experiment) {
        case Experiment::DoubleSlit:
            run_double_slit(config, out, summary);
            break;
        case Experiment::SternGerlach:
            run_stern_gerlach(config, out, summary);
            break;
        case Experiment::Eprb:
            run_eprb(config, out, summary);
            break;
    }
    RunResult result;
    result.summary = summary.rows();
    auto csv = out.open("summary.csv", {"key", "value"});
    for (const auto& [k, v] : result.summary) {
        csv.row({k, v});
    }
    csv.close();
    result.files = out.files;
    return result;
}

}  // namespace pilotwave
