#include "pilotwave/double_slit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <stdexcept>

#include "pilotwave/errors.hpp"
#include "pilotwave/normal.hpp"
#include "pilotwave/parallel.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/quadrature.hpp"
#include "pilotwave/random.hpp"
#include "pilotwave/simd/chirp.hpp"

namespace pilotwave {

namespace {

constexpr int kMaxLevels = 27;

std::size_t next_pow2(double x) {
    if (!(x > 1.0)) {
        return 1;
    }
    if (x > 1e15) {
        throw NonConvergenceError("kernel phase span too large for quadrature", 0, 0.0);
    }
    return std::bit_ceil(static_cast<std::size_t>(std::ceil(x)));
}

}  // namespace

void SlitGeometry::validate() const {
    if (!(half_width > 0.0) || !(separation > 2.0 * half_width) || !(d1 >= 0.0) ||
        !(d2 > 0.0) || !(beam_speed > 0.0)) {
        throw std::invalid_argument(
            "slit geometry needs half_width > 0, separation > 2 half_width, d1 >= 0, d2 > 0, "
            "beam_speed > 0");
    }
}

void DoubleSlitNumerics::validate() const {
    if (!(rel_tol > 0.0) || !(panels_per_radian > 0.0) || min_panels < 2 || min_panels % 2 != 0) {
        throw std::invalid_argument(
            "double-slit numerics need rel_tol > 0, panels_per_radian > 0, even min_panels >= 2");
    }
}

// Slit-plane samples.  Level k holds the 2^k midpoints of the 2^k-panel grid,
// so the nodes of the 2^l-panel grid are the endpoints plus levels 0 .. l-1.
struct DoubleSlit::SlitCache {
    struct Level {
        std::once_flag once;
        std::vector<double> re;
        std::vector<double> im;
    };

    double a = 0.0;
    double b = 0.0;
    Complex fa;
    Complex fb;
    std::optional<GaussianEvolution> incident;
    double t1 = 0.0;
    std::array<Level, kMaxLevels> levels;

    [[nodiscard]] double length() const { return b - a; }

    const Level& level(int k) {
        if (k >= kMaxLevels) {
            throw NonConvergenceError("slit quadrature needs more than 2^" +
                                          std::to_string(kMaxLevels) + " panels",
                                      0, 0.0);
        }
        Level& lv = levels[static_cast<std::size_t>(k)];
        std::call_once(lv.once, [&] {
            const std::size_t count = std::size_t{1} << k;
            const double h = length() / static_cast<double>(count);
            lv.re.resize(count);
            lv.im.resize(count);
            for (std::size_t j = 0; j < count; ++j) {
                const Complex f = incident->value(a + (static_cast<double>(j) + 0.5) * h, t1);
                lv.re[j] = f.real();
                lv.im[j] = f.imag();
            }
        });
        return lv;
    }
};

DoubleSlit::DoubleSlit(SlitGeometry geometry, GaussianPacket source, double hbar,
                       DoubleSlitNumerics numerics, SlitMask mask)
    : geometry_(geometry),
      source_(source),
      hbar_(hbar),
      numerics_(numerics),
      mask_(mask),
      incident_(source, hbar) {
    geometry_.validate();
    numerics_.validate();
    if (!(hbar > 0.0)) {
        throw std::invalid_argument("hbar must be positive");
    }
    const double t1 = geometry_.t1();
    const double mu = incident_.mean(t1);
    const double sigma = incident_.width(t1);
    const double amp = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
    for (const Slit s : {Slit::A, Slit::B}) {
        auto cache = std::make_unique<SlitCache>();
        std::tie(cache->a, cache->b) = slit_interval(s);
        cache->incident.emplace(incident_);
        cache->t1 = t1;
        cache->fa = incident_.value(cache->a, t1);
        cache->fb = incident_.value(cache->b, t1);
        if (slit_open(s)) {
            const double nearest = std::clamp(mu, cache->a, cache->b);
            peak_amplitude_ = std::max(peak_amplitude_, std::abs(incident_.value(nearest, t1)));
            // |psi| is a Gaussian of standard deviation sqrt(2) sigma
            const double wide = std::numbers::sqrt2 * sigma;
            abs_integral_ += amp * std::sqrt(2.0 * std::numbers::pi) * wide *
                             (normal_cdf((cache->b - mu) / wide) - normal_cdf((cache->a - mu) / wide));
            transmitted_ += normal_cdf((cache->b - mu) / sigma) - normal_cdf((cache->a - mu) / sigma);
        }
        slits_[s == Slit::A ? 0 : 1] = std::move(cache);
    }
    if (!(peak_amplitude_ > 0.0)) {
        throw std::invalid_argument("no probability reaches the open slits");
    }
}

DoubleSlit::~DoubleSlit() = default;
DoubleSlit::DoubleSlit(DoubleSlit&&) noexcept = default;
DoubleSlit& DoubleSlit::operator=(DoubleSlit&&) noexcept = default;

std::pair<double, double> DoubleSlit::slit_interval(Slit slit) const {
    const double c = (slit == Slit::A ? 0.5 : -0.5) * geometry_.separation;
    return {c - geometry_.half_width, c + geometry_.half_width};
}

bool DoubleSlit::slit_open(Slit slit) const {
    switch (mask_) {
        case SlitMask::Both:
            return true;
        case SlitMask::OnlyA:
            return slit == Slit::A;
        case SlitMask::OnlyB:
            return slit == Slit::B;
    }
    return false;
}

WaveJet DoubleSlit::incident(double y, double t) const { return incident_.jet(y, t); }

Complex DoubleSlit::slit_wave(double y) const {
    for (const Slit s : {Slit::A, Slit::B}) {
        const auto [a, b] = slit_interval(s);
        if (slit_open(s) && y >= a && y <= b) {
            return incident_.value(y, geometry_.t1());
        }
    }
    return {};
}

double DoubleSlit::slit_plane_sigma() const { return incident_.width(geometry_.t1()); }

double DoubleSlit::slit_velocity(double y) const {
    return scalar_velocity(incident_.jet(y, geometry_.t1()), mass(), hbar_);
}

TruncatedNormal DoubleSlit::slit_plane_distribution() const {
    std::vector<std::pair<double, double>> open;
    for (const Slit s : {Slit::B, Slit::A}) {
        if (slit_open(s)) {
            open.push_back(slit_interval(s));
        }
    }
    return TruncatedNormal(incident_.mean(geometry_.t1()), slit_plane_sigma(), std::move(open));
}

WaveJet DoubleSlit::slit_component(const SlitCache& constant_slit, double y, double t) const {
    auto& slit = const_cast<SlitCache&>(constant_slit);  // lazily filled, once_flag guarded
    const double tau = t - geometry_.t1();
    const double kappa = kernel_chirp_rate(tau, mass(), hbar_);
    const Complex pref = kernel_prefactor(tau, mass(), hbar_);
    const double length = slit.length();
    const double umax = std::max(std::abs(y - slit.a), std::abs(y - slit.b));
    const double span = 2.0 * kappa * umax * length;
    const std::size_t start =
        std::max<std::size_t>(static_cast<std::size_t>(numerics_.min_panels),
                              next_pow2(numerics_.panels_per_radian * span));

    auto chirp_level = [&](int k) {
        const auto& lv = slit.level(k);
        const double h = length / static_cast<double>(std::size_t{1} << k);
        return simd::chirp_sums({lv.re, lv.im}, {slit.a + 0.5 * h, h, y, kappa});
    };
    auto endpoints = [&] {
        const double ua = y - slit.a;
        const double ub = y - slit.b;
        const Complex ea = slit.fa * std::polar(1.0, kappa * ua * ua);
        const Complex eb = slit.fb * std::polar(1.0, kappa * ub * ub);
        return simd::ChirpSums{ea + eb, ua * ea + ub * eb};
    };
    auto interior = [&](std::size_t n) {
        simd::ChirpSums acc;
        const int top = std::countr_zero(n);
        for (int k = 0; k < top; ++k) {
            acc += chirp_level(k);
        }
        return acc;
    };
    auto midpoints = [&](std::size_t n) { return chirp_level(std::countr_zero(n)); };
    const double scale = std::abs(pref) / peak_amplitude_;
    auto change = [&](const simd::ChirpSums& s, const simd::ChirpSums& o) {
        const simd::ChirpSums d = s - o;
        return std::max(std::abs(d.s0), std::abs(d.s1) / umax) * scale;
    };

    QuadratureSpec spec;
    spec.panels = static_cast<int>(start);
    spec.abs_tol = numerics_.rel_tol;
    const auto result = simpson_refine<simd::ChirpSums>(
        slit.a, slit.b, spec, endpoints, [&](int n) { return interior(static_cast<std::size_t>(n)); },
        [&](int n) { return midpoints(static_cast<std::size_t>(n)); }, change);
    return {pref * result.value.s0, pref * Complex(0.0, 2.0 * kappa) * result.value.s1};
}

DoubleSlit::Components DoubleSlit::components(double y, double t) const {
    if (!(t > geometry_.t1())) {
        throw DegenerateTimeError("wave after the slits requested at t <= t1");
    }
    Components out{};
    if (slit_open(Slit::A)) {
        out.a = slit_component(*slits_[0], y, t);
    }
    if (slit_open(Slit::B)) {
        out.b = slit_component(*slits_[1], y, t);
    }
    return out;
}

WaveJet DoubleSlit::jet(double y, double t) const {
    const Components c = components(y, t);
    return {c.a.value + c.b.value, c.a.dz + c.b.dz};
}

double DoubleSlit::density(double y, double t) const { return std::norm(jet(y, t).value); }

double DoubleSlit::peak_density_bound(double t) const {
    const double tau = t - geometry_.t1();
    const double near = 4.0 * peak_amplitude_ * peak_amplitude_;
    if (!(tau > 0.0)) {
        return near;
    }
    const double pref2 = mass() / (2.0 * std::numbers::pi * hbar_ * tau);
    return std::min(near, pref2 * abs_integral_ * abs_integral_);
}

VelocityField DoubleSlit::velocity_field(double floor_relative) const {
    DensityFloor floor{floor_relative, [this](double t) { return peak_density_bound(t); }};
    return velocity_from_scalar_wave([this](double y, double t) { return jet(y, t); }, mass(),
                                     hbar_, std::move(floor), geometry_.t1(),
                                     geometry_.screen_time());
}

TabulatedDistribution tabulate_density(const DoubleSlit& ds, double t, double half_extent,
                                       std::size_t cells) {
    const auto [lo_b, hi_b] = ds.slit_interval(Slit::B);
    const auto [lo_a, hi_a] = ds.slit_interval(Slit::A);
    const double center = 0.5 * (std::min(lo_a, lo_b) + std::max(hi_a, hi_b));
    const double lo = center - half_extent;
    const double hi = center + half_extent;
    const double dx = (hi - lo) / static_cast<double>(cells);
    std::vector<double> nodes(cells + 1);
    std::vector<double> mids(cells);
    parallel_for(2 * cells + 1, [&](std::size_t i) {
        if (i <= cells) {
            nodes[i] = ds.density(lo + static_cast<double>(i) * dx, t);
        } else {
            const std::size_t j = i - cells - 1;
            mids[j] = ds.density(lo + (static_cast<double>(j) + 0.5) * dx, t);
        }
    });
    return TabulatedDistribution(lo, hi, std::move(nodes), std::move(mids),
                                 ds.transmitted_mass());
}

TabulatedDistribution probe_distribution(const DoubleSlit& ds, double distance) {
    const SlitGeometry& g = ds.geometry();
    if (!(distance > 0.0 && distance <= g.d2)) {
        throw std::invalid_argument("probe distance outside (0, d2]");
    }
    const double lambda = 2.0 * std::numbers::pi * ds.hbar() / (ds.mass() * g.beam_speed);
    const double spacing = two_source_fringe_spacing(g, ds.mass(), ds.hbar(), distance);
    const double fresnel = std::sqrt(lambda * distance);
    const double cell = std::min({spacing / 50.0, fresnel / 20.0, g.half_width / 10.0});
    const double half = std::max(100e-6, 40.0 * spacing);
    const auto cells = static_cast<std::size_t>(std::ceil(2.0 * half / cell));
    return tabulate_density(ds, g.time_at_distance(distance), half, cells);
}

double two_source_fringe_spacing(const SlitGeometry& geometry, double mass, double hbar,
                                 double distance) {
    const double lambda = 2.0 * std::numbers::pi * hbar / (mass * geometry.beam_speed);
    return lambda * distance / geometry.separation;
}

double CrossSection::discrepancy() const {
    double diff = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        diff = std::max(diff, std::abs(interference[i] - sum[i]));
        peak = std::max(peak, sum[i]);
    }
    return diff / peak;
}

double CrossSection::central_visibility(double fringe_spacing) const {
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = std::abs(y[i]);
        if (r <= 0.5 * fringe_spacing) {
            hi = std::max(hi, interference[i]);
        }
        if (r >= 0.25 * fringe_spacing && r <= fringe_spacing) {
            lo = std::min(lo, interference[i]);
        }
    }
    return (hi - lo) / (hi + lo);
}

double CrossSection::measured_fringe_spacing(double window) const {
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (std::abs(y[i]) > window) {
            continue;
        }
        const double l = interference[i - 1];
        const double c = interference[i];
        const double r = interference[i + 1];
        if (c > l && c >= r) {
            const double denom = l - 2.0 * c + r;
            const double shift = denom != 0.0 ? 0.5 * (l - r) / denom : 0.0;
            peaks.push_back(y[i] + shift * (y[i + 1] - y[i]));
        }
    }
    if (peaks.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

double cross_section_half_extent(const DoubleSlit& ds, double distance) {
    const double spacing = two_source_fringe_spacing(ds.geometry(), ds.mass(), ds.hbar(), distance);
    return std::max(30e-6, 12.0 * spacing);
}

std::vector<CrossSection> density_cross_sections(const DoubleSlit& ds,
                                                 const std::vector<double>& distances,
                                                 std::size_t points) {
    if (points < 2) {
        throw std::invalid_argument("cross sections need at least 2 points");
    }
    std::vector<CrossSection> out;
    for (const double d : distances) {
        if (!(d > 0.0 && d <= ds.geometry().d2)) {
            throw std::invalid_argument("cross-section distance outside (0, d2]");
        }
        CrossSection cs;
        cs.distance = d;
        cs.time = ds.geometry().time_at_distance(d);
        const double half = cross_section_half_extent(ds, d);
        cs.y.resize(points);
        cs.interference.resize(points);
        cs.sum.resize(points);
        parallel_for(points, [&](std::size_t i) {
            const double y = -half + 2.0 * half * static_cast<double>(i) /
                                         static_cast<double>(points - 1);
            const auto c = ds.components(y, cs.time);
            cs.y[i] = y;
            cs.interference[i] = std::norm(c.a.value + c.b.value);
            cs.sum[i] = std::norm(c.a.value) + std::norm(c.b.value);
        });
        out.push_back(std::move(cs));
    }
    return out;
}

std::vector<double> sample_slit_positions(const DoubleSlit& ds, std::size_t n,
                                          std::uint64_t seed) {
    const TruncatedNormal dist = ds.slit_plane_distribution();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream rng(seed, i);
        out[i] = dist.quantile(rng.uniform_open());
    }
    return out;
}

TrajectoryBundle run_trajectory_bundle(const DoubleSlit& ds, const BundleOptions& options) {
    return run_trajectory_bundle(ds, sample_slit_positions(ds, options.n, options.seed), options);
}

TrajectoryBundle run_trajectory_bundle(const DoubleSlit& ds,
                                       const std::vector<double>& initial_positions,
                                       const BundleOptions& options) {
    const SlitGeometry& g = ds.geometry();
    if (!(options.z_start > 0.0 && options.z_start < g.d2)) {
        throw std::invalid_argument("z_start must lie strictly between the slits and the screen");
    }
    if (options.output_points < 1) {
        throw std::invalid_argument("need at least one output point");
    }
    TrajectoryBundle bundle;
    bundle.t_start = g.time_at_distance(options.z_start);

    std::vector<double> distances;
    const double ratio = g.d2 / options.z_start;
    for (std::size_t k = 1; k <= options.output_points; ++k) {
        distances.push_back(options.z_start *
                            std::pow(ratio, static_cast<double>(k) /
                                                static_cast<double>(options.output_points)));
    }
    distances.back() = g.d2;
    for (const double p : options.probe_distances) {
        if (p > options.z_start && p < g.d2) {
            distances.push_back(p);
        }
    }
    std::sort(distances.begin(), distances.end());
    distances.erase(std::unique(distances.begin(), distances.end(),
                                [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }),
                    distances.end());
    for (const double d : distances) {
        bundle.output_times.push_back(g.time_at_distance(d));
    }

    const TruncatedNormal slit_dist = ds.slit_plane_distribution();
    const double half = 0.5 * g.separation + g.half_width + options.transport_margin;
    const auto cells = static_cast<std::size_t>(std::ceil(2.0 * half / options.transport_cell));
    const TabulatedDistribution start_dist = tabulate_density(ds, bundle.t_start, half, cells);

    const VelocityField v = ds.velocity_field();
    const double t1 = g.t1();
    bundle.trajectories.resize(initial_positions.size());
    parallel_for(
        initial_positions.size(),
        [&](std::size_t i) {
            const double y0 = initial_positions[i];
            const double u = std::clamp(slit_dist.cdf(y0), 1e-15, 1.0 - 1e-15);
            const double ys = start_dist.quantile(u);
            Trajectory traj = integrate_trajectory(v, ys, bundle.t_start, bundle.output_times,
                                                   options.step, {}, i);
            traj.samples.insert(traj.samples.begin(), TrajectorySample{t1, y0, std::nullopt});
            traj.initial_position = y0;
            bundle.trajectories[i] = std::move(traj);
        },
        options.workers);

    bundle.screen.arrival_time = g.screen_time();
    for (const auto& traj : bundle.trajectories) {
        bundle.screen.impacts.push_back(traj.final_position());
    }
    return bundle;
}

double classical_deviation(const DoubleSlit& ds, const TrajectoryBundle& bundle) {
    const double t1 = ds.geometry().t1();
    double worst = 0.0;
    for (const auto& traj : bundle.trajectories) {
        const double y0 = traj.initial_position;
        const double v = ds.slit_velocity(y0);
        for (const auto& s : traj.samples) {
            worst = std::max(worst, std::abs(s.position - (y0 + v * (s.t - t1))));
        }
    }
    return worst;
}

std::vector<HbarStudyEntry> hbar_scaling_study(const SlitGeometry& geometry,
                                               const GaussianPacket& source,
                                               const PhysicalConstants& constants,
                                               const BundleOptions& bundle,
                                               const HbarStudyOptions& study,
                                               const DoubleSlitNumerics& numerics) {
    if (study.divisors.empty()) {
        throw std::invalid_argument("hbar study needs at least one divisor");
    }
    for (const double d : study.divisors) {
        if (!(d >= 1.0)) {
            throw std::invalid_argument("hbar divisors must be >= 1");
        }
    }
    std::vector<double> y0;
    std::vector<HbarStudyEntry> out;
    for (const double d : study.divisors) {
        const PhysicalConstants scaled = constants.with_hbar_divided(d);
        DoubleSlit ds(geometry, source, scaled.hbar, numerics);
        if (y0.empty()) {
            y0 = sample_slit_positions(ds, bundle.n, bundle.seed);
        }
        BundleOptions opts = bundle;
        opts.z_start = std::min(bundle.z_start * d, study.start_cap_fraction * geometry.d2);
        HbarStudyEntry entry;
        entry.divisor = d;
        entry.z_start = opts.z_start;
        entry.bundle = run_trajectory_bundle(ds, y0, opts);
        entry.deviation = classical_deviation(ds, entry.bundle);
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace pilotwave
