#include "pilotwave/stern_gerlach.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pilotwave/errors.hpp"
#include "pilotwave/normal.hpp"
#include "pilotwave/parallel.hpp"
#include "pilotwave/quadrature.hpp"
#include "pilotwave/random.hpp"

namespace pilotwave {

namespace {

constexpr double kPi = std::numbers::pi;

// cos(theta/2), sin(theta/2) with exact zeros at the poles.
std::pair<double, double> half_angle_weights(double theta) {
    if (theta == 0.0) {
        return {1.0, 0.0};
    }
    if (theta == kPi) {
        return {0.0, 1.0};
    }
    return {std::cos(0.5 * theta), std::sin(0.5 * theta)};
}

struct Component {
    Complex value;
    Complex dz;
};

// weight * A(w) * e^{i phase}, derivative factor (-w / 2 sigma^2 + i k).
Component gaussian_component(Complex weight, double w, double sigma, double phase, double k) {
    const double norm = std::pow(2.0 * kPi * sigma * sigma, -0.25);
    const Complex value = weight * norm * std::exp(-w * w / (4.0 * sigma * sigma)) *
                          std::polar(1.0, phase);
    return {value, value * Complex(-w / (2.0 * sigma * sigma), k)};
}

std::size_t pow2_at_least(double x) {
    if (!(x > 1.0)) {
        return 1;
    }
    return std::bit_ceil(static_cast<std::size_t>(std::ceil(x)));
}

}  // namespace

void MagnetSpec::validate() const {
    if (!(B0 > 0.0) || !(gradient > 0.0) || !(length > 0.0) || !(drift > 0.0) || !(v0 > 0.0)) {
        throw std::invalid_argument("magnet parameters B0, gradient, length, drift, v0 must be > 0");
    }
}

double decoherence_time(const MagnetSpec& magnet, double sigma0,
                        const PhysicalConstants& constants) {
    const double dt = magnet.field_time();
    const double u = constants.bohr_magneton * magnet.gradient * dt / constants.silver_mass;
    if (!(u > 0.0)) {
        throw NumericError("magnet does not separate the spin components (u <= 0)");
    }
    const double z_delta = 0.5 * u * dt;
    return (3.0 * sigma0 - z_delta) / u;
}

SternGerlach::SternGerlach(MagnetSpec magnet, double sigma0, PhysicalConstants constants)
    : magnet_(magnet), sigma0_(sigma0), constants_(constants) {
    magnet_.validate();
    constants_.validate();
    if (!(sigma0 > 0.0)) {
        throw std::invalid_argument("sigma0 must be positive");
    }
    const double mu = constants_.bohr_magneton;
    const double m = mass();
    const double hb = hbar();
    const double dt = magnet_.field_time();
    derived_.field_time = dt;
    derived_.u = mu * magnet_.gradient * dt / m;
    derived_.z_delta = mu * magnet_.gradient * dt * dt / (2.0 * m);
    derived_.decoherence_time = pilotwave::decoherence_time(magnet_, sigma0_, constants_);
    derived_.larmor_frequency = 2.0 * mu * magnet_.B0 / hb;
    const double p = mu * magnet_.gradient * dt;
    const double cubic = p * p * dt / (6.0 * m * hb);
    derived_.chi_plus = -mu * magnet_.B0 * dt / hb - cubic;
    derived_.chi_minus = mu * magnet_.B0 * dt / hb - cubic;
}

SternGerlach::Layout SternGerlach::layout(const SpinOrientation& initial, double t) const {
    const auto [c, s] = half_angle_weights(initial.theta);
    const double hb = hbar();
    const double m = mass();
    const double dt = magnet_.field_time();
    Layout out;
    out.up.weight = std::polar(c, -0.5 * initial.phi);
    out.down.weight = std::polar(s, 0.5 * initial.phi);
    if (t <= dt) {
        const double p = constants_.bohr_magneton * magnet_.gradient * t;
        const double larmor = constants_.bohr_magneton * magnet_.B0 * t / hb;
        const double cubic = p * p * t / (6.0 * m * hb);
        out.up.center = p * t / (2.0 * m);
        out.up.wavenumber = p / hb;
        out.up.phase = -larmor - cubic;
        out.down.phase = larmor - cubic;
    } else {
        const double s_after = t - dt;
        const double k = m * derived_.u / hb;
        const double kinetic = 0.5 * m * derived_.u * derived_.u * s_after / hb;
        out.up.center = derived_.z_delta + derived_.u * s_after;
        out.up.wavenumber = k;
        out.up.phase = derived_.chi_plus - kinetic;
        out.down.phase = derived_.chi_minus - kinetic;
    }
    out.down.center = -out.up.center;
    out.down.wavenumber = -out.up.wavenumber;
    return out;
}

SpinorJet SternGerlach::evaluate(const Layout& layout, double z) const {
    const Component up = gaussian_component(layout.up.weight, z - layout.up.center, sigma0_,
                                            layout.up.phase + layout.up.wavenumber * z,
                                            layout.up.wavenumber);
    const Component down = gaussian_component(layout.down.weight, z - layout.down.center, sigma0_,
                                              layout.down.phase + layout.down.wavenumber * z,
                                              layout.down.wavenumber);
    return {{up.value, down.value}, {up.dz, down.dz}};
}

SpinorJet SternGerlach::in_field(const SpinOrientation& initial, double z, double t) const {
    if (!(t >= 0.0 && t <= magnet_.field_time())) {
        throw std::domain_error("in-field spinor requested outside [0, dt]");
    }
    return evaluate(layout(initial, t), z);
}

SpinorJet SternGerlach::after_field(const SpinOrientation& initial, double z, double s) const {
    if (!(s >= 0.0)) {
        throw std::domain_error("after-field spinor requested at negative time");
    }
    const double dt = magnet_.field_time();
    // t = dt exactly belongs to the field branch; both branches agree there
    return evaluate(layout(initial, s > 0.0 ? dt + s : dt), z);
}

SpinorJet SternGerlach::spinor(const SpinOrientation& initial, double z, double t) const {
    if (!(t >= 0.0)) {
        throw std::domain_error("spinor requested before the field entrance");
    }
    return evaluate(layout(initial, t), z);
}

double SternGerlach::component_center(double t) const {
    const double dt = magnet_.field_time();
    if (t <= dt) {
        return constants_.bohr_magneton * magnet_.gradient * t * t / (2.0 * mass());
    }
    return derived_.z_delta + derived_.u * (t - dt);
}

double SternGerlach::density_total(double theta0, double z, double t) const {
    const auto [c, s] = half_angle_weights(theta0);
    const double center = component_center(t);
    return c * c * normal_pdf((z - center) / sigma0_) / sigma0_ +
           s * s * normal_pdf((z + center) / sigma0_) / sigma0_;
}

double SternGerlach::density(double theta0, double z, double s) const {
    return density_total(theta0, z, magnet_.field_time() + s);
}

NormalMixture SternGerlach::z_marginal(double theta0, double t) const {
    const auto [c, s] = half_angle_weights(theta0);
    const double center = component_center(t);
    std::vector<NormalMixture::Component> parts;
    if (c > 0.0) {
        parts.push_back({c * c, center, sigma0_});
    }
    if (s > 0.0) {
        parts.push_back({s * s, -center, sigma0_});
    }
    return NormalMixture(std::move(parts));
}

double SternGerlach::split_position(double theta0, double t) const {
    const auto [c, s] = half_angle_weights(theta0);
    if (s == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (c == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    if (s * s > 0.5) {
        // mirror image: swapping the weights reflects the mixture
        return -split_position(kPi - theta0, t);
    }
    return z_marginal(theta0, t).quantile(s * s);
}

double SternGerlach::threshold_position(double theta0) const {
    const auto [c, s] = half_angle_weights(theta0);
    if (s == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (c == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    if (s * s > 0.5) {
        return -sigma0_ * normal_quantile(c * c);
    }
    return sigma0_ * normal_quantile(s * s);
}

double SternGerlach::normalized_overlap(double s) const {
    const double center = component_center(magnet_.field_time() + s);
    const double sig2 = sigma0_ * sigma0_;
    const double norm2 = 1.0 / std::sqrt(2.0 * kPi * sig2);
    auto integrand = [&](double z) {
        const double a = z - center;
        const double b = z + center;
        return norm2 * std::exp(-(a * a + b * b) / (4.0 * sig2));
    };
    QuadratureSpec spec;
    spec.panels = 64;
    spec.abs_tol = 1e-13;
    return integrate_real(integrand, -12.0 * sigma0_, 12.0 * sigma0_, spec);
}

double SternGerlach::overlap_separation_time() const {
    const double target = std::exp(-4.5);
    if (normalized_overlap(0.0) <= target) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = std::max(derived_.decoherence_time, sigma0_ / derived_.u);
    while (normalized_overlap(hi) > target) {
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normalized_overlap(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::array<Complex, 4> SternGerlach::spin_density_matrix(const SpinOrientation& initial,
                                                         double t) const {
    const double center = component_center(t);
    const double reach = 12.0 * sigma0_;
    auto up = [&](double z) { return spinor(initial, z, t).value.plus; };
    auto down = [&](double z) { return spinor(initial, z, t).value.minus; };

    QuadratureSpec diag;
    diag.panels = 64;
    diag.abs_tol = 1e-13;
    const double pp =
        integrate_real([&](double z) { return std::norm(up(z)); }, center - reach, center + reach, diag);
    const double mm = integrate_real([&](double z) { return std::norm(down(z)); }, -center - reach,
                                     -center + reach, diag);

    // The cross product is centred on z = 0 with width sigma0 but oscillates
    // at the relative wavenumber of the two components.  Starting at h k <= pi/4
    // keeps even the coarsest nested trapezoid free of aliasing.
    const Layout lay = layout(initial, t);
    const double cross_reach = 8.0 * sigma0_;
    const double k_rel = std::abs(lay.up.wavenumber - lay.down.wavenumber);
    QuadratureSpec cross;
    cross.panels = static_cast<int>(
        std::max<std::size_t>(64, pow2_at_least(4.0 * 2.0 * cross_reach * k_rel / kPi)));
    cross.abs_tol = 1e-13;
    const double norm2 = 1.0 / std::sqrt(2.0 * kPi * sigma0_ * sigma0_);
    const Complex weight = lay.up.weight * std::conj(lay.down.weight) * norm2;
    const double dphase = lay.up.phase - lay.down.phase;
    const double four_sig2 = 4.0 * sigma0_ * sigma0_;
    // psi+ psi-^* written out: one exponential and one phasor per node
    const Complex pm = integrate_complex(
        [&](double z) {
            const double a = z - lay.up.center;
            const double b = z - lay.down.center;
            return weight * std::exp(-(a * a + b * b) / four_sig2) *
                   std::polar(1.0, dphase + k_rel * z);
        },
        -cross_reach, cross_reach, cross);
    return {Complex(pp, 0.0), pm, std::conj(pm), Complex(mm, 0.0)};
}

VelocityField SternGerlach::velocity_field(const SpinOrientation& initial,
                                           double floor_relative) const {
    const auto [c, s] = half_angle_weights(initial.theta);
    const double peak = std::max(c * c, s * s) / (std::sqrt(2.0 * kPi) * sigma0_);
    DensityFloor floor{floor_relative, [peak](double) { return peak; }};
    return velocity_from_spinor([this, initial](double z, double t) { return spinor(initial, z, t); },
                                mass(), hbar(), std::move(floor), 0.0,
                                std::numeric_limits<double>::infinity());
}

MeasurementOutcome measurement_demo(const SternGerlach& sg, const SpinOrientation& initial,
                                    double z_impact, double s) {
    const SpinorSample v = sg.after_field(initial, z_impact, s).value;
    const double up = std::abs(v.plus);
    const double down = std::abs(v.minus);
    MeasurementOutcome out;
    if (up >= down) {
        out.sign = 1;
        out.suppression = up > 0.0 ? down / up : std::numeric_limits<double>::infinity();
        out.state = {up > 0.0 ? v.plus / up : Complex(1.0), Complex(0.0)};
    } else {
        out.sign = -1;
        out.suppression = up / down;
        out.state = {Complex(0.0), v.minus / down};
    }
    if (!(out.suppression < 1e-4)) {
        throw AmbiguousRegionError("both spinor components are significant at z = " +
                                   std::to_string(z_impact) + " (ratio " +
                                   std::to_string(out.suppression) + ")");
    }
    out.eigenvalue = out.sign * 0.5 * sg.hbar();
    return out;
}

SgEnsemble run_sg_ensemble(const SternGerlach& sg, const SgEnsembleOptions& options) {
    if (options.n < 1) {
        throw std::invalid_argument("ensemble needs n >= 1");
    }
    SgEnsemble out;
    out.screen_time = sg.screen_time();
    out.times = uniform_times(0.0, out.screen_time, std::max<std::size_t>(1, options.spin_samples));
    out.times.push_back(sg.magnet().field_time());  // keeps RK4 off the field edge
    for (const double t : options.extra_times) {
        if (t > 0.0) {
            out.times.push_back(t);
        }
    }
    std::sort(out.times.begin(), out.times.end());
    out.times.erase(std::unique(out.times.begin(), out.times.end(),
                                [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }),
                    out.times.end());
    const auto screen_index = static_cast<std::size_t>(
        std::find_if(out.times.begin(), out.times.end(),
                     [&](double t) { return std::abs(t - out.screen_time) <= 1e-12 * t; }) -
        out.times.begin());

    out.runs.resize(options.n);
    parallel_for(
        options.n,
        [&](std::size_t i) {
            RandomStream rng(options.seed, i);
            SgRun run;
            const double z0 = sg.sigma0() * rng.normal();
            if (options.mode == SgMode::Mixture) {
                run.initial.theta = kPi * rng.uniform();
                run.initial.phi = 2.0 * kPi * rng.uniform();
            } else {
                run.initial = options.pure;
            }
            const VelocityField v = sg.velocity_field(run.initial);
            const SpinOrientation initial = run.initial;
            SpinProbe probe = [&sg, initial](double z, double t) {
                return spin_orientation(sg.spinor(initial, z, t).value);
            };
            run.trajectory = integrate_trajectory(v, z0, 0.0, out.times, options.step, probe, i);
            run.threshold = sg.threshold_position(run.initial.theta);
            run.predicted = z0 >= run.threshold ? 1 : -1;
            const double z_screen = run.trajectory.samples[screen_index + 1].position;
            run.outcome = z_screen >= sg.split_position(run.initial.theta, out.screen_time) ? 1 : -1;
            out.runs[i] = std::move(run);
        },
        options.workers);

    std::size_t up = 0;
    std::size_t aligned = 0;
    for (const auto& run : out.runs) {
        up += run.outcome > 0 ? 1 : 0;
        out.violations += run.outcome != run.predicted ? 1 : 0;
        const double theta = run.trajectory.samples[screen_index + 1].spin->theta;
        if (theta < options.spin_alignment_tol || theta > kPi - options.spin_alignment_tol) {
            ++aligned;
        }
    }
    out.up_fraction = static_cast<double>(up) / static_cast<double>(options.n);
    out.spin_aligned_fraction = static_cast<double>(aligned) / static_cast<double>(options.n);
    return out;
}

}  // namespace pilotwave
