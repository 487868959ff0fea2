#include "pilotwave/eprb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pilotwave/parallel.hpp"
#include "pilotwave/random.hpp"

namespace pilotwave {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

double wrap_angle(double phi) {
    double w = std::fmod(phi, 2.0 * kPi);
    if (w < 0.0) {
        w += 2.0 * kPi;
    }
    return w >= 2.0 * kPi ? 0.0 : w;
}

double amplitude(double w, double sigma) {
    return std::pow(2.0 * kPi * sigma * sigma, -0.25) * std::exp(-w * w / (4.0 * sigma * sigma));
}

SpinorSample spinor_from(const SpinOrientation& o, double scale) {
    return {std::polar(scale * std::cos(0.5 * o.theta), -0.5 * o.phi),
            std::polar(scale * std::sin(0.5 * o.theta), 0.5 * o.phi)};
}

double direction_error(const SpinorSample& s) {
    const auto d = spin_direction(s);
    return std::abs(std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) - 1.0);
}

// Neumaier compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double t = sum + x;
        carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    [[nodiscard]] double value() const { return sum + carry; }
};

std::vector<double> step_times(const SternGerlach& sg, double end, std::size_t samples) {
    std::vector<double> times = uniform_times(0.0, end, std::max<std::size_t>(1, samples));
    times.push_back(sg.magnet().field_time());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }),
                times.end());
    return times;
}

}  // namespace

PairState PairState::opposite(double x0A, double z0A, double x0B, double z0B,
                              SpinOrientation spin_A) {
    if (!(spin_A.theta >= 0.0 && spin_A.theta <= kPi)) {
        throw std::domain_error("theta_A must lie in [0, pi]");
    }
    PairState p;
    p.x0A = x0A;
    p.z0A = z0A;
    p.x0B = x0B;
    p.z0B = z0B;
    p.spin_A = {spin_A.theta, wrap_angle(spin_A.phi)};
    p.spin_B = {kPi - spin_A.theta, wrap_angle(spin_A.phi - kPi)};
    return p;
}

PairState sample_pair(std::uint64_t seed, std::uint64_t pair_id, double sigma0) {
    RandomStream positions(seed, 2 * pair_id);
    RandomStream spins(seed, 2 * pair_id + 1);
    const double x0A = sigma0 * positions.normal();
    const double z0A = sigma0 * positions.normal();
    const double x0B = sigma0 * positions.normal();
    const double z0B = sigma0 * positions.normal();
    const double theta = kPi * spins.uniform();
    const double phi = 2.0 * kPi * spins.uniform();
    return PairState::opposite(x0A, z0A, x0B, z0B, {theta, phi});
}

SingletProjection singlet_from_product(double theta_A, double phi_A) {
    const PairState pair = PairState::opposite(0.0, 0.0, 0.0, 0.0, {theta_A, phi_A});
    const SpinorSample a = spinor_from(pair.spin_A, 1.0);
    const SpinorSample b = spinor_from(pair.spin_B, 1.0);
    const std::array<Complex, 2> va{a.plus, a.minus};
    const std::array<Complex, 2> vb{b.plus, b.minus};
    SingletProjection out;
    double norm = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.state[2 * i + j] = va[i] * vb[j] - vb[i] * va[j];
            norm += std::norm(out.state[2 * i + j]);
        }
    }
    if (!(norm > 0.0)) {
        throw std::domain_error("antisymmetrised product vanishes");
    }
    for (auto& c : out.state) {
        c /= std::sqrt(norm);
    }
    out.coefficient = (out.state[1] - out.state[2]) * kInvSqrt2;
    out.fidelity = std::norm(out.coefficient);
    return out;
}

EprbExperiment::EprbExperiment(MagnetSpec magnet, double sigma0, PhysicalConstants constants)
    : sg_(magnet, sigma0, constants) {}

double EprbExperiment::step_duration() const {
    return sg_.magnet().field_time() + sg_.decoherence_time();
}

TwoSpin EprbExperiment::step1_wavefunction(double xA, double zA, double xB, double zB,
                                           double t) const {
    const double sigma = sg_.sigma0();
    const Complex up = sg_.spinor({0.0, 0.0}, zA, t).value.plus;
    const Complex down = sg_.spinor({kPi, 0.0}, zA, t).value.minus;
    const double spectator = amplitude(xA, sigma) * amplitude(xB, sigma) * amplitude(zB, sigma);
    const double scale = spectator * kInvSqrt2;
    return {Complex(0.0), scale * up, -scale * down, Complex(0.0)};
}

double EprbExperiment::marginal_A(double zA, double t) const {
    const double sigma = sg_.sigma0();
    const double c = sg_.component_center(t);
    const double a = amplitude(zA - c, sigma);
    const double b = amplitude(zA + c, sigma);
    return 0.5 * (a * a + b * b);
}

double EprbExperiment::joint_density(double zA, double zB, double t) const {
    const double g = amplitude(zB, sg_.sigma0());
    return marginal_A(zA, t) * g * g;
}

double EprbExperiment::marginal_B(double zB, double t) const {
    // Trapezoid with h = sigma / 8 over +-14 sigma around each packet: the
    // aliasing and truncation errors are far below double rounding.
    const double sigma = sg_.sigma0();
    const double h = sigma / 8.0;
    const int half = 112;
    const double c = sg_.component_center(t);
    CompensatedSum acc;
    for (int j = -half; j <= half; ++j) {
        const double offset = h * j;
        const TwoSpin at_up = step1_wavefunction(0.0, c + offset, 0.0, zB, t);
        const TwoSpin at_down = step1_wavefunction(0.0, -c + offset, 0.0, zB, t);
        acc.add(h * std::norm(at_up[1]));
        acc.add(h * std::norm(at_down[2]));
    }
    // x_A and x_B are integrated out: divide by their densities at zero
    const double x0 = amplitude(0.0, sigma);
    return acc.value() / (x0 * x0 * x0 * x0);
}

SpinorSample EprbExperiment::conditional_B_spin(int outcome_A) {
    if (outcome_A == 1) {
        return {Complex(0.0), Complex(1.0)};
    }
    if (outcome_A == -1) {
        return {Complex(1.0), Complex(0.0)};
    }
    throw std::invalid_argument("outcome must be +1 or -1");
}

std::array<Complex, 4> EprbExperiment::reduced_B_spin(double zA, double zB, double t) const {
    const TwoSpin psi = step1_wavefunction(0.0, zA, 0.0, zB, t);
    std::array<Complex, 4> rho{};
    double trace = 0.0;
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            Complex acc(0.0);
            for (int a = 0; a < 2; ++a) {
                acc += psi[2 * a + j] * std::conj(psi[2 * a + k]);
            }
            rho[2 * j + k] = acc;
        }
        trace += rho[3 * j].real();
    }
    if (!(trace > 0.0)) {
        throw std::domain_error("two-particle amplitude vanishes at this configuration");
    }
    for (auto& r : rho) {
        r /= trace;
    }
    return rho;
}

EprbExperiment::StepOne EprbExperiment::run_step_one(const PairState& pair,
                                                     const EprbOptions& options) const {
    StepOne out;
    const double end = step_duration();
    const std::vector<double> times = step_times(sg_, end, options.spin_samples);
    const SpinOrientation initial = pair.spin_A;
    out.trajectory =
        integrate_trajectory(sg_.velocity_field(initial), pair.z0A, 0.0, times, options.step);

    // B stays at its initial position; only the modulus f(r_B) enters its spinor
    const double fB = amplitude(pair.x0B, sg_.sigma0()) * amplitude(pair.z0B, sg_.sigma0());
    for (const auto& sample : out.trajectory.samples) {
        const SpinorSample psiA = sg_.spinor(initial, sample.position, sample.t).value;
        SpinHistorySample h;
        h.t = sample.t;
        h.z_A = sample.position;
        h.A = spin_orientation(psiA);
        const SpinOrientation target{kPi - h.A.theta, wrap_angle(h.A.phi - kPi)};
        const SpinorSample psiB = spinor_from(target, fB);
        h.B = spin_orientation(psiB);
        out.max_opposite_error =
            std::max(out.max_opposite_error, std::abs(h.B.theta + h.A.theta - kPi));
        out.max_module_error =
            std::max({out.max_module_error, direction_error(psiA), direction_error(psiB)});
        out.history.push_back(h);
    }

    out.outcome_A = pair.z0A >= sg_.threshold_position(initial.theta) ? 1 : -1;
    const int seen = out.trajectory.final_position() >= sg_.split_position(initial.theta, end) ? 1 : -1;
    out.mismatch = seen != out.outcome_A ? 1 : 0;
    return out;
}

void EprbExperiment::run_step_two(const PairState& pair, double delta, const EprbOptions& options,
                                  PairRun& run) const {
    // B's spin is now along -z (A up) or +z (A down); the second magnet measures along
    // e' = (sin d, 0, cos d) with x' = (cos d, 0, -sin d).
    const double nz = run.record.outcome_A > 0 ? -1.0 : 1.0;
    const double sd = std::sin(delta);
    const double cd = std::cos(delta);
    const double along = std::clamp(nz * cd, -1.0, 1.0);
    run.theta_B_prime = std::acos(along);
    const double phi_prime = wrap_angle(std::atan2(0.0, -nz * sd));
    run.z0B_prime = pair.x0B * sd + pair.z0B * cd;

    const SpinOrientation initial{run.theta_B_prime, phi_prime};
    const double end = step_duration();
    const std::vector<double> times = step_times(sg_, end, options.spin_samples);
    run.trajectory_B =
        integrate_trajectory(sg_.velocity_field(initial), run.z0B_prime, 0.0, times, options.step);
    run.record.outcome_B = run.z0B_prime >= sg_.threshold_position(initial.theta) ? 1 : -1;
    const int seen =
        run.trajectory_B.final_position() >= sg_.split_position(initial.theta, end) ? 1 : -1;
    run.trajectory_mismatches += seen != run.record.outcome_B ? 1 : 0;
}

PairRun EprbExperiment::causal_pair_run(const PairState& pair, double delta,
                                        const EprbOptions& options) const {
    StepOne one = run_step_one(pair, options);
    PairRun run;
    run.record.outcome_A = one.outcome_A;
    run.record.delta = delta;
    run.record.t0 = 0.0;
    run.record.field_time = sg_.magnet().field_time();
    run.record.decoherence_time = sg_.decoherence_time();
    run.trajectory_A = std::move(one.trajectory);
    run.history = std::move(one.history);
    run.max_opposite_error = one.max_opposite_error;
    run.max_module_error = one.max_module_error;
    run.trajectory_mismatches = one.mismatch;
    run_step_two(pair, delta, options, run);
    return run;
}

std::vector<CorrelationRow> EprbExperiment::correlation_study(
    const std::vector<double>& deltas, std::size_t n, std::uint64_t seed,
    const EprbOptions& options, std::vector<std::vector<PairRun>>* runs) const {
    if (n < 1) {
        throw std::invalid_argument("correlation study needs n >= 1");
    }
    std::vector<PairState> pairs(n);
    std::vector<StepOne> first(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            pairs[i] = sample_pair(seed, i, sg_.sigma0());
            first[i] = run_step_one(pairs[i], options);
        },
        options.workers);

    std::vector<CorrelationRow> rows;
    if (runs != nullptr) {
        runs->assign(deltas.size(), {});
    }
    for (std::size_t d = 0; d < deltas.size(); ++d) {
        std::vector<PairRun> batch(n);
        parallel_for(
            n,
            [&](std::size_t i) {
                PairRun& run = batch[i];
                run.record.outcome_A = first[i].outcome_A;
                run.record.delta = deltas[d];
                run.record.field_time = sg_.magnet().field_time();
                run.record.decoherence_time = sg_.decoherence_time();
                run.max_opposite_error = first[i].max_opposite_error;
                run.max_module_error = first[i].max_module_error;
                run.trajectory_mismatches = first[i].mismatch;
                if (runs != nullptr) {
                    run.trajectory_A = first[i].trajectory;
                    run.history = first[i].history;
                }
                run_step_two(pairs[i], deltas[d], options, run);
                if (runs == nullptr) {
                    run.trajectory_B = {};
                }
            },
            options.workers);

        std::size_t pp = 0, pm = 0, mp = 0, mm = 0;
        for (const auto& run : batch) {
            const bool a = run.record.outcome_A > 0;
            const bool b = run.record.outcome_B > 0;
            (a ? (b ? pp : pm) : (b ? mp : mm)) += 1;
        }
        CorrelationRow row;
        const double total = static_cast<double>(n);
        row.delta = deltas[d];
        row.n = n;
        row.p_pp = static_cast<double>(pp) / total;
        row.p_pm = static_cast<double>(pm) / total;
        row.p_mp = static_cast<double>(mp) / total;
        row.p_mm = static_cast<double>(mm) / total;
        row.E = row.p_pp + row.p_mm - row.p_pm - row.p_mp;
        row.reference = -std::cos(deltas[d]);
        row.std_error = std::sqrt(std::max(0.0, 1.0 - row.E * row.E) / total);
        rows.push_back(row);
        if (runs != nullptr) {
            (*runs)[d] = std::move(batch);
        }
    }
    return rows;
}

}  // namespace pilotwave
