#include "pilotwave/guidance.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "pilotwave/errors.hpp"

namespace pilotwave {

namespace {

[[noreturn]] void floor_error(double rho, double floor, double z, double t) {
    std::ostringstream msg;
    msg << "density " << rho << " below floor " << floor << " at z = " << z << ", t = " << t;
    throw DensityFloorError(msg.str(), z, t);
}

}  // namespace

VelocityField::VelocityField(Evaluator evaluate, double t_begin, double t_end)
    : evaluate_(std::move(evaluate)), t_begin_(t_begin), t_end_(t_end) {
    if (!evaluate_) {
        throw std::invalid_argument("VelocityField needs an evaluator");
    }
}

double scalar_velocity(const WaveJet& jet, double mass, double hbar) {
    return hbar * std::imag(std::conj(jet.value) * jet.dz) / (mass * std::norm(jet.value));
}

double spinor_velocity(const SpinorJet& jet, double mass, double hbar) {
    const double current = std::imag(std::conj(jet.value.plus) * jet.dz.plus) +
                           std::imag(std::conj(jet.value.minus) * jet.dz.minus);
    return hbar * current / (mass * jet.value.density());
}

VelocityField velocity_from_scalar_wave(ScalarWaveField psi, double mass, double hbar,
                                        DensityFloor floor, double t_begin, double t_end) {
    auto eval = [psi = std::move(psi), mass, hbar, floor = std::move(floor)](double z, double t) {
        const WaveJet jet = psi(z, t);
        const double rho = std::norm(jet.value);
        const double limit = floor.at(t);
        if (!(rho > limit)) {
            floor_error(rho, limit, z, t);
        }
        return scalar_velocity(jet, mass, hbar);
    };
    return VelocityField(std::move(eval), t_begin, t_end);
}

VelocityField velocity_from_spinor(SpinorWaveField spinor, double mass, double hbar,
                                   DensityFloor floor, double t_begin, double t_end) {
    auto eval = [spinor = std::move(spinor), mass, hbar, floor = std::move(floor)](double z,
                                                                                  double t) {
        const SpinorJet jet = spinor(z, t);
        const double rho = jet.value.density();
        const double limit = floor.at(t);
        if (!(rho > limit)) {
            floor_error(rho, limit, z, t);
        }
        return spinor_velocity(jet, mass, hbar);
    };
    return VelocityField(std::move(eval), t_begin, t_end);
}

SpinOrientation spin_orientation(const SpinorSample& s) {
    const double up = std::abs(s.plus);
    const double down = std::abs(s.minus);
    if (up == 0.0 && down == 0.0) {
        throw std::domain_error("spin orientation of a null spinor");
    }
    SpinOrientation out;
    out.theta = 2.0 * std::atan2(down, up);
    if (up > 0.0 && down > 0.0) {
        double phi = std::arg(s.minus) - std::arg(s.plus);
        constexpr double two_pi = 2.0 * std::numbers::pi;
        phi = std::fmod(phi, two_pi);
        if (phi < 0.0) {
            phi += two_pi;
        }
        out.phi = phi >= two_pi ? 0.0 : phi;
    }
    return out;
}

std::array<double, 3> spin_direction(const SpinorSample& s) {
    const double rho = s.density();
    if (!(rho > 0.0)) {
        throw std::domain_error("spin direction of a null spinor");
    }
    const Complex cross = std::conj(s.plus) * s.minus;
    return {2.0 * cross.real() / rho, 2.0 * cross.imag() / rho,
            (std::norm(s.plus) - std::norm(s.minus)) / rho};
}

namespace {

double rk4(const VelocityField& v, double x, double ta, double tb, long steps) {
    const double h = (tb - ta) / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
        const double t = ta + static_cast<double>(i) * h;
        const double k1 = v(x, t);
        const double k2 = v(x + 0.5 * h * k1, t + 0.5 * h);
        const double k3 = v(x + 0.5 * h * k2, t + 0.5 * h);
        const double k4 = v(x + h * k3, t + h);
        x += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        if (!std::isfinite(x)) {
            throw DensityFloorError("non-finite position", x, t);
        }
    }
    return x;
}

std::optional<double> try_rk4(const VelocityField& v, double x, double ta, double tb, long steps) {
    try {
        return rk4(v, x, ta, tb, steps);
    } catch (const DensityFloorError&) {
        return std::nullopt;
    }
}

}  // namespace

Trajectory integrate_trajectory(const VelocityField& v, double x0, double t0,
                                std::span<const double> output_times, const StepControl& control,
                                const SpinProbe& spin, std::uint64_t stream_id) {
    if (!(control.pos_tol > 0.0) || control.initial_substeps < 1) {
        throw std::invalid_argument("StepControl needs pos_tol > 0 and initial_substeps >= 1");
    }
    Trajectory out;
    out.initial_position = x0;
    out.stream_id = stream_id;
    out.samples.reserve(output_times.size() + 1);
    auto record = [&](double t, double x) {
        TrajectorySample s{t, x, std::nullopt};
        if (spin) {
            s.spin = spin(x, t);
        }
        out.samples.push_back(s);
    };
    record(t0, x0);

    double t = t0;
    double x = x0;
    long carried = control.initial_substeps;
    for (const double target : output_times) {
        if (!(target > t)) {
            throw std::invalid_argument("output times must be strictly increasing and after t0");
        }
        long n = std::max<long>(control.initial_substeps, carried);
        std::optional<double> coarse = try_rk4(v, x, t, target, n);
        bool accepted = false;
        double next = x;
        for (int r = 0; r < control.max_refinements; ++r) {
            const std::optional<double> fine = try_rk4(v, x, t, target, 2 * n);
            if (coarse && fine && std::abs(*fine - *coarse) < control.pos_tol) {
                next = *fine;
                accepted = true;
                break;
            }
            coarse = fine;
            n *= 2;
        }
        if (!accepted) {
            std::ostringstream msg;
            msg << "step refinement exhausted on [" << t << ", " << target
                << "] starting from x = " << x;
            throw StepUnderflowError(msg.str(), t, x);
        }
        // let the next interval try one level coarser
        carried = std::max<long>(control.initial_substeps, n / 2);
        t = target;
        x = next;
        record(t, x);
    }
    return out;
}

std::vector<double> sample_initial_positions(const Distribution1D& density, std::size_t n,
                                             RandomStream& rng) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(density.quantile(rng.uniform_open()));
    }
    return out;
}

std::vector<double> sample_initial_positions(const GaussianPacket& packet, std::size_t n,
                                             RandomStream& rng) {
    packet.validate();
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(packet.center + packet.sigma * rng.normal());
    }
    return out;
}

std::vector<double> uniform_times(double t0, double t1, std::size_t count) {
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t k = 1; k <= count; ++k) {
        out.push_back(t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(count));
    }
    return out;
}

}  // namespace pilotwave
