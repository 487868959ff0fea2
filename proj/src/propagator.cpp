#include "pilotwave/propagator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pilotwave/errors.hpp"

namespace pilotwave {

namespace {

void require_positive_interval(double tau) {
    if (!(tau > 0.0)) {
        throw DegenerateTimeError("free kernel requires t > t0");
    }
}

}  // namespace

double kernel_chirp_rate(double tau, double mass, double hbar) {
    require_positive_interval(tau);
    return mass / (2.0 * hbar * tau);
}

Complex kernel_prefactor(double tau, double mass, double hbar) {
    require_positive_interval(tau);
    // 1/sqrt(i) = exp(-i pi/4)
    const double modulus = std::sqrt(mass / (2.0 * std::numbers::pi * hbar * tau));
    return std::polar(modulus, -0.25 * std::numbers::pi);
}

Complex free_kernel(double y, double t, double y0, double t0, double mass, double hbar) {
    if (!(mass > 0.0)) {
        throw std::invalid_argument("free_kernel: mass must be positive");
    }
    const double tau = t - t0;
    const double dy = y - y0;
    return kernel_prefactor(tau, mass, hbar) *
           std::polar(1.0, kernel_chirp_rate(tau, mass, hbar) * dy * dy);
}

Complex linear_potential_kernel(double y, double t, double y0, double t0, double mass,
                                double hbar, double force_constant) {
    const double tau = t - t0;
    const double phase = -(force_constant * tau * (y + y0) / 2.0 +
                           force_constant * force_constant * tau * tau * tau / (24.0 * mass)) /
                         hbar;
    return free_kernel(y, t, y0, t0, mass, hbar) * std::polar(1.0, phase);
}

namespace {

// Integrand exp(-(x - c)^2 / 4 s^2 + i phase(x)) of the kernel quadrature,
// without the x-independent factors.
struct KernelIntegrand {
    double center;
    double sigma;
    double kappa;     // m / 2 hbar tau
    double y;
    double linear;    // m v / hbar - K tau / 2 hbar

    [[nodiscard]] Complex at(double x) const {
        const double w = x - center;
        const double d = y - x;
        return std::polar(std::exp(-w * w / (4.0 * sigma * sigma)), kappa * d * d + linear * x);
    }
    // f(x + h) / f(x)
    [[nodiscard]] Complex ratio(double x, double h) const {
        const double w = x - center;
        const double d = y - x;
        return std::exp(Complex(-(2.0 * w * h + h * h) / (4.0 * sigma * sigma),
                                kappa * (h * h - 2.0 * d * h) + linear * h));
    }
    // ratio(x + h, h) / ratio(x, h)
    [[nodiscard]] Complex ratio_step(double h) const {
        return std::exp(Complex(-2.0 * h * h / (4.0 * sigma * sigma), 2.0 * kappa * h * h));
    }
};

// Sum of f over x_k = start + k step, k < count.
Complex grid_sum(const KernelIntegrand& f, double start, double step, long count) {
    constexpr long kBlock = 256;
    const Complex q = f.ratio_step(step);
    Complex total(0.0);
    for (long first = 0; first < count; first += kBlock) {
        const long len = std::min(kBlock, count - first);
        const double x = start + static_cast<double>(first) * step;
        Complex value = f.at(x);
        Complex r = f.ratio(x, step);
        Complex block(0.0);
        for (long k = 0; k < len; ++k) {
            block += value;
            value *= r;
            r *= q;
        }
        total += block;
    }
    return total;
}

}  // namespace

KernelEvolution evolve_by_kernel(const GaussianPacket& packet, double hbar, double force_constant,
                                 double y, double t, double rel_tol, double reach) {
    packet.validate();
    if (!(hbar > 0.0) || !(rel_tol > 0.0) || !(reach > 0.0)) {
        throw std::invalid_argument("evolve_by_kernel needs hbar, rel_tol, reach > 0");
    }
    const double m = packet.mass;
    const KernelIntegrand f{packet.center, packet.sigma, kernel_chirp_rate(t, m, hbar), y,
                            m * packet.drift_velocity / hbar - force_constant * t / (2.0 * hbar)};
    const double a = packet.center - reach * packet.sigma;
    const double b = packet.center + reach * packet.sigma;

    // highest local wavenumber of the integrand on [a, b]; h w <= pi / 2
    const double w_max = 2.0 * f.kappa * std::max(std::abs(y - a), std::abs(y - b)) + std::abs(f.linear);
    const double wanted = (b - a) * w_max / (0.5 * std::numbers::pi);
    long n = 64;
    if (wanted > 64.0) {
        n = static_cast<long>(std::bit_ceil(static_cast<unsigned long>(std::ceil(wanted))));
    }

    const Complex outside =
        std::pow(2.0 * std::numbers::pi * packet.sigma * packet.sigma, -0.25) *
        kernel_prefactor(t, m, hbar) *
        std::polar(1.0, packet.phase0 - (force_constant * t * y / 2.0 +
                                         force_constant * force_constant * t * t * t / (24.0 * m)) /
                                            hbar);

    const Complex ends = f.at(a) + f.at(b);
    double h = (b - a) / static_cast<double>(n);
    Complex odd = grid_sum(f, a + h, 2.0 * h, n / 2);
    Complex even = grid_sum(f, a + 2.0 * h, 2.0 * h, n / 2 - 1);
    Complex previous = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
    double change = 0.0;
    for (int level = 0; level < 4; ++level) {
        even += odd;
        h *= 0.5;
        odd = grid_sum(f, a + h, 2.0 * h, n);
        n *= 2;
        const Complex current = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
        change = std::abs(current - previous) / std::abs(current);
        if (change < rel_tol) {
            return {outside * current, n, change};
        }
        previous = current;
    }
    throw NonConvergenceError("kernel quadrature did not converge", static_cast<int>(n), change);
}

}  // namespace pilotwave
