#include "pilotwave/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pilotwave/constants.hpp"

namespace pilotwave {

PhysicalConstants PhysicalConstants::with_hbar_divided(double divisor) const {
    if (!(divisor > 0.0)) {
        throw std::invalid_argument("hbar divisor must be positive");
    }
    PhysicalConstants scaled = *this;
    scaled.hbar = hbar / divisor;
    return scaled;
}

void PhysicalConstants::validate() const {
    if (!(hbar > 0.0) || !(electron_mass > 0.0) || !(silver_mass > 0.0) ||
        !(bohr_magneton > 0.0)) {
        throw std::invalid_argument("physical constants must be strictly positive");
    }
}

void GaussianPacket::validate() const {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("GaussianPacket: sigma must be positive");
    }
    if (!(mass > 0.0)) {
        throw std::invalid_argument("GaussianPacket: mass must be positive");
    }
}

GaussianEvolution::GaussianEvolution(GaussianPacket packet, double hbar, double force_constant,
                                     bool spreading)
    : packet_(packet), hbar_(hbar), force_(force_constant), spreading_(spreading) {
    packet_.validate();
    if (!(hbar > 0.0)) {
        throw std::invalid_argument("GaussianEvolution: hbar must be positive");
    }
}

double GaussianEvolution::width(double t) const {
    if (!spreading_) {
        return packet_.sigma;
    }
    const double s = packet_.sigma;
    const double tau = hbar_ * t / (2.0 * packet_.mass * s * s);
    return s * std::sqrt(1.0 + tau * tau);
}

double GaussianEvolution::mean(double t) const {
    const double m = packet_.mass;
    return packet_.center + packet_.drift_velocity * t - force_ * t * t / (2.0 * m);
}

// log psi(z, t) = -1/4 log(2 pi) - 1/2 log(sigma (1 + i tau))
//                 - w^2 / (4 sigma^2 (1 + i tau))
//                 + i (m v xi - m v^2 t / 2) / hbar + i phase0
//                 - i (K t z + K^2 t^3 / 6m) / hbar
// with xi = z + K t^2 / 2m and w = xi - center - v t.
GaussianEvolution::Parts GaussianEvolution::parts(double z, double t) const {
    const double m = packet_.mass;
    const double s = packet_.sigma;
    const double v = packet_.drift_velocity;
    const double k = force_;

    const double xi = z + k * t * t / (2.0 * m);
    const double w = xi - packet_.center - v * t;
    const double tau = spreading_ ? hbar_ * t / (2.0 * m * s * s) : 0.0;
    const Complex spread(1.0, tau);

    const double phase = (m * v * xi - 0.5 * m * v * v * t) / hbar_ + packet_.phase0 -
                         (k * t * z + k * k * t * t * t / (6.0 * m)) / hbar_;

    Parts p;
    p.log_value = -0.25 * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(s * spread) -
                  w * w / (4.0 * s * s * spread) + Complex(0.0, phase);
    p.log_dz = -w / (2.0 * s * s * spread) + Complex(0.0, (m * v - k * t) / hbar_);
    return p;
}

Complex GaussianEvolution::value(double z, double t) const {
    const Parts p = parts(z, t);
    // Split real and imaginary parts: the phase can be large, exp of a complex
    // number then keeps full relative accuracy.
    return std::polar(std::exp(p.log_value.real()), p.log_value.imag());
}

WaveJet GaussianEvolution::jet(double z, double t) const {
    const Parts p = parts(z, t);
    const Complex v = std::polar(std::exp(p.log_value.real()), p.log_value.imag());
    return {v, v * p.log_dz};
}

double GaussianEvolution::density(double z, double t) const {
    return std::exp(2.0 * parts(z, t).log_value.real());
}

}  // namespace pilotwave
