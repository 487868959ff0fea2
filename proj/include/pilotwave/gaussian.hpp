#pragma once

#include <complex>

namespace pilotwave {

using Complex = std::complex<double>;

/// Amplitude together with its spatial derivative.
struct WaveJet {
    Complex value;
    Complex dz;
};

/// One-dimensional Gaussian wave packet
///
///   psi0(z) = (2 pi sigma^2)^(-1/4) exp(-(z - center)^2 / (4 sigma^2)
///                                      + i m v z / hbar + i phase0)
///
/// normalised so that the integral of |psi0|^2 is one.
struct GaussianPacket {
    double center = 0.0;
    double sigma = 1.0;
    double drift_velocity = 0.0;
    double phase0 = 0.0;
    double mass = 1.0;

    void validate() const;
};

/// Closed-form evolution of a GaussianPacket.
///
/// `force_constant` K describes the linear potential V(z) = K z (force -K);
/// K = 0 is free motion.  The exact solution is the free spreading packet
/// evaluated at z + K t^2 / 2m and multiplied by exp(-i (K t z + K^2 t^3 / 6m) / hbar).
/// With `spreading == false` the width is frozen at sigma (sigma_t ~ sigma),
/// which is the approximation used for the Stern-Gerlach magnet.
class GaussianEvolution {
public:
    GaussianEvolution(GaussianPacket packet, double hbar, double force_constant = 0.0,
                      bool spreading = true);

    [[nodiscard]] Complex value(double z, double t) const;
    [[nodiscard]] WaveJet jet(double z, double t) const;
    [[nodiscard]] double density(double z, double t) const;

    /// sigma_t = sigma sqrt(1 + (hbar t / 2 m sigma^2)^2) (or sigma if frozen).
    [[nodiscard]] double width(double t) const;
    /// Center of |psi|^2 at time t.
    [[nodiscard]] double mean(double t) const;

    [[nodiscard]] const GaussianPacket& packet() const { return packet_; }
    [[nodiscard]] double hbar() const { return hbar_; }

private:
    struct Parts {
        Complex log_value;  // log psi
        Complex log_dz;     // d/dz log psi
    };
    [[nodiscard]] Parts parts(double z, double t) const;

    GaussianPacket packet_;
    double hbar_;
    double force_;
    bool spreading_;
};

}  // namespace pilotwave
