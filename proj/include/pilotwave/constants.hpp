#pragma once

#include <numbers>

namespace pilotwave {

/// Physical constants in SI units.  `h` is always derived from `hbar`.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;         // J s
    double electron_mass = 9.1093837015e-31;  // kg
    double silver_mass = 1.8e-25;          // kg, textbook value for Ag
    double bohr_magneton = 9.2740100783e-24;  // J/T

    [[nodiscard]] constexpr double h() const { return 2.0 * std::numbers::pi * hbar; }

    /// Same constants with hbar divided by `divisor` (classical-limit studies).
    [[nodiscard]] PhysicalConstants with_hbar_divided(double divisor) const;

    /// Throws std::invalid_argument if any value is not strictly positive.
    void validate() const;
};

}  // namespace pilotwave
