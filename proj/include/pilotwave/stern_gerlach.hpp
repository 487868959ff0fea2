#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <vector>

#include "pilotwave/constants.hpp"
#include "pilotwave/distribution.hpp"
#include "pilotwave/guidance.hpp"

namespace pilotwave {

/// Magnet and beam parameters.  Field B_z = B0 - grad z over `length`, then a
/// free drift of `drift` to the detector; the beam axis moves classically at v0.
struct MagnetSpec {
    double B0 = 5.0;          // T
    double gradient = 1.0e3;  // T/m
    double length = 0.01;     // m
    double drift = 0.2;       // m
    double v0 = 500.0;        // m/s

    void validate() const;

    [[nodiscard]] double field_time() const { return length / v0; }
    [[nodiscard]] double drift_time() const { return drift / v0; }
};

struct SternGerlachDerived {
    double field_time = 0.0;        // Delta t
    double z_delta = 0.0;           // mu_B grad dt^2 / 2m
    double u = 0.0;                 // mu_B grad dt / m
    double decoherence_time = 0.0;  // (3 sigma0 - z_delta) / u, after the field
    double larmor_frequency = 0.0;  // 2 mu_B B0 / hbar
    double chi_plus = 0.0;          // phase of psi+ at field exit, without the phi0 part
    double chi_minus = 0.0;
};

/// Spin-1/2 atom crossing the magnet.  Each component is a Gaussian of frozen
/// width sigma0 (the spreading over the whole run is below 1e-4 relative):
///
///   in the field, 0 <= t <= dt, with p = mu_B grad t and z_c = p t / 2m,
///     psi+ = cos(th/2) e^{-i ph/2} A(z - z_c) exp(i(-mu_B B0 t + p z - p^2 t / 6m) / hbar)
///     psi- = sin(th/2) e^{+i ph/2} A(z + z_c) exp(i(+mu_B B0 t - p z - p^2 t / 6m) / hbar)
///
///   after the field, s = t - dt >= 0,
///     psi+ = cos(th/2) e^{-i ph/2} e^{i chi+} A(z - z_delta - u s) exp(i(m u z - m u^2 s / 2) / hbar)
///     psi- = sin(th/2) e^{+i ph/2} e^{i chi-} A(z + z_delta + u s) exp(i(-m u z - m u^2 s / 2) / hbar)
///
/// with A the normalised sigma0 Gaussian amplitude.  Times passed to spinor()
/// and the *_total functions are measured from the field entrance.
class SternGerlach {
public:
    SternGerlach(MagnetSpec magnet, double sigma0, PhysicalConstants constants = {});

    [[nodiscard]] const MagnetSpec& magnet() const { return magnet_; }
    [[nodiscard]] double sigma0() const { return sigma0_; }
    [[nodiscard]] double mass() const { return constants_.silver_mass; }
    [[nodiscard]] double hbar() const { return constants_.hbar; }
    [[nodiscard]] const SternGerlachDerived& derived() const { return derived_; }
    [[nodiscard]] double decoherence_time() const { return derived_.decoherence_time; }
    /// Field entrance to detector.
    [[nodiscard]] double screen_time() const {
        return magnet_.field_time() + magnet_.drift_time();
    }

    /// 0 <= t <= dt; std::domain_error otherwise.
    [[nodiscard]] SpinorJet in_field(const SpinOrientation& initial, double z, double t) const;
    /// s >= 0 after the field exit.
    [[nodiscard]] SpinorJet after_field(const SpinOrientation& initial, double z, double s) const;
    /// Any t >= 0 from the field entrance.
    [[nodiscard]] SpinorJet spinor(const SpinOrientation& initial, double z, double t) const;

    /// Center of the upper packet at time t from the entrance (the lower one is at minus it).
    [[nodiscard]] double component_center(double t) const;
    /// cos^2 G(z - c) + sin^2 G(z + c), G the sigma0 normal density, s after the field.
    [[nodiscard]] double density(double theta0, double z, double s) const;
    [[nodiscard]] double density_total(double theta0, double z, double t) const;
    /// z-marginal as a two-component normal mixture at time t from the entrance.
    [[nodiscard]] NormalMixture z_marginal(double theta0, double t) const;
    /// Position separating the lower mass sin^2(theta0/2) from the upper mass at time t.
    [[nodiscard]] double split_position(double theta0, double t) const;
    /// sigma0 F^-1(sin^2(theta0/2)); -inf for theta0 = 0, +inf for theta0 = pi.
    [[nodiscard]] double threshold_position(double theta0) const;

    /// int |psi+||psi-| dz / (cos sin) by quadrature, s after the field.
    [[nodiscard]] double normalized_overlap(double s) const;
    /// Time after the field where normalized_overlap falls to e^{-9/2}.
    [[nodiscard]] double overlap_separation_time() const;

    /// [rho_++, rho_+-, rho_-+, rho_--] with rho_ij = int psi_i psi_j^* dz, by quadrature.
    [[nodiscard]] std::array<Complex, 4> spin_density_matrix(const SpinOrientation& initial,
                                                             double t) const;

    /// Convective Pauli velocity of the spinor for this initial orientation.
    [[nodiscard]] VelocityField velocity_field(const SpinOrientation& initial,
                                               double floor_relative = 1e-12) const;

private:
    // psi_s(z) = weight A(z - center) exp(i (phase + wavenumber z))
    struct ComponentLayout {
        Complex weight;
        double center = 0.0;
        double wavenumber = 0.0;
        double phase = 0.0;
    };
    struct Layout {
        ComponentLayout up;
        ComponentLayout down;
    };
    [[nodiscard]] Layout layout(const SpinOrientation& initial, double t) const;
    [[nodiscard]] SpinorJet evaluate(const Layout& layout, double z) const;

    MagnetSpec magnet_;
    double sigma0_;
    PhysicalConstants constants_;
    SternGerlachDerived derived_;
};

/// Non-separating magnet (u <= 0) raises this from decoherence_time computations.
[[nodiscard]] double decoherence_time(const MagnetSpec& magnet, double sigma0,
                                      const PhysicalConstants& constants = {});

struct MeasurementOutcome {
    int sign = 0;            // +1 or -1
    double eigenvalue = 0.0; // sign * hbar / 2
    SpinorSample state;      // renormalised surviving component
    double suppression = 0.0;  // |discarded| / |kept| at the impact
};

/// Spin measurement read from the impact: the dominant component is kept, the
/// other eliminated.  Throws AmbiguousRegionError unless the discarded
/// component is below 1e-4 of the kept one at z_impact.  s is the time after
/// the field.
[[nodiscard]] MeasurementOutcome measurement_demo(const SternGerlach& sg,
                                                  const SpinOrientation& initial, double z_impact,
                                                  double s);

enum class SgMode { Pure, Mixture };

struct SgEnsembleOptions {
    SgMode mode = SgMode::Pure;
    SpinOrientation pure{std::numbers::pi / 3.0, 0.0};
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    std::size_t spin_samples = 40;   // uniform output times up to the screen
    std::vector<double> extra_times;  // added to the output grid (from the entrance)
    StepControl step{1e-12, 1, 24};
    double spin_alignment_tol = 1e-3;
    std::size_t workers = 0;
};

struct SgRun {
    Trajectory trajectory;  // samples carry the spin orientation
    SpinOrientation initial;
    double threshold = 0.0;
    int outcome = 0;        // from the final position versus the split position
    int predicted = 0;      // from z0 versus the threshold (tie: up)
};

struct SgEnsemble {
    std::vector<SgRun> runs;
    std::vector<double> times;  // output grid
    double screen_time = 0.0;
    double up_fraction = 0.0;
    std::size_t violations = 0;        // outcome != predicted
    double spin_aligned_fraction = 0.0;  // final theta within tol of 0 or pi
};

[[nodiscard]] SgEnsemble run_sg_ensemble(const SternGerlach& sg, const SgEnsembleOptions& options);

}  // namespace pilotwave
