#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pilotwave/stern_gerlach.hpp"

namespace pilotwave {

/// Hidden variables of one pair.  Spins are opposite: theta_B = pi - theta_A,
/// phi_B = phi_A - pi (mod 2 pi).
struct PairState {
    double x0A = 0.0;
    double z0A = 0.0;
    double x0B = 0.0;
    double z0B = 0.0;
    SpinOrientation spin_A;
    SpinOrientation spin_B;

    /// Builds the pair with B's spin opposite to A's.
    static PairState opposite(double x0A, double z0A, double x0B, double z0B,
                              SpinOrientation spin_A);
};

/// Positions come from RandomStream(seed, 2 i), spins from RandomStream(seed, 2 i + 1)
/// with theta_A ~ U[0, pi] and phi_A ~ U[0, 2 pi).
[[nodiscard]] PairState sample_pair(std::uint64_t seed, std::uint64_t pair_id, double sigma0);

/// Components in the basis (++, +-, -+, --), first label particle A.
using TwoSpin = std::array<Complex, 4>;

struct SingletProjection {
    TwoSpin state;         // normalised antisymmetrised product
    Complex coefficient;   // <singlet|state>
    double fidelity = 0.0; // |coefficient|^2
};

/// Antisymmetrise Psi_A (x) Psi_B - Psi_B (x) Psi_A for opposite single-particle
/// spins and project on (|+-> - |-+>) / sqrt 2.
[[nodiscard]] SingletProjection singlet_from_product(double theta_A, double phi_A);

struct SpinHistorySample {
    double t = 0.0;
    double z_A = 0.0;
    SpinOrientation A;
    SpinOrientation B;
};

struct MeasurementRecord {
    int outcome_A = 0;
    int outcome_B = 0;
    double delta = 0.0;
    double t0 = 0.0;               // A enters its magnet
    double field_time = 0.0;       // dt
    double decoherence_time = 0.0; // t_D
};

struct PairRun {
    MeasurementRecord record;
    Trajectory trajectory_A;        // step 1, times from A's field entrance
    Trajectory trajectory_B;        // step 2, rotated frame, times from B's field entrance
    std::vector<SpinHistorySample> history;  // step 1
    double theta_B_prime = 0.0;     // B's polar angle relative to z' when it enters
    double z0B_prime = 0.0;         // B's position on z'
    double max_opposite_error = 0.0;   // max |theta_B(read back) + theta_A - pi|
    double max_module_error = 0.0;     // max ||spin direction| - 1| over A and B
    int trajectory_mismatches = 0;     // outcomes from trajectories that disagree with the threshold law
};

struct CorrelationRow {
    double delta = 0.0;
    std::size_t n = 0;
    double E = 0.0;
    double p_pp = 0.0;
    double p_pm = 0.0;
    double p_mp = 0.0;
    double p_mm = 0.0;
    double reference = 0.0;  // -cos delta
    double std_error = 0.0;  // sqrt((1 - E^2) / n)
};

struct EprbOptions {
    std::size_t spin_samples = 20;  // step-1 history points
    StepControl step{1e-12, 1, 24};
    std::size_t workers = 0;
};

/// Two-step EPR-B experiment.  A crosses its magnet during [0, dt + t_D]
/// while B is free; B then crosses a magnet rotated by delta during
/// [dt + t_D, 2 (dt + t_D)].  Times are measured from A's field entrance.
class EprbExperiment {
public:
    EprbExperiment(MagnetSpec magnet, double sigma0, PhysicalConstants constants = {});

    [[nodiscard]] const SternGerlach& stern_gerlach() const { return sg_; }
    [[nodiscard]] double sigma0() const { return sg_.sigma0(); }
    /// End of step 1, dt + t_D.
    [[nodiscard]] double step_duration() const;

    /// Two-particle amplitude during step 1,
    ///   f(r_B) (f+(r_A, t) |+-> - f-(r_A, t) |-+>) / sqrt 2,
    /// with f the x-z Gaussian and f+- A's deflected packets.
    [[nodiscard]] TwoSpin step1_wavefunction(double xA, double zA, double xB, double zB,
                                             double t) const;
    /// Sum of |components|^2 with x_A, x_B integrated out (closed form product).
    [[nodiscard]] double joint_density(double zA, double zB, double t) const;
    [[nodiscard]] double marginal_A(double zA, double t) const;
    /// rho_B(zB, t) by integrating |step1_wavefunction|^2 over z_A on a grid
    /// that moves with A's packets (compensated summation); x's are spectators.
    [[nodiscard]] double marginal_B(double zB, double t) const;

    /// Spin part of B's state after A's outcome: |-> for +1, |+> for -1.
    [[nodiscard]] static SpinorSample conditional_B_spin(int outcome_A);
    /// B's reduced spin density matrix [++, +-, -+, --] at fixed positions.
    [[nodiscard]] std::array<Complex, 4> reduced_B_spin(double zA, double zB, double t) const;

    [[nodiscard]] PairRun causal_pair_run(const PairState& pair, double delta,
                                          const EprbOptions& options = {}) const;

    /// Runs n sampled pairs for every delta (A's step is shared).
    [[nodiscard]] std::vector<CorrelationRow> correlation_study(const std::vector<double>& deltas,
                                                                std::size_t n, std::uint64_t seed,
                                                                const EprbOptions& options = {},
                                                                std::vector<std::vector<PairRun>>* runs = nullptr) const;

private:
    struct StepOne {
        Trajectory trajectory;
        std::vector<SpinHistorySample> history;
        int outcome_A = 0;
        double max_opposite_error = 0.0;
        double max_module_error = 0.0;
        int mismatch = 0;
    };
    [[nodiscard]] StepOne run_step_one(const PairState& pair, const EprbOptions& options) const;
    void run_step_two(const PairState& pair, double delta, const EprbOptions& options,
                      PairRun& run) const;

    SternGerlach sg_;
};

}  // namespace pilotwave
