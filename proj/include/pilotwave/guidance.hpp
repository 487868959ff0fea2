#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pilotwave/distribution.hpp"
#include "pilotwave/gaussian.hpp"
#include "pilotwave/random.hpp"

namespace pilotwave {

/// Two-component Pauli spinor at a point.
struct SpinorSample {
    Complex plus;
    Complex minus;

    [[nodiscard]] double density() const { return std::norm(plus) + std::norm(minus); }
};

struct SpinorJet {
    SpinorSample value;
    SpinorSample dz;
};

/// Spin direction (theta in [0, pi], phi in [0, 2 pi)).
struct SpinOrientation {
    double theta = 0.0;
    double phi = 0.0;
};

using ScalarWaveField = std::function<WaveJet(double z, double t)>;
using SpinorWaveField = std::function<SpinorJet(double z, double t)>;

/// Guidance aborts when the density drops below relative * reference(t).
/// Without a reference only an exactly vanishing density is rejected.
struct DensityFloor {
    double relative = 1e-12;
    std::function<double(double t)> reference;

    [[nodiscard]] double at(double t) const { return reference ? relative * reference(t) : 0.0; }
};

class VelocityField {
public:
    using Evaluator = std::function<double(double z, double t)>;

    VelocityField(Evaluator evaluate, double t_begin, double t_end);

    /// Velocity at (z, t); throws DensityFloorError near nodes.
    double operator()(double z, double t) const { return evaluate_(z, t); }

    [[nodiscard]] double t_begin() const { return t_begin_; }
    [[nodiscard]] double t_end() const { return t_end_; }

private:
    Evaluator evaluate_;
    double t_begin_;
    double t_end_;
};

/// v = hbar Im(psi* dpsi/dz) / (m |psi|^2)
[[nodiscard]] double scalar_velocity(const WaveJet& jet, double mass, double hbar);
/// Convective Pauli velocity hbar Im(sum_s psi_s* dpsi_s/dz) / (m rho).
[[nodiscard]] double spinor_velocity(const SpinorJet& jet, double mass, double hbar);

[[nodiscard]] VelocityField velocity_from_scalar_wave(
    ScalarWaveField psi, double mass, double hbar, DensityFloor floor = {},
    double t_begin = -std::numeric_limits<double>::infinity(),
    double t_end = std::numeric_limits<double>::infinity());

[[nodiscard]] VelocityField velocity_from_spinor(
    SpinorWaveField spinor, double mass, double hbar, DensityFloor floor = {},
    double t_begin = -std::numeric_limits<double>::infinity(),
    double t_end = std::numeric_limits<double>::infinity());

/// theta = 2 atan2(|psi-|, |psi+|), phi = arg psi- - arg psi+ in [0, 2 pi).
/// Throws std::domain_error for the null spinor.
[[nodiscard]] SpinOrientation spin_orientation(const SpinorSample& s);

/// Unit spin direction (sin th cos ph, sin th sin ph, cos th) computed from the
/// Pauli expectation values divided by rho.  Its norm is one for any non-null
/// spinor, i.e. the spin modulus stays hbar/2.
[[nodiscard]] std::array<double, 3> spin_direction(const SpinorSample& s);

struct TrajectorySample {
    double t = 0.0;
    double position = 0.0;
    std::optional<SpinOrientation> spin;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double initial_position = 0.0;
    std::uint64_t stream_id = 0;

    [[nodiscard]] double final_position() const { return samples.back().position; }
};

struct StepControl {
    double pos_tol = 1e-12;     // accepted |x(n) - x(2n)| per output interval
    int initial_substeps = 1;   // RK4 steps per output interval to start with
    int max_refinements = 24;   // doublings of the substep count before giving up
};

using SpinProbe = std::function<SpinOrientation(double z, double t)>;

/// Classical RK4 from (t0, x0) through every time in `output_times` (strictly
/// increasing, all > t0).  Inside each output interval the substep count is
/// doubled until two successive estimates agree to pos_tol.  A density floor
/// hit during a trial also triggers refinement; running out of refinements
/// raises StepUnderflowError with the last accepted state.  The first sample
/// is (t0, x0).
[[nodiscard]] Trajectory integrate_trajectory(const VelocityField& v, double x0, double t0,
                                              std::span<const double> output_times,
                                              const StepControl& control,
                                              const SpinProbe& spin = {},
                                              std::uint64_t stream_id = 0);

/// n i.i.d. draws by inversion of the distribution's quantile.
[[nodiscard]] std::vector<double> sample_initial_positions(const Distribution1D& density,
                                                           std::size_t n, RandomStream& rng);

/// n i.i.d. draws from |psi0|^2 of a Gaussian packet (Box-Muller).
[[nodiscard]] std::vector<double> sample_initial_positions(const GaussianPacket& packet,
                                                           std::size_t n, RandomStream& rng);

/// Times t0 + k (t1 - t0) / count, k = 1 .. count.
[[nodiscard]] std::vector<double> uniform_times(double t0, double t1, std::size_t count);

}  // namespace pilotwave
