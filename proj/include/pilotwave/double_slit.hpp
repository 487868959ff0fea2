#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "pilotwave/constants.hpp"
#include "pilotwave/distribution.hpp"
#include "pilotwave/gaussian.hpp"
#include "pilotwave/guidance.hpp"

namespace pilotwave {

/// Two identical slits of width 2 beta centred at +separation/2 (slit A) and
/// -separation/2 (slit B).  Motion along the beam is classical at beam_speed.
struct SlitGeometry {
    double half_width = 0.1e-6;
    double separation = 1.0e-6;
    double d1 = 0.35;
    double d2 = 0.35;
    double beam_speed = 1.8e8;

    void validate() const;

    /// Arrival time at the slit plane, d1 / v.
    [[nodiscard]] double t1() const { return d1 / beam_speed; }
    [[nodiscard]] double time_at_distance(double distance) const {
        return t1() + distance / beam_speed;
    }
    [[nodiscard]] double screen_time() const { return time_at_distance(d2); }
};

enum class Slit { A, B };
enum class SlitMask { Both, OnlyA, OnlyB };

struct DoubleSlitNumerics {
    double rel_tol = 1e-9;       // Simpson change, relative to the slit-plane peak amplitude
    double panels_per_radian = 1.0;  // starting panels per radian of kernel phase span
    int min_panels = 8;

    void validate() const;
};

/// Wave function behind the slits.  At t1 the closed-form spreading source
/// packet is cut by the slit indicator; for t > t1 each slit contributes
///
///   Psi_S(y, t) = int_S K(y, t; x, t1) Psi(x, t1) dx
///
/// evaluated by composite Simpson with panel doubling.  The slit-plane samples
/// for every refinement level are computed once and reused for all (y, t).
class DoubleSlit {
public:
    struct Components {
        WaveJet a;
        WaveJet b;
    };

    DoubleSlit(SlitGeometry geometry, GaussianPacket source, double hbar,
               DoubleSlitNumerics numerics = {}, SlitMask mask = SlitMask::Both);
    ~DoubleSlit();
    DoubleSlit(DoubleSlit&&) noexcept;
    DoubleSlit& operator=(DoubleSlit&&) noexcept;

    [[nodiscard]] const SlitGeometry& geometry() const { return geometry_; }
    [[nodiscard]] const GaussianPacket& source() const { return source_; }
    [[nodiscard]] double hbar() const { return hbar_; }
    [[nodiscard]] double mass() const { return source_.mass; }
    [[nodiscard]] SlitMask mask() const { return mask_; }

    [[nodiscard]] std::pair<double, double> slit_interval(Slit slit) const;
    [[nodiscard]] bool slit_open(Slit slit) const;

    /// Incident (untruncated) source wave at time t <= t1.
    [[nodiscard]] WaveJet incident(double y, double t) const;
    /// Psi(y, t1) G(y).
    [[nodiscard]] Complex slit_wave(double y) const;
    /// Width of the incident packet's density at the slit plane.
    [[nodiscard]] double slit_plane_sigma() const;
    /// Guidance velocity of the incident packet at the slit plane.
    [[nodiscard]] double slit_velocity(double y) const;
    /// |Psi(y, t1) G(y)|^2 normalised to one (quantum equilibrium given passage).
    [[nodiscard]] TruncatedNormal slit_plane_distribution() const;
    /// Norm of the truncated slit-plane wave.
    [[nodiscard]] double transmitted_mass() const { return transmitted_; }

    /// Per-slit amplitudes and y-derivatives at t > t1 (closed slits give zero).
    [[nodiscard]] Components components(double y, double t) const;
    [[nodiscard]] WaveJet jet(double y, double t) const;
    [[nodiscard]] double density(double y, double t) const;

    /// Upper bound on max_y |Psi(y, t)|^2, used to scale the density floor.
    [[nodiscard]] double peak_density_bound(double t) const;

    /// Guidance field on (t1, t1 + d2 / v].  The field refers to *this.
    [[nodiscard]] VelocityField velocity_field(double floor_relative = 1e-12) const;

private:
    struct SlitCache;

    [[nodiscard]] WaveJet slit_component(const SlitCache& slit, double y, double t) const;

    SlitGeometry geometry_;
    GaussianPacket source_;
    double hbar_;
    DoubleSlitNumerics numerics_;
    SlitMask mask_;
    GaussianEvolution incident_;
    double peak_amplitude_ = 0.0;  // max |Psi(x, t1)| over open slits
    double abs_integral_ = 0.0;    // sum over open slits of int |Psi(x, t1)| dx
    double transmitted_ = 0.0;
    std::array<std::unique_ptr<SlitCache>, 2> slits_;
};

/// Density at time t tabulated on [center - half_extent, center + half_extent];
/// mass outside is the transmitted mass minus the tabulated mass, split evenly.
[[nodiscard]] TabulatedDistribution tabulate_density(const DoubleSlit& ds, double t,
                                                     double half_extent, std::size_t cells);

/// Density at `distance` behind the slits, tabulated over +-100 um (or 40
/// fringe spacings) with cells resolving both the fringes and the Fresnel scale.
[[nodiscard]] TabulatedDistribution probe_distribution(const DoubleSlit& ds, double distance);

/// Fringe spacing lambda d / separation of two coherent sources, lambda = h / (m v).
[[nodiscard]] double two_source_fringe_spacing(const SlitGeometry& geometry, double mass,
                                               double hbar, double distance);

struct CrossSection {
    double distance = 0.0;
    double time = 0.0;
    std::vector<double> y;
    std::vector<double> interference;  // |Psi_A + Psi_B|^2
    std::vector<double> sum;           // |Psi_A|^2 + |Psi_B|^2

    /// max |interference - sum| / max sum.
    [[nodiscard]] double discrepancy() const;
    /// (max - min) / (max + min) of the central fringe.
    [[nodiscard]] double central_visibility(double fringe_spacing) const;
    /// Mean distance between adjacent interference maxima within `window` of the axis.
    [[nodiscard]] double measured_fringe_spacing(double window) const;
};

/// Half-extent of the cross-section grid: 30 um, or 12 two-source fringe
/// spacings when that is wider.
[[nodiscard]] double cross_section_half_extent(const DoubleSlit& ds, double distance);

[[nodiscard]] std::vector<CrossSection> density_cross_sections(const DoubleSlit& ds,
                                                               const std::vector<double>& distances,
                                                               std::size_t points = 2001);

struct ScreenRecord {
    std::vector<double> impacts;
    double arrival_time = 0.0;
};

struct BundleOptions {
    std::size_t n = 100;
    std::uint64_t seed = 1;
    double z_start = 5e-3;               // distance after the slits where ODE integration begins
    std::size_t output_points = 48;      // log-spaced in distance from z_start to d2
    std::vector<double> probe_distances{0.01, 0.1};
    StepControl step{1e-10, 1, 24};
    double transport_cell = 1e-9;        // grid spacing of the near-field transport table
    double transport_margin = 2e-6;      // extent of that table beyond the slits
    std::size_t workers = 0;             // 0: worker_count()
};

struct TrajectoryBundle {
    std::vector<Trajectory> trajectories;
    ScreenRecord screen;
    std::vector<double> output_times;  // ODE output grid (after t_start)
    double t_start = 0.0;
};

/// Slit-plane positions y0 drawn from the truncated slit-plane density,
/// one RandomStream(seed, i) per trajectory.
[[nodiscard]] std::vector<double> sample_slit_positions(const DoubleSlit& ds, std::size_t n,
                                                        std::uint64_t seed);

/// Each trajectory starts at (t1, y0).  Between t1 and t_start the 1-D flow is
/// order preserving, so the position is carried by the slit-plane CDF value:
/// y(t_start) = F_start^-1(F_slit(y0)).  From t_start it is integrated with RK4.
[[nodiscard]] TrajectoryBundle run_trajectory_bundle(const DoubleSlit& ds,
                                                     const BundleOptions& options);
[[nodiscard]] TrajectoryBundle run_trajectory_bundle(const DoubleSlit& ds,
                                                     const std::vector<double>& initial_positions,
                                                     const BundleOptions& options);

struct HbarStudyEntry {
    double divisor = 1.0;
    double z_start = 0.0;
    TrajectoryBundle bundle;
    double deviation = 0.0;  // max distance to the straight slit-exit line
};

struct HbarStudyOptions {
    std::vector<double> divisors{1.0, 10.0, 100.0, 1000.0, 10000.0};
    double start_cap_fraction = 0.5;  // z_start = min(z_start * divisor, cap * d2)
};

/// Max over trajectories and samples of |y(t) - (y0 + v_slit(y0) (t - t1))|.
[[nodiscard]] double classical_deviation(const DoubleSlit& ds, const TrajectoryBundle& bundle);

[[nodiscard]] std::vector<HbarStudyEntry> hbar_scaling_study(const SlitGeometry& geometry,
                                                             const GaussianPacket& source,
                                                             const PhysicalConstants& constants,
                                                             const BundleOptions& bundle,
                                                             const HbarStudyOptions& study,
                                                             const DoubleSlitNumerics& numerics = {});

}  // namespace pilotwave
