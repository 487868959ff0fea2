#pragma once

#include "pilotwave/gaussian.hpp"

namespace pilotwave {

/// Free-particle Schrodinger propagator
///
///   K(y, t; y0, t0) = sqrt(m / (2 pi i hbar (t - t0))) exp(i m (y - y0)^2 / (2 hbar (t - t0)))
///
/// Throws DegenerateTimeError when t <= t0.
[[nodiscard]] Complex free_kernel(double y, double t, double y0, double t0, double mass,
                                  double hbar);

/// Chirp rate m / (2 hbar tau) of the free kernel.
[[nodiscard]] double kernel_chirp_rate(double tau, double mass, double hbar);

/// Prefactor sqrt(m / (2 pi i hbar tau)).
[[nodiscard]] Complex kernel_prefactor(double tau, double mass, double hbar);

/// Propagator of H = p^2 / 2m + K z,
///
///   K_free(y, t; y0, t0) exp(-i (K tau (y + y0) / 2 + K^2 tau^3 / 24 m) / hbar).
[[nodiscard]] Complex linear_potential_kernel(double y, double t, double y0, double t0,
                                              double mass, double hbar, double force_constant);

struct KernelEvolution {
    Complex value;
    long panels = 0;      // Simpson panels of the accepted level
    double change = 0.0;  // relative change against the previous level
};

/// psi(y, t) = int K_lin(y, t; x, 0) psi0(x) dx over center +- reach sigma by
/// composite Simpson.  The starting spacing keeps the coarse grid below the
/// Nyquist limit of the integrand; panels double until the relative change
/// drops below rel_tol (NonConvergenceError after 4 doublings).  Nodes are
/// produced by an exact-restart recurrence every 256 points, so grids of
/// 1e8 nodes and more stay affordable.
[[nodiscard]] KernelEvolution evolve_by_kernel(const GaussianPacket& packet, double hbar,
                                               double force_constant, double y, double t,
                                               double rel_tol = 1e-9, double reach = 12.0);

}  // namespace pilotwave
