#pragma once

#include <span>
#include <vector>

#include "pilotwave/distribution.hpp"
#include "pilotwave/guidance.hpp"

namespace pilotwave {

struct EquivarianceReport {
    int bins = 0;
    int degrees_of_freedom = 0;
    double chi_square = 0.0;
    double threshold = 0.0;  // 99th percentile of chi-square(bins - 1)
    double min_expected = 0.0;
    bool passed = false;
    std::vector<long> observed;
    std::vector<double> expected;
};

/// Upper quantile of the chi-square law.
[[nodiscard]] double chi_square_quantile(int degrees_of_freedom, double p);

/// Bins are equiprobable under `density` (edges from its quantile function),
/// so every bin expects n / bins counts.  Throws InsufficientSampleError when
/// that is below 5.
[[nodiscard]] EquivarianceReport equivariance_check(std::span<const double> positions,
                                                    const Distribution1D& density, int bins);

/// Positions taken from each trajectory's sample at time t (matched to 1e-9 relative).
[[nodiscard]] EquivarianceReport equivariance_check(const std::vector<Trajectory>& trajectories,
                                                    double t, const Distribution1D& density,
                                                    int bins);

}  // namespace pilotwave
