#include "pilotwave/equivariance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "pilotwave/errors.hpp"

namespace pilotwave {

double chi_square_quantile(int degrees_of_freedom, double p) {
    if (degrees_of_freedom < 1 || !(p > 0.0 && p < 1.0)) {
        throw std::domain_error("chi-square quantile needs dof >= 1 and 0 < p < 1");
    }
    const boost::math::chi_squared_distribution<double> law(degrees_of_freedom);
    return boost::math::quantile(law, p);
}

EquivarianceReport equivariance_check(std::span<const double> positions,
                                      const Distribution1D& density, int bins) {
    if (bins < 2) {
        throw std::invalid_argument("equivariance check needs at least 2 bins");
    }
    const double n = static_cast<double>(positions.size());
    const double per_bin = n / bins;
    if (per_bin < 5.0) {
        throw InsufficientSampleError("expected count per bin " + std::to_string(per_bin) +
                                      " is below 5 (" + std::to_string(positions.size()) +
                                      " samples, " + std::to_string(bins) + " bins)");
    }
    std::vector<double> edges;
    edges.reserve(static_cast<std::size_t>(bins - 1));
    for (int k = 1; k < bins; ++k) {
        edges.push_back(density.quantile(static_cast<double>(k) / bins));
    }

    EquivarianceReport report;
    report.bins = bins;
    report.degrees_of_freedom = bins - 1;
    report.observed.assign(static_cast<std::size_t>(bins), 0);
    report.expected.assign(static_cast<std::size_t>(bins), per_bin);
    report.min_expected = per_bin;
    for (const double x : positions) {
        const auto bin = std::upper_bound(edges.begin(), edges.end(), x) - edges.begin();
        ++report.observed[static_cast<std::size_t>(bin)];
    }
    for (int k = 0; k < bins; ++k) {
        const double d = static_cast<double>(report.observed[static_cast<std::size_t>(k)]) - per_bin;
        report.chi_square += d * d / per_bin;
    }
    report.threshold = chi_square_quantile(bins - 1, 0.99);
    report.passed = report.chi_square < report.threshold;
    return report;
}

EquivarianceReport equivariance_check(const std::vector<Trajectory>& trajectories, double t,
                                      const Distribution1D& density, int bins) {
    std::vector<double> positions;
    positions.reserve(trajectories.size());
    const double tol = 1e-9 * std::max(std::abs(t), 1e-300);
    for (const auto& traj : trajectories) {
        const auto it = std::find_if(traj.samples.begin(), traj.samples.end(),
                                     [&](const TrajectorySample& s) { return std::abs(s.t - t) <= tol; });
        if (it == traj.samples.end()) {
            throw std::invalid_argument("trajectory " + std::to_string(traj.stream_id) +
                                        " has no sample at the requested time");
        }
        positions.push_back(it->position);
    }
    return equivariance_check(positions, density, bins);
}

}  // namespace pilotwave
