#include "pilotwave/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pilotwave/normal.hpp"

namespace pilotwave {

namespace {

void check_probability(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("quantile requires 0 < p < 1");
    }
}

// Bisection on a monotone cdf, finished when the bracket stops shrinking.
template <class Cdf>
double bisect_quantile(const Cdf& cdf, double p, double lo, double hi) {
    while (cdf(lo) > p) {
        lo -= (hi - lo);
    }
    while (cdf(hi) < p) {
        hi += (hi - lo);
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double Distribution1D::quantile(double p) const {
    check_probability(p);
    const auto [lo, hi] = support();
    return bisect_quantile([this](double x) { return cdf(x); }, p, lo, hi);
}

// --- NormalMixture ---------------------------------------------------------

NormalMixture::NormalMixture(std::vector<Component> components)
    : components_(std::move(components)) {
    if (components_.empty()) {
        throw std::invalid_argument("NormalMixture needs at least one component");
    }
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.sigma > 0.0) || c.weight < 0.0) {
            throw std::invalid_argument("NormalMixture component needs sigma > 0, weight >= 0");
        }
        total += c.weight;
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("NormalMixture weights sum to zero");
    }
    for (auto& c : components_) {
        c.weight /= total;
    }
}

double NormalMixture::pdf(double x) const {
    double acc = 0.0;
    for (const auto& c : components_) {
        acc += c.weight * normal_pdf((x - c.mean) / c.sigma) / c.sigma;
    }
    return acc;
}

double NormalMixture::cdf(double x) const {
    double acc = 0.0;
    for (const auto& c : components_) {
        acc += c.weight * normal_cdf((x - c.mean) / c.sigma);
    }
    return acc;
}

std::pair<double, double> NormalMixture::support() const {
    double lo = components_.front().mean;
    double hi = lo;
    for (const auto& c : components_) {
        lo = std::min(lo, c.mean - 9.0 * c.sigma);
        hi = std::max(hi, c.mean + 9.0 * c.sigma);
    }
    return {lo, hi};
}

double NormalMixture::quantile(double p) const {
    check_probability(p);
    if (components_.size() == 1) {
        const auto& c = components_.front();
        return c.mean + c.sigma * normal_quantile(p);
    }
    const auto [lo, hi] = support();
    double x = bisect_quantile([this](double y) { return cdf(y); }, p, lo, hi);
    return x;
}

// --- TruncatedNormal -------------------------------------------------------

TruncatedNormal::TruncatedNormal(double mean, double sigma,
                                 std::vector<std::pair<double, double>> intervals)
    : mean_(mean), sigma_(sigma), intervals_(std::move(intervals)) {
    if (!(sigma_ > 0.0) || intervals_.empty()) {
        throw std::invalid_argument("TruncatedNormal needs sigma > 0 and an interval");
    }
    std::sort(intervals_.begin(), intervals_.end());
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        const auto [a, b] = intervals_[i];
        if (!(a < b) || (i > 0 && a < intervals_[i - 1].second)) {
            throw std::invalid_argument("TruncatedNormal intervals must be ordered and disjoint");
        }
        const double m = normal_cdf((b - mean_) / sigma_) - normal_cdf((a - mean_) / sigma_);
        mass_.push_back(m);
        total_ += m;
    }
    if (!(total_ > 0.0)) {
        throw std::invalid_argument("TruncatedNormal intervals carry no mass");
    }
}

double TruncatedNormal::pdf(double x) const {
    for (const auto& [a, b] : intervals_) {
        if (x >= a && x <= b) {
            return normal_pdf((x - mean_) / sigma_) / (sigma_ * total_);
        }
    }
    return 0.0;
}

double TruncatedNormal::cdf(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        const auto [a, b] = intervals_[i];
        if (x >= b) {
            acc += mass_[i];
        } else if (x > a) {
            acc += normal_cdf((x - mean_) / sigma_) - normal_cdf((a - mean_) / sigma_);
        }
    }
    return std::clamp(acc / total_, 0.0, 1.0);
}

std::pair<double, double> TruncatedNormal::support() const {
    return {intervals_.front().first, intervals_.back().second};
}

double TruncatedNormal::quantile(double p) const {
    check_probability(p);
    double target = p * total_;
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (target <= mass_[i] || i + 1 == intervals_.size()) {
            const auto [a, b] = intervals_[i];
            const double fa = normal_cdf((a - mean_) / sigma_);
            const double q = std::clamp(fa + target, 1e-300, 1.0 - 1e-16);
            return std::clamp(mean_ + sigma_ * normal_quantile(q), a, b);
        }
        target -= mass_[i];
    }
    return intervals_.back().second;
}

// --- TabulatedDistribution -------------------------------------------------

TabulatedDistribution::TabulatedDistribution(const std::function<double(double)>& density,
                                             double lo, double hi, std::size_t cells,
                                             double total_mass)
    : lo_(lo), hi_(hi), dx_((hi - lo) / static_cast<double>(cells)) {
    if (!(hi > lo) || cells == 0) {
        throw std::invalid_argument("TabulatedDistribution needs lo < hi and cells > 0");
    }
    density_.resize(cells + 1);
    midpoint_.resize(cells);
    for (std::size_t i = 0; i <= cells; ++i) {
        density_[i] = density(lo + static_cast<double>(i) * dx_);
    }
    for (std::size_t i = 0; i < cells; ++i) {
        midpoint_[i] = density(lo + (static_cast<double>(i) + 0.5) * dx_);
    }
    accumulate(total_mass);
}

TabulatedDistribution::TabulatedDistribution(double lo, double hi, std::vector<double> nodes,
                                             std::vector<double> midpoints, double total_mass)
    : lo_(lo), hi_(hi), density_(std::move(nodes)), midpoint_(std::move(midpoints)) {
    if (!(hi > lo) || midpoint_.empty() || density_.size() != midpoint_.size() + 1) {
        throw std::invalid_argument(
            "TabulatedDistribution needs lo < hi and cells + 1 node values for cells midpoints");
    }
    dx_ = (hi - lo) / static_cast<double>(midpoint_.size());
    accumulate(total_mass);
}

void TabulatedDistribution::accumulate(double total_mass) {
    const std::size_t cells = midpoint_.size();
    std::vector<double> running(cells + 1, 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
        running[i + 1] =
            running[i] + dx_ * (density_[i] + 4.0 * midpoint_[i] + density_[i + 1]) / 6.0;
    }
    tabulated_mass_ = running.back();
    total_mass_ = std::max(total_mass, tabulated_mass_);
    if (!(total_mass_ > 0.0)) {
        throw std::invalid_argument("TabulatedDistribution has no mass");
    }
    tail_ = 0.5 * (total_mass_ - tabulated_mass_);
    cumulative_.resize(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        cumulative_[i] = (tail_ + running[i]) / total_mass_;
    }
}

double TabulatedDistribution::pdf(double x) const {
    if (x < lo_ || x > hi_) {
        return 0.0;
    }
    const double s = (x - lo_) / dx_;
    const auto i = std::min(static_cast<std::size_t>(s), midpoint_.size() - 1);
    const double f = s - static_cast<double>(i);
    // quadratic through node, midpoint, node
    const double a = density_[i];
    const double m = midpoint_[i];
    const double b = density_[i + 1];
    const double value = a * (1.0 - f) * (1.0 - 2.0 * f) + 4.0 * m * f * (1.0 - f) +
                         b * f * (2.0 * f - 1.0);
    return std::max(value, 0.0) / total_mass_;
}

double TabulatedDistribution::cdf(double x) const {
    if (x <= lo_) {
        return x == lo_ ? cumulative_.front() : 0.0;
    }
    if (x >= hi_) {
        return x == hi_ ? cumulative_.back() : 1.0;
    }
    const double s = (x - lo_) / dx_;
    const auto i = std::min(static_cast<std::size_t>(s), midpoint_.size() - 1);
    const double f = s - static_cast<double>(i);
    // exact integral of the interpolating quadratic over [0, f]
    const double a = density_[i];
    const double m = midpoint_[i];
    const double b = density_[i + 1];
    const double f2 = f * f;
    const double f3 = f2 * f;
    const double partial = dx_ * (a * (f - 1.5 * f2 + (2.0 / 3.0) * f3) +
                                  4.0 * m * (0.5 * f2 - f3 / 3.0) +
                                  b * ((2.0 / 3.0) * f3 - 0.5 * f2));
    return std::clamp(cumulative_[i] + partial / total_mass_, 0.0, 1.0);
}

std::pair<double, double> TabulatedDistribution::support() const { return {lo_, hi_}; }

double TabulatedDistribution::quantile(double p) const {
    check_probability(p);
    if (p <= cumulative_.front()) {
        return lo_;
    }
    if (p >= cumulative_.back()) {
        return hi_;
    }
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), p);
    const auto i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    double a = lo_ + static_cast<double>(i) * dx_;
    double b = a + dx_;
    for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) {
            break;
        }
        (cdf(mid) < p ? a : b) = mid;
    }
    return 0.5 * (a + b);
}

}  // namespace pilotwave
