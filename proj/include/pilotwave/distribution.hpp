#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace pilotwave {

/// One-dimensional probability law used for quantum-equilibrium sampling and
/// for binning in the equivariance test.
class Distribution1D {
public:
    virtual ~Distribution1D() = default;

    [[nodiscard]] virtual double pdf(double x) const = 0;
    [[nodiscard]] virtual double cdf(double x) const = 0;
    /// Interval that carries essentially all of the mass; used to bracket quantiles.
    [[nodiscard]] virtual std::pair<double, double> support() const = 0;
    /// Inverse CDF for p in (0, 1).  The default brackets with support() and
    /// bisects; derived classes override with something exact where possible.
    [[nodiscard]] virtual double quantile(double p) const;
};

/// Weighted sum of normal laws.  Weights are normalised on construction.
class NormalMixture final : public Distribution1D {
public:
    struct Component {
        double weight;
        double mean;
        double sigma;
    };

    explicit NormalMixture(std::vector<Component> components);

    [[nodiscard]] double pdf(double x) const override;
    [[nodiscard]] double cdf(double x) const override;
    [[nodiscard]] std::pair<double, double> support() const override;
    [[nodiscard]] double quantile(double p) const override;

    [[nodiscard]] const std::vector<Component>& components() const { return components_; }

private:
    std::vector<Component> components_;
};

/// Normal law restricted to a union of disjoint intervals and renormalised.
class TruncatedNormal final : public Distribution1D {
public:
    TruncatedNormal(double mean, double sigma, std::vector<std::pair<double, double>> intervals);

    [[nodiscard]] double pdf(double x) const override;
    [[nodiscard]] double cdf(double x) const override;
    [[nodiscard]] std::pair<double, double> support() const override;
    [[nodiscard]] double quantile(double p) const override;

    /// Untruncated probability mass inside the intervals.
    [[nodiscard]] double retained_mass() const { return total_; }

private:
    double mean_;
    double sigma_;
    std::vector<std::pair<double, double>> intervals_;
    std::vector<double> mass_;  // per interval, untruncated
    double total_ = 0.0;
};

/// Density tabulated on a uniform grid, CDF accumulated cell by cell with
/// Simpson's rule on each cell (midpoint sampled).  Mass that falls outside
/// the grid (`total_mass` minus the tabulated mass) is split evenly between
/// the two tails.
class TabulatedDistribution final : public Distribution1D {
public:
    TabulatedDistribution(const std::function<double(double)>& density, double lo, double hi,
                          std::size_t cells, double total_mass);
    /// Same, from precomputed values at the cells+1 nodes and the cells midpoints.
    TabulatedDistribution(double lo, double hi, std::vector<double> nodes,
                          std::vector<double> midpoints, double total_mass);

    [[nodiscard]] double pdf(double x) const override;
    [[nodiscard]] double cdf(double x) const override;
    [[nodiscard]] std::pair<double, double> support() const override;
    [[nodiscard]] double quantile(double p) const override;

    [[nodiscard]] double tabulated_mass() const { return tabulated_mass_; }
    [[nodiscard]] double total_mass() const { return total_mass_; }

private:
    void accumulate(double total_mass);

    double lo_;
    double hi_;
    double dx_;
    std::vector<double> density_;   // at nodes, un-normalised
    std::vector<double> midpoint_;  // at cell midpoints
    std::vector<double> cumulative_;  // normalised CDF at nodes, tails included
    double tabulated_mass_ = 0.0;
    double total_mass_ = 0.0;
    double tail_ = 0.0;
};

}  // namespace pilotwave
