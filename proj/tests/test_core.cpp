#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pilotwave/constants.hpp"
#include "pilotwave/distribution.hpp"
#include "pilotwave/errors.hpp"
#include "pilotwave/gaussian.hpp"
#include "pilotwave/normal.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/quadrature.hpp"
#include "pilotwave/random.hpp"

using namespace pilotwave;
using std::numbers::pi;

namespace {

// Phi(x) = 1/2 + phi(x) sum_n x^(2n+1) / (1 3 5 ... (2n+1)).  The terms share
// one sign, so in long double the sum is good to ~1e-18; for x < 0 the final
// subtraction from 1/2 limits the result to ~1e-19 absolute.
double series_cdf(double xd) {
    const long double x = xd;
    long double term = x;
    long double sum = x;
    for (int n = 1; n < 400; ++n) {
        term *= x * x / (2.0L * n + 1.0L);
        sum += term;
        if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
    }
    const long double pdf = std::exp(-0.5L * x * x) / std::sqrt(2.0L * std::numbers::pi_v<long double>);
    return static_cast<double>(0.5L + pdf * sum);
}

double bisect_quantile(double p) {
    double lo = -9.0;
    double hi = 9.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (series_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

}  // namespace

TEST_CASE("constants") {
    PhysicalConstants c;
    CHECK(c.h() == doctest::Approx(6.62607015e-34).epsilon(1e-9));
    CHECK(c.with_hbar_divided(10.0).hbar == doctest::Approx(c.hbar / 10.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)c.with_hbar_divided(0.0), std::invalid_argument);
    PhysicalConstants bad;
    bad.silver_mass = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("normal cdf against positive series") {
    for (double x = -8.0; x <= 8.0; x += 0.125) {
        // the oracle itself carries ~1e-19 absolute error in the lower tail
        CHECK(std::fabs(normal_cdf(x) - series_cdf(x)) <= 1e-13 * series_cdf(x) + 1e-18);
    }
    // frozen from the series oracle
    CHECK(series_cdf(3.0) - series_cdf(-3.0) == doctest::Approx(0.9973002039367398).epsilon(1e-15));
    CHECK(normal_cdf(3.0) - normal_cdf(-3.0) == doctest::Approx(0.9973002039367398).epsilon(1e-14));
}

TEST_CASE("normal quantile against bisection") {
    CHECK(bisect_quantile(0.25) == doctest::Approx(-0.6744897501960817).epsilon(1e-13));
    CHECK(normal_quantile(0.25) == doctest::Approx(-0.6744897501960817).epsilon(1e-13));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    for (double p : {1e-12, 1e-8, 1e-4, 0.01, 0.02425, 0.1, 0.3, 0.7, 0.9, 0.97575, 0.999}) {
        const double x = bisect_quantile(p);
        CHECK(std::fabs(normal_quantile(p) - x) < 1e-11 + 1e-18 / normal_pdf(x));
    }
    CHECK_THROWS_AS((void)normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS((void)normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS((void)normal_quantile(-0.3), std::domain_error);
}

TEST_CASE("quantile inverts cdf on [-6, 6]") {
    for (double x = -6.0; x <= 6.0; x += 0.01) {
        CHECK(std::fabs(normal_quantile(normal_cdf(x)) - x) < 1e-8);
    }
}

TEST_CASE("random streams") {
    RandomStream a(42, 7);
    RandomStream b(42, 7);
    RandomStream c(42, 8);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double ua = a.uniform();
        CHECK(ua == b.uniform());
        differs = differs || ua != c.uniform();
    }
    CHECK(differs);

    // neighbouring streams are uncorrelated
    constexpr int n = 20000;
    RandomStream s1(9, 0);
    RandomStream s2(9, 1);
    double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s1.uniform();
        const double y = s2.uniform();
        sx += x; sy += y; sxy += x * y; sxx += x * x; syy += y * y;
    }
    const double cov = sxy / n - sx / n * sy / n;
    const double corr = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
    CHECK(std::fabs(corr) < 0.05);

    RandomStream u(3, 0);
    std::vector<double> us(n);
    for (auto& x : us) {
        x = u.uniform_open();
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
    CHECK(ks_statistic(us, [](double x) { return x; }) < 1.63 / std::sqrt(double(n)));

    RandomStream g(3, 1);
    std::vector<double> gs(n);
    for (auto& x : gs) x = g.normal();
    CHECK(ks_statistic(gs, series_cdf) < 1.63 / std::sqrt(double(n)));
}

TEST_CASE("simpson quadrature") {
    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    CHECK(std::abs(integrate_complex([](double) { return Complex(1.0, 0.0); }, 0.0, 2.0, spec) -
                   Complex(2.0, 0.0)) < 1e-14);
    const Complex osc = integrate_complex(
        [](double x) { return std::polar(1.0, x); }, 0.0, pi, spec);
    CHECK(std::abs(osc - Complex(0.0, 2.0)) < 1e-11);
    CHECK(integrate_real([](double x) { return std::exp(-x * x); }, -8.0, 8.0, spec) ==
          doctest::Approx(std::sqrt(pi)).epsilon(1e-12));

    QuadratureSpec odd;
    odd.panels = 3;
    CHECK_THROWS_AS(odd.validate(), std::invalid_argument);

    QuadratureSpec hard;
    hard.abs_tol = 1e-300;
    CHECK_THROWS_AS((void)integrate_complex(
                        [](double x) { return std::polar(1.0, 1e7 * x * x); }, 0.0, 1.0, hard),
                    NonConvergenceError);
}

TEST_CASE("oscillatory slit integral matches refined trapezoid") {
    // kernel times the spread source over one 0.2 um slit, electron at 35 cm
    PhysicalConstants c;
    const double m = c.electron_mass;
    const double v = 1.8e8;
    const double t1 = 0.35 / v;
    const double tau = 3.5e-4 / v;
    GaussianEvolution src({0.0, 3e-6, 0.0, 0.0, m}, c.hbar);
    const double y = 2.3e-6;
    ComplexIntegrand f = [&](double x) {
        return free_kernel(y, t1 + tau, x, t1, m, c.hbar) * src.value(x, t1);
    };
    const double scale = std::abs(kernel_prefactor(tau, m, c.hbar)) * std::abs(src.value(0.5e-6, t1)) * 2e-7;
    QuadratureSpec spec;
    spec.abs_tol = 1e-9 * scale;
    const auto simpson = integrate_complex_detailed(f, 0.4e-6, 0.6e-6, spec);
    // a 10x finer trapezoid still carries ~2e-6 of its own h^2 error here
    const Complex fine = trapezoid(f, 0.4e-6, 0.6e-6, static_cast<std::size_t>(simpson.panels) * 100);
    CHECK(std::abs(simpson.value - fine) / std::abs(fine) < 1e-6);
}

TEST_CASE("tighter tolerance never worsens the error") {
    ComplexIntegrand f = [](double x) { return std::polar(std::exp(-x * x), 40.0 * x * x); };
    const Complex exact = trapezoid(f, -6.0, 6.0, 1u << 22);
    double previous = 1.0;
    for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
        QuadratureSpec spec;
        spec.abs_tol = tol;
        const double err = std::abs(integrate_complex(f, -6.0, 6.0, spec) - exact);
        CHECK(err <= previous * 1.0000001);
        previous = err;
    }
}

TEST_CASE("free kernel") {
    const double m = 2.0, hbar = 0.7;
    const Complex k = free_kernel(1.3, 2.0, -0.4, 0.5, m, hbar);
    CHECK(std::abs(k) == doctest::Approx(std::sqrt(m / (2.0 * pi * hbar * 1.5))).epsilon(1e-14));
    CHECK(std::abs(k - free_kernel(-0.4, 2.0, 1.3, 0.5, m, hbar)) < 1e-15);
    CHECK_THROWS_AS((void)free_kernel(0.0, 1.0, 0.0, 1.0, m, hbar), DegenerateTimeError);
    CHECK_THROWS_AS((void)free_kernel(0.0, 0.5, 0.0, 1.0, m, hbar), DegenerateTimeError);
    const Complex kl = linear_potential_kernel(1.3, 2.0, -0.4, 0.5, m, hbar, 0.8);
    CHECK(std::abs(kl) == doctest::Approx(std::abs(k)).epsilon(1e-14));
}

TEST_CASE("gaussian packet normalisation") {
    for (double sigma : {0.1, 1.0, 3e-6}) {
        GaussianEvolution g({0.2 * sigma, sigma, 0.0, 0.3, 1.0}, 1.0);
        QuadratureSpec spec;
        spec.abs_tol = 1e-13;
        const double norm = integrate_real([&](double z) { return g.density(z, 0.0); },
                                           -12.0 * sigma, 12.0 * sigma, spec);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    }
    GaussianPacket bad;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("kernel quadrature reproduces the closed-form gaussian") {
    const double m = 1.0, hbar = 1.0;
    for (double force : {0.0, 0.6}) {
        GaussianPacket p{0.7, 1.0, 0.4, 0.2, m};
        GaussianEvolution closed(p, hbar, force);
        for (double t : {0.3, 1.0, 4.0}) {
            for (double y : {-3.0, 0.0, 1.1, 5.0}) {
                const auto kq = evolve_by_kernel(p, hbar, force, y, t, 1e-10);
                const Complex exact = closed.value(y, t);
                const double scale = std::sqrt(closed.density(closed.mean(t), t));
                CHECK(std::abs(kq.value - exact) / scale < 1e-8);
            }
        }
        // direct Simpson on the linear-potential kernel
        const double t = 1.5, y = 0.9;
        QuadratureSpec spec;
        spec.abs_tol = 1e-12;
        GaussianEvolution initial(p, hbar);
        const Complex direct = integrate_complex(
            [&](double x) {
                return linear_potential_kernel(y, t, x, 0.0, m, hbar, force) * initial.value(x, 0.0);
            },
            p.center - 14.0, p.center + 14.0, spec);
        CHECK(std::abs(direct - closed.value(y, t)) < 1e-9);
    }
}

TEST_CASE("gaussian width law and mean") {
    GaussianPacket p{0.0, 2.0, 1.5, 0.0, 3.0};
    GaussianEvolution g(p, 1.0, 0.9);
    for (double t : {0.0, 1.0, 10.0}) {
        const double a = 1.0 * t / (2.0 * 3.0 * 4.0);
        CHECK(g.width(t) == doctest::Approx(2.0 * std::sqrt(1.0 + a * a)).epsilon(1e-14));
        CHECK(g.mean(t) == doctest::Approx(1.5 * t - 0.9 * t * t / 6.0).epsilon(1e-14).scale(1.0));
    }
    GaussianEvolution frozen(p, 1.0, 0.0, false);
    CHECK(frozen.width(100.0) == 2.0);
}

TEST_CASE("jet derivative matches finite difference") {
    GaussianEvolution g({0.3, 0.8, 0.7, 0.1, 1.2}, 0.9, 0.4);
    for (double z : {-1.0, 0.2, 1.7}) {
        const double h = 1e-6;
        const Complex fd = (g.value(z + h, 2.0) - g.value(z - h, 2.0)) / (2.0 * h);
        CHECK(std::abs(g.jet(z, 2.0).dz - fd) < 1e-8);
    }
}

TEST_CASE("distributions") {
    NormalMixture mix({{1.0, -2.0, 0.5}, {3.0, 1.0, 1.0}});
    CHECK(mix.components()[1].weight == doctest::Approx(0.75));
    for (double p : {0.001, 0.2, 0.25, 0.5, 0.9, 0.999}) {
        CHECK(mix.cdf(mix.quantile(p)) == doctest::Approx(p).epsilon(1e-12).scale(1.0));
    }
    CHECK(mix.cdf(1.0) == doctest::Approx(0.25 * series_cdf(6.0) + 0.75 * 0.5).epsilon(1e-14));

    TruncatedNormal tn(0.0, 1.0, {{-2.0, -1.0}, {0.5, 1.5}});
    CHECK(tn.retained_mass() ==
          doctest::Approx(series_cdf(-1.0) - series_cdf(-2.0) + series_cdf(1.5) - series_cdf(0.5))
              .epsilon(1e-13));
    CHECK(tn.pdf(0.0) == 0.0);
    CHECK(tn.cdf(0.0) == doctest::Approx((series_cdf(-1.0) - series_cdf(-2.0)) / tn.retained_mass()));
    for (double p : {0.01, 0.4, 0.6, 0.99}) {
        const double x = tn.quantile(p);
        CHECK(tn.cdf(x) == doctest::Approx(p).epsilon(1e-12));
        CHECK(((x >= -2.0 && x <= -1.0) || (x >= 0.5 && x <= 1.5)));
    }

    TabulatedDistribution tab([](double x) { return normal_pdf(x); }, -10.0, 10.0, 4000, 1.0);
    for (double x : {-3.0, -0.5, 0.0, 1.2, 4.0}) {
        CHECK(std::fabs(tab.cdf(x) - series_cdf(x)) < 1e-10);
    }
    for (double p : {0.001, 0.3, 0.5, 0.8}) {
        CHECK(std::fabs(tab.quantile(p) - bisect_quantile(p)) < 1e-6);
    }
}
