#include "pilotwave/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace pilotwave {

void QuadratureSpec::validate() const {
    if (panels < 2 || panels % 2 != 0) {
        throw std::invalid_argument("QuadratureSpec: panels must be even and >= 2");
    }
    if (!(abs_tol > 0.0)) {
        throw std::invalid_argument("QuadratureSpec: abs_tol must be positive");
    }
}

namespace {

template <class Value, class F>
QuadratureResult<Value> integrate_with(const F& f, double a, double b,
                                       const QuadratureSpec& spec) {
    if (!(a < b)) {
        throw std::invalid_argument("integrate: require a < b");
    }
    const double length = b - a;
    auto endpoints = [&] { return f(a) + f(b); };
    auto interior = [&](int n) {
        Value sum{};
        const double h = length / n;
        for (int j = 1; j < n; ++j) {
            sum += f(a + j * h);
        }
        return sum;
    };
    auto midpoints = [&](int n) {
        Value sum{};
        const double h = length / n;
        for (int j = 0; j < n; ++j) {
            sum += f(a + (j + 0.5) * h);
        }
        return sum;
    };
    auto change = [](const Value& x, const Value& y) { return std::abs(x - y); };
    return simpson_refine<Value>(a, b, spec, endpoints, interior, midpoints, change);
}

}  // namespace

QuadratureResult<Complex> integrate_complex_detailed(const ComplexIntegrand& f, double a,
                                                     double b, const QuadratureSpec& spec) {
    return integrate_with<Complex>(f, a, b, spec);
}

Complex integrate_complex(const ComplexIntegrand& f, double a, double b,
                          const QuadratureSpec& spec) {
    return integrate_complex_detailed(f, a, b, spec).value;
}

double integrate_real(const RealIntegrand& f, double a, double b, const QuadratureSpec& spec) {
    return integrate_with<double>(f, a, b, spec).value;
}

Complex trapezoid(const ComplexIntegrand& f, double a, double b, std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("trapezoid: need at least one panel");
    }
    const double h = (b - a) / static_cast<double>(n);
    Complex sum = 0.5 * (f(a) + f(b));
    for (std::size_t j = 1; j < n; ++j) {
        sum += f(a + static_cast<double>(j) * h);
    }
    return sum * h;
}

}  // namespace pilotwave
