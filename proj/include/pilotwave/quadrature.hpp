#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "pilotwave/errors.hpp"
#include "pilotwave/gaussian.hpp"

namespace pilotwave {

enum class QuadratureScheme { CompositeSimpson };

struct QuadratureSpec {
    int panels = 64;          // initial panel count, even and >= 2
    double abs_tol = 1e-10;   // accepted change between successive doublings
    QuadratureScheme scheme = QuadratureScheme::CompositeSimpson;

    void validate() const;
};

/// Number of panel doublings attempted before giving up.
inline constexpr int kMaxPanelDoublings = 12;

template <class Value>
struct QuadratureResult {
    Value value{};
    int panels = 0;
    double last_change = 0.0;
};

/// Composite Simpson with panel doubling.
///
/// The rule is assembled from nested trapezoid sums, S_2n = (4 T_2n - T_n) / 3,
/// so each doubling only samples the new midpoints.  The caller supplies the
/// sums over the node sets:
///
///   endpoints()        f(a) + f(b)
///   interior(n)        sum of f at a + j (b - a) / n, j = 1 .. n-1
///   midpoints(n)       sum of f at a + (j + 1/2) (b - a) / n, j = 0 .. n-1
///   change(s1, s0)     size of the difference between two estimates
///
/// Value needs +, - and multiplication by double.
template <class Value, class Endpoints, class Interior, class Midpoints, class Change>
QuadratureResult<Value> simpson_refine(double a, double b, const QuadratureSpec& spec,
                                       Endpoints&& endpoints, Interior&& interior,
                                       Midpoints&& midpoints, Change&& change) {
    spec.validate();
    const double length = b - a;
    int n = spec.panels / 2;
    double h = length / n;
    Value trap = (endpoints() * 0.5 + interior(n)) * h;
    // T_{2n} from T_n
    h *= 0.5;
    Value trap_fine = trap * 0.5 + midpoints(n) * h;
    n *= 2;
    Value simpson = (trap_fine * 4.0 - trap) * (1.0 / 3.0);

    double last = 0.0;
    for (int doubling = 0; doubling < kMaxPanelDoublings; ++doubling) {
        h *= 0.5;
        trap = trap_fine;
        trap_fine = trap * 0.5 + midpoints(n) * h;
        n *= 2;
        Value refined = (trap_fine * 4.0 - trap) * (1.0 / 3.0);
        last = change(refined, simpson);
        simpson = refined;
        if (last < spec.abs_tol) {
            return {simpson, n, last};
        }
    }
    throw NonConvergenceError("composite Simpson did not converge after " +
                                  std::to_string(kMaxPanelDoublings) + " doublings (" +
                                  std::to_string(n) + " panels, last change " +
                                  std::to_string(last) + ")",
                              n, last);
}

using ComplexIntegrand = std::function<Complex(double)>;
using RealIntegrand = std::function<double(double)>;

/// Integral of f over [a, b] by composite Simpson with panel doubling.
[[nodiscard]] Complex integrate_complex(const ComplexIntegrand& f, double a, double b,
                                        const QuadratureSpec& spec);
[[nodiscard]] QuadratureResult<Complex> integrate_complex_detailed(const ComplexIntegrand& f,
                                                                   double a, double b,
                                                                   const QuadratureSpec& spec);
[[nodiscard]] double integrate_real(const RealIntegrand& f, double a, double b,
                                    const QuadratureSpec& spec);

/// Plain composite trapezoid on n panels; used as an independent refinement reference.
[[nodiscard]] Complex trapezoid(const ComplexIntegrand& f, double a, double b, std::size_t n);

}  // namespace pilotwave
