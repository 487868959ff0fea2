#include <algorithm>
#include <cmath>

#include "pilotwave/simd/chirp.hpp"

namespace pilotwave::simd {

ChirpSums chirp_sums_reference(SampleView f, const ChirpGrid& grid) {
    ChirpSums acc;
    const std::size_t n = f.re.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double u = grid.y - (grid.x0 + static_cast<double>(j) * grid.dx);
        const Complex term = Complex(f.re[j], f.im[j]) * std::polar(1.0, grid.kappa * u * u);
        acc.s0 += term;
        acc.s1 += u * term;
    }
    return acc;
}

// exp(i k (u - dx)^2) = exp(i k u^2) * exp(i k (dx^2 - 2 dx u)); the second
// factor itself advances by exp(2 i k dx^2) per node.
ChirpSums chirp_sums_scalar(SampleView f, const ChirpGrid& grid) {
    const std::size_t n = f.re.size();
    const double k = grid.kappa;
    const double dx = grid.dx;
    const double y0 = grid.y - grid.x0;
    const double a_re = std::cos(2.0 * k * dx * dx);
    const double a_im = std::sin(2.0 * k * dx * dx);

    double s0_re = 0.0, s0_im = 0.0, s1_re = 0.0, s1_im = 0.0;
    for (std::size_t start = 0; start < n; start += kAnchorBlock) {
        const std::size_t stop = std::min(n, start + kAnchorBlock);
        const double u_start = y0 - static_cast<double>(start) * dx;
        double r_re = std::cos(k * u_start * u_start);
        double r_im = std::sin(k * u_start * u_start);
        double d_re = std::cos(k * (dx * dx - 2.0 * dx * u_start));
        double d_im = std::sin(k * (dx * dx - 2.0 * dx * u_start));
        for (std::size_t j = start; j < stop; ++j) {
            const double u = y0 - static_cast<double>(j) * dx;
            const double t_re = f.re[j] * r_re - f.im[j] * r_im;
            const double t_im = f.re[j] * r_im + f.im[j] * r_re;
            s0_re += t_re;
            s0_im += t_im;
            s1_re += u * t_re;
            s1_im += u * t_im;
            const double next_r_re = r_re * d_re - r_im * d_im;
            r_im = r_re * d_im + r_im * d_re;
            r_re = next_r_re;
            const double next_d_re = d_re * a_re - d_im * a_im;
            d_im = d_re * a_im + d_im * a_re;
            d_re = next_d_re;
        }
    }
    return {Complex(s0_re, s0_im), Complex(s1_re, s1_im)};
}

}  // namespace pilotwave::simd
