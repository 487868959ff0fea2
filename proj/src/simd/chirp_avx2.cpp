// Compiled with -mavx2 -mfma; only reached through the runtime dispatcher.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "pilotwave/simd/chirp.hpp"

namespace pilotwave::simd {

namespace {

struct Cvec {
    __m256d re;
    __m256d im;
};

inline Cvec cmul(const Cvec& a, const Cvec& b) {
    return {_mm256_fmsub_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im)),
            _mm256_fmadd_pd(a.re, b.im, _mm256_mul_pd(a.im, b.re))};
}

inline double hsum(__m256d v) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

Cvec polar4(const double (&phase)[4]) {
    alignas(32) double c[4];
    alignas(32) double s[4];
    for (int l = 0; l < 4; ++l) {
        c[l] = std::cos(phase[l]);
        s[l] = std::sin(phase[l]);
    }
    return {_mm256_load_pd(c), _mm256_load_pd(s)};
}

}  // namespace

// Lane l handles nodes j = 4 q + l.  Per iteration the phasor of each lane
// advances by four nodes:
//   r <- r * D,   D_l = exp(i k (16 dx^2 - 8 dx u_l)),   D <- D * exp(32 i k dx^2).
ChirpSums chirp_sums_avx2(SampleView f, const ChirpGrid& grid) {
    const std::size_t n = f.re.size();
    const std::size_t vector_nodes = n - n % 4;
    const double k = grid.kappa;
    const double dx = grid.dx;
    const double y0 = grid.y - grid.x0;

    const double advance_phase = 32.0 * k * dx * dx;
    const Cvec advance{_mm256_set1_pd(std::cos(advance_phase)),
                       _mm256_set1_pd(std::sin(advance_phase))};
    const __m256d lane_offsets = _mm256_set_pd(3.0 * dx, 2.0 * dx, dx, 0.0);
    const __m256d step4 = _mm256_set1_pd(4.0 * dx);

    Cvec s0{_mm256_setzero_pd(), _mm256_setzero_pd()};
    Cvec s1{_mm256_setzero_pd(), _mm256_setzero_pd()};

    for (std::size_t start = 0; start < vector_nodes; start += kAnchorBlock) {
        const std::size_t stop = std::min(vector_nodes, start + kAnchorBlock);
        double r_phase[4];
        double d_phase[4];
        for (int l = 0; l < 4; ++l) {
            const double u = y0 - static_cast<double>(start + l) * dx;
            r_phase[l] = k * u * u;
            d_phase[l] = k * (16.0 * dx * dx - 8.0 * dx * u);
        }
        Cvec r = polar4(r_phase);
        Cvec d = polar4(d_phase);
        const __m256d u_start =
            _mm256_sub_pd(_mm256_set1_pd(y0 - static_cast<double>(start) * dx), lane_offsets);

        double q = 0.0;
        for (std::size_t j = start; j < stop; j += 4, q += 1.0) {
            const Cvec fv{_mm256_loadu_pd(f.re.data() + j), _mm256_loadu_pd(f.im.data() + j)};
            const __m256d u = _mm256_fnmadd_pd(_mm256_set1_pd(q), step4, u_start);
            const Cvec t = cmul(fv, r);
            s0.re = _mm256_add_pd(s0.re, t.re);
            s0.im = _mm256_add_pd(s0.im, t.im);
            s1.re = _mm256_fmadd_pd(u, t.re, s1.re);
            s1.im = _mm256_fmadd_pd(u, t.im, s1.im);
            r = cmul(r, d);
            d = cmul(d, advance);
        }
    }

    ChirpSums out{Complex(hsum(s0.re), hsum(s0.im)), Complex(hsum(s1.re), hsum(s1.im))};
    if (vector_nodes < n) {
        const ChirpGrid tail_grid{grid.x0 + static_cast<double>(vector_nodes) * dx, dx, grid.y,
                                  k};
        out += chirp_sums_scalar(
            {f.re.subspan(vector_nodes), f.im.subspan(vector_nodes)}, tail_grid);
    }
    return out;
}

}  // namespace pilotwave::simd
