#pragma once

#include <span>
#include <string_view>

#include "pilotwave/gaussian.hpp"

namespace pilotwave::simd {

/// Chirped moment sums over a uniform grid x_j = x0 + j dx:
///
///   s0 = sum_j f_j exp(i kappa (y - x_j)^2)
///   s1 = sum_j (y - x_j) f_j exp(i kappa (y - x_j)^2)
///
/// These are the inner loops of the free-kernel quadrature: s0 gives the
/// propagated amplitude and s1 its y-derivative.
struct ChirpSums {
    Complex s0{};
    Complex s1{};

    ChirpSums& operator+=(const ChirpSums& o) {
        s0 += o.s0;
        s1 += o.s1;
        return *this;
    }
    friend ChirpSums operator+(ChirpSums a, const ChirpSums& b) { return a += b; }
    friend ChirpSums operator-(const ChirpSums& a, const ChirpSums& b) {
        return {a.s0 - b.s0, a.s1 - b.s1};
    }
    friend ChirpSums operator*(const ChirpSums& a, double k) { return {a.s0 * k, a.s1 * k}; }
};

struct ChirpGrid {
    double x0 = 0.0;
    double dx = 0.0;
    double y = 0.0;
    double kappa = 0.0;
};

/// Samples in split (structure-of-arrays) form.
struct SampleView {
    std::span<const double> re;
    std::span<const double> im;
};

enum class Level { Scalar, Avx2 };

/// Direct evaluation, one sincos per node.  Ground truth for the fast variants.
[[nodiscard]] ChirpSums chirp_sums_reference(SampleView f, const ChirpGrid& grid);

/// Phasor recurrence, re-anchored with an exact sincos every block of nodes.
[[nodiscard]] ChirpSums chirp_sums_scalar(SampleView f, const ChirpGrid& grid);

/// Four-lane AVX2/FMA version of chirp_sums_scalar.  Only call when
/// avx2_supported() is true.
[[nodiscard]] ChirpSums chirp_sums_avx2(SampleView f, const ChirpGrid& grid);

/// True when the AVX2 variant was compiled in and the CPU supports it.
[[nodiscard]] bool avx2_supported();

/// Level used by chirp_sums(), chosen once from the CPU.
[[nodiscard]] Level active_level();
[[nodiscard]] std::string_view level_name(Level level);

/// Runtime-dispatched entry point.
[[nodiscard]] ChirpSums chirp_sums(SampleView f, const ChirpGrid& grid);

/// Nodes between exact re-anchors of the recurrence.
inline constexpr std::size_t kAnchorBlock = 256;

}  // namespace pilotwave::simd
