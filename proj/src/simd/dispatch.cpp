#include <string>

#include "pilotwave/simd/chirp.hpp"

namespace pilotwave::simd {

bool avx2_supported() {
#if defined(PILOTWAVE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool supported =
        __builtin_cpu_supports("avx2") != 0 && __builtin_cpu_supports("fma") != 0;
    return supported;
#else
    return false;
#endif
}

namespace {

Level detect_level() { return avx2_supported() ? Level::Avx2 : Level::Scalar; }

}  // namespace

Level active_level() {
    static const Level level = detect_level();
    return level;
}

std::string_view level_name(Level level) {
    switch (level) {
        case Level::Scalar:
            return "scalar";
        case Level::Avx2:
            return "avx2";
    }
    return "unknown";
}

#if !defined(PILOTWAVE_HAVE_AVX2)
// Keeps the symbol available on targets built without the AVX2 translation unit.
ChirpSums chirp_sums_avx2(SampleView f, const ChirpGrid& grid) {
    return chirp_sums_scalar(f, grid);
}
#endif

ChirpSums chirp_sums(SampleView f, const ChirpGrid& grid) {
#if defined(PILOTWAVE_HAVE_AVX2)
    if (active_level() == Level::Avx2) {
        return chirp_sums_avx2(f, grid);
    }
#endif
    return chirp_sums_scalar(f, grid);
}

}  // namespace pilotwave::simd
