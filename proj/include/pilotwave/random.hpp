#pragma once

#include <cstdint>
#include <random>

namespace pilotwave {

/// Reproducible random stream.
///
/// Engine: std::mt19937_64 seeded through std::seed_seq with the four 32-bit
/// halves of (master_seed, stream_id).  Both the engine and seed_seq are fully
/// specified by the standard, and the conversions below avoid the
/// implementation-defined std:: distributions, so a (seed, id) pair replays
/// bit-identically on every conforming platform.
///
/// A stream is single-owner; give every worker or trajectory its own.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_id);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1); never returns exactly 0.
    double uniform_open();
    /// Standard normal via the Box-Muller transform (pairs are cached).
    double normal();

    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const { return stream_id_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

[[nodiscard]] RandomStream seeded_stream(std::uint64_t master_seed, std::uint64_t stream_id);

}  // namespace pilotwave
