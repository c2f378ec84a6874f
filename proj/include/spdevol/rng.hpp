#pragma once

#include <array>
#include <cstdint>

#include "spdevol/numeric.hpp"

namespace spdevol {

/// SplitMix64 finalizer; used to derive stream keys and replication seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for sub-task `index` of a master seed. Splitting by index keeps the
/// assignment of work to threads irrelevant for the generated numbers.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) ^ mix64(index ^ 0x5851F42D4C957F2DULL));
}

/// Philox4x64-10 counter-based generator. A block is a pure function of
/// (key, counter), so any draw can be produced at any time on any thread.
struct Philox4x64 {
    std::uint64_t key0;
    std::uint64_t key1;

    static constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;

    std::array<std::uint64_t, 4> block(std::uint64_t counter) const {
        std::uint64_t c0 = counter, c1 = 0, c2 = 0, c3 = 0;
        std::uint64_t k0 = key0, k1 = key1;
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 p0 = static_cast<unsigned __int128>(M0) * c0;
            const unsigned __int128 p1 = static_cast<unsigned __int128>(M1) * c2;
            const std::uint64_t lo0 = static_cast<std::uint64_t>(p0);
            const std::uint64_t hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const std::uint64_t lo1 = static_cast<std::uint64_t>(p1);
            const std::uint64_t hi1 = static_cast<std::uint64_t>(p1 >> 64);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += W0;
            k1 += W1;
        }
        return {c0, c1, c2, c3};
    }
};

inline double uint64_to_unit(std::uint64_t x) {
    // 53-bit mantissa, offset keeps the value strictly inside (0, 1)
    return (static_cast<double>(x >> 11) + 0.5) * 0x1p-53;
}

/// Stream of standard normals keyed by (seed, stream_id). Draw i is a pure
/// function of (seed, stream_id, i): the inverse normal CDF applied to lane
/// i%4 of Philox block i/4.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream_id)
        : gen_{seed, stream_id} {}

    double next() {
        if (lane_ == 4) {
            refill();
            lane_ = 0;
        }
        return buffer_[lane_++];
    }

private:
    void refill() {
        const auto words = gen_.block(counter_++);
        for (int i = 0; i < 4; ++i)
            buffer_[i] = normal_quantile(uint64_to_unit(words[i]));
    }

    Philox4x64 gen_;
    std::uint64_t counter_ = 0;
    std::array<double, 4> buffer_{};
    int lane_ = 4;
};

} // namespace spdevol
