#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace stopgame::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ seeded from (seed, stream) through a splitmix64 chain.
/// Bit-stable across platforms, so fixed seeds reproduce exactly.
class Xoshiro256 {
public:
    Xoshiro256(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t x = seed;
        x ^= 0x9e3779b97f4a7c15ULL * (stream + 1);
        for (auto& w : s_) w = splitmix64(x);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on (0,1]; never returns 0, safe for log().
    double uniform_pos() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1p-53;
    }

    /// Uniform on [0,1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }
    std::array<std::uint64_t, 4> s_{};
};

/// Standard normals by Box-Muller, pair-cached.
class NormalSampler {
public:
    NormalSampler(std::uint64_t seed, std::uint64_t stream) : gen_(seed, stream) {}

    double operator()() {
        if (have_) {
            have_ = false;
            return cached_;
        }
        const double u1 = gen_.uniform_pos();
        const double u2 = gen_.uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        cached_ = rad * std::sin(ang);
        have_ = true;
        return rad * std::cos(ang);
    }

private:
    Xoshiro256 gen_;
    double cached_{0.0};
    bool have_{false};
};

/// Stream ids: per-path state increments and per-path game randomization
/// (theta and U draws) are kept on separate substreams so estimator modes
/// that skip the game draws still see identical state paths.
inline std::uint64_t path_stream(std::uint64_t path_index) { return 2 * path_index; }
inline std::uint64_t game_stream(std::uint64_t path_index) { return 2 * path_index + 1; }

} // namespace stopgame::rng
