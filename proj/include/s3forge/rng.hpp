#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace s3forge {

// splitmix64 step; also used to fan one global seed out into per-stage
// sub-seeds so pipeline stages stay independently reproducible.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x00000100000001b3ull;
    }
    return h;
}

// Stage seed = splitmix of (seed ^ hash(tag)).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t s = seed ^ fnv1a64(tag);
    return splitmix64(s);
}

// Self-contained generator. std::uniform_*_distribution output is
// implementation-defined, so all sampling is hand-rolled to keep generated
// artifacts byte-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // decorrelate trivially related seeds
        next_u64();
        next_u64();
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [lo, hi] inclusive
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        // multiply-shift bounded draw; bias is < 2^-64 * span, irrelevant here
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * span;
        return lo + static_cast<std::int64_t>(m >> 64);
    }

    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
    }

    bool chance(double p) { return next_double() < p; }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[index(v.size())];
    }

    // Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    Rng fork(std::string_view tag) { return Rng(derive_seed(next_u64(), tag)); }

private:
    std::uint64_t state_;
};

}  // namespace s3forge
