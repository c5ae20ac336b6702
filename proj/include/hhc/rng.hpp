#ifndef HHC_RNG_HPP
#define HHC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hhc {

// Philox-4x32-10 counter-based generator (Salmon et al. 2011 constants).
// Streams are cheap value types: a (key, stream) pair addresses an
// independent substream, and every draw advances a 64-bit counter, so
// replications and households can own disjoint streams regardless of
// thread scheduling.
namespace philox {

struct Block {
    uint32_t v[4];
};

inline uint32_t mulhi(uint32_t a, uint32_t b, uint32_t* lo) {
    uint64_t p = static_cast<uint64_t>(a) * b;
    *lo = static_cast<uint32_t>(p);
    return static_cast<uint32_t>(p >> 32);
}

inline Block round10(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                     uint32_t k0, uint32_t k1) {
    constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
        uint32_t lo0, lo1;
        uint32_t hi0 = mulhi(M0, c0, &lo0);
        uint32_t hi1 = mulhi(M1, c2, &lo1);
        uint32_t n0 = hi1 ^ c1 ^ k0;
        uint32_t n1 = lo1;
        uint32_t n2 = hi0 ^ c3 ^ k1;
        uint32_t n3 = lo0;
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        k0 += W0; k1 += W1;
    }
    return Block{{c0, c1, c2, c3}};
}

} // namespace philox

inline uint64_t mix64(uint64_t z) {
    // splitmix64 finalizer; used to derive child stream ids
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream), counter_(0) {}

    // Deterministic child stream; children of distinct ids never collide in
    // practice (128-bit counter space keyed by mixed ids).
    RngStream substream(uint64_t child) const {
        return RngStream(seed_, mix64(stream_ ^ mix64(child + 0x1234567890ABCDEFull)));
    }

    uint64_t next_u64() {
        uint64_t c = counter_++;
        philox::Block b = philox::round10(
            static_cast<uint32_t>(c), static_cast<uint32_t>(c >> 32),
            static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32),
            static_cast<uint32_t>(seed_), static_cast<uint32_t>(seed_ >> 32));
        return (static_cast<uint64_t>(b.v[0]) << 32) | b.v[1];
    }

    // uniform on [0,1) with 53 random bits
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // integer in [0, n)
    uint64_t uniform_index(uint64_t n) {
        // multiply-shift; bias is negligible for n << 2^64
        unsigned __int128 p = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<uint64_t>(p >> 64);
    }

    long uniform_int(long lo, long hi_inclusive) {
        return lo + static_cast<long>(uniform_index(static_cast<uint64_t>(hi_inclusive - lo + 1)));
    }

    // Box-Muller; consumes two uniforms per call, no cached state
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double lognormal(double mean_log, double sd_log) { return std::exp(normal(mean_log, sd_log)); }

    bool bernoulli(double p) { return uniform01() < p; }

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

private:
    uint64_t seed_;
    uint64_t stream_;
    uint64_t counter_;
};

} // namespace hhc

#endif
