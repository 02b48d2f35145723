#ifndef SILTOK_RNG_HPP
#define SILTOK_RNG_HPP

#include <cstdint>

namespace siltok {

/// splitmix64 finalizer (Steele, Lea & Flood; the constants are the published
/// ones). Mixes a 64-bit value into a well-distributed 64-bit value.
inline uint64_t splitmix64_mix(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Sequential splitmix64 stream.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    /// Uniform value in [0, bound) via rejection sampling; bound must be > 0.
    uint64_t next_below(uint64_t bound) {
        const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % bound);
        uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

private:
    uint64_t state_;
};

} // namespace siltok

#endif // SILTOK_RNG_HPP
