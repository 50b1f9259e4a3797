#include "funcmod/rng.hpp"

#include <cmath>

namespace funcmod {

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

// splitmix64 finalizer
uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr uint64_t kNormalTag = 0x6e6f726d616c0001ULL;

} // namespace

Rng Rng::split(std::string_view label) const {
    return Rng(seed_, mix(stream_ ^ fnv1a64(label)));
}

Rng Rng::split(uint64_t child) const {
    return Rng(seed_, mix(mix(stream_) ^ child));
}

uint64_t Rng::bits(uint64_t counter) const {
    return mix(mix(mix(seed_) ^ stream_) ^ counter);
}

double Rng::uniform(uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double Rng::uniform(uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
}

int64_t Rng::uniform_int(uint64_t counter, int64_t lo, int64_t hi) const {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(bits(counter) % span);
}

double Rng::normal(uint64_t counter) const {
    // Box-Muller on a tagged substream so counters never collide with
    // uniform draws taken from the same stream.
    Rng sub(seed_, mix(stream_ ^ kNormalTag));
    double u1 = (static_cast<double>(sub.bits(2 * counter) >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
    double u2 = sub.uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::normal(uint64_t counter, double mean, double sd) const {
    return mean + sd * normal(counter);
}

} // namespace funcmod
