#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace funcmod {

uint64_t fnv1a64(std::string_view s);

// Counter-based generator. Every draw is a pure function of
// (seed, stream, counter), so per-row draws are order-independent and
// independent streams can be derived without shared state.
class Rng {
public:
    explicit Rng(uint64_t seed, uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    Rng split(std::string_view label) const;
    Rng split(uint64_t child) const;

    uint64_t bits(uint64_t counter) const;
    double uniform(uint64_t counter) const; // [0, 1)
    double uniform(uint64_t counter, double lo, double hi) const;
    // Inclusive bounds. Modulo mapping; bias is negligible for small spans.
    int64_t uniform_int(uint64_t counter, int64_t lo, int64_t hi) const;
    double normal(uint64_t counter) const; // N(0, 1)
    double normal(uint64_t counter, double mean, double sd) const;

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

private:
    uint64_t seed_;
    uint64_t stream_;
};

// Sequential facade over a stream, for shuffles and ordered draw sequences.
class RngSequence {
public:
    explicit RngSequence(Rng rng) : rng_(rng) {}

    uint64_t bits() { return rng_.bits(next_++); }
    double uniform() { return rng_.uniform(next_++); }
    double normal() { return rng_.normal(next_++); }
    int64_t uniform_int(int64_t lo, int64_t hi) { return rng_.uniform_int(next_++, lo, hi); }

private:
    Rng rng_;
    uint64_t next_ = 0;
};

// Fisher-Yates with draws taken from the sequence.
template <typename T>
void shuffle(std::vector<T>& v, RngSequence& rs) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rs.uniform_int(0, static_cast<int64_t>(i) - 1));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace funcmod
