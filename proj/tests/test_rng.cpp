#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "funcmod/rng.hpp"

using namespace funcmod;

TEST_CASE("draws are pure functions of (seed, stream, counter)") {
    Rng a(42), b(42);
    CHECK(a.bits(7) == b.bits(7));
    CHECK(a.uniform(123) == b.uniform(123));
    CHECK(Rng(42).split("x").bits(0) == Rng(42).split("x").bits(0));
    CHECK(Rng(42).bits(0) != Rng(43).bits(0));
    CHECK(Rng(42).split("x").bits(0) != Rng(42).split("y").bits(0));
}

TEST_CASE("counter draws are order independent") {
    Rng r(7);
    double later = r.uniform(1000);
    double early = r.uniform(1);
    CHECK(later == r.uniform(1000));
    CHECK(early == r.uniform(1));
}

TEST_CASE("uniform stays in [0,1) and has a sane mean") {
    Rng r(3);
    double sum = 0;
    for (int i = 0; i < 20000; ++i) {
        double u = r.uniform(i);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / 20000 - 0.5) < 0.01);
}

TEST_CASE("uniform_int covers the whole inclusive range") {
    Rng r(11);
    std::set<int64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        int64_t v = r.uniform_int(i, -2, 2);
        CHECK(v >= -2);
        CHECK(v <= 2);
        seen.insert(v);
    }
    CHECK(seen.size() == 5);
}

TEST_CASE("normal draws have unit variance") {
    Rng r(5);
    double sum = 0, sum2 = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        double z = r.normal(i);
        sum += z;
        sum2 += z * z;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("shuffle is deterministic per stream") {
    std::vector<int> v1{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> v2 = v1;
    RngSequence s1(Rng(9).split("shuffle"));
    RngSequence s2(Rng(9).split("shuffle"));
    shuffle(v1, s1);
    shuffle(v2, s2);
    CHECK(v1 == v2);
    std::vector<int> sorted = v1;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
}
