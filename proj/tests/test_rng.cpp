#include <cmath>
#include <set>

#include "doctest.h"

#include "csq/rng.hpp"

using namespace csq;

TEST_CASE("same seed, tag and index reproduce the stream bit for bit") {
    RngStream a(RngSeed{42}, "acq", 3);
    RngStream b(RngSeed{42}, "acq", 3);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("streams differ across seed, tag and index") {
    std::set<std::uint64_t> firsts;
    firsts.insert(RngStream(RngSeed{1}, "acq", 0).next_u64());
    firsts.insert(RngStream(RngSeed{2}, "acq", 0).next_u64());
    firsts.insert(RngStream(RngSeed{1}, "noise", 0).next_u64());
    firsts.insert(RngStream(RngSeed{1}, "acq", 1).next_u64());
    CHECK(firsts.size() == 4);
}

TEST_CASE("uniform01 stays in [0,1) and is roughly uniform") {
    RngStream rng(RngSeed{7}, "test");
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("uniform_below covers the full range without bias") {
    RngStream rng(RngSeed{9}, "test");
    int counts[5] = {};
    const int n = 50000;
    for (int i = 0; i < n; ++i) ++counts[rng.uniform_below(5)];
    for (int c = 0; c < 5; ++c) {
        CHECK(counts[c] > n / 5 - 600);
        CHECK(counts[c] < n / 5 + 600);
    }
}

TEST_CASE("normal has near zero mean and unit variance") {
    RngStream rng(RngSeed{11}, "test");
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(sum / n == doctest::Approx(0.0).epsilon(1.0));
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}
