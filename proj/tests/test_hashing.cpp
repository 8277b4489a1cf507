// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <map>

#include "sketchcp/hashing.hpp"

using namespace sketchcp;

namespace {

// Reference evaluation in 128-bit arithmetic: no modular reduction until the
// very end of each Horner step can overflow.
std::uint32_t horner_reference(const std::vector<std::uint64_t>& coeffs, std::uint64_t i,
                               std::uint32_t b) {
    unsigned __int128 acc = 0;
    for (std::size_t d = coeffs.size(); d-- > 0;) {
        acc = acc * (i % kHashPrime) + coeffs[d];
        acc %= kHashPrime;
    }
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(acc) % b);
}

}  // namespace

TEST_CASE("determinism: same seed gives the same function") {
    PolyHash h1 = PolyHash::from_seed(2, 16, 7);
    PolyHash h2 = PolyHash::from_seed(2, 16, 7);
    for (std::uint64_t i = 0; i < 1000000; i += 13) CHECK(h1.eval(i) == h2.eval(i));
    PolyHash h3 = PolyHash::from_seed(2, 16, 8);
    bool any_diff = false;
    for (std::uint64_t i = 0; i < 1000 && !any_diff; ++i) any_diff = h1.eval(i) != h3.eval(i);
    CHECK(any_diff);
}

TEST_CASE("range safety and parameter validation") {
    PolyHash h = PolyHash::from_seed(6, 37, 99);
    for (std::uint64_t i = 0; i < 5000; ++i) CHECK(h.eval(i) < 37);
    CHECK_THROWS_AS(PolyHash::from_seed(2, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(PolyHash::from_seed(0, 8, 0), std::invalid_argument);
    CHECK_THROWS_AS(PolyHash::from_seed(9, 8, 0), std::invalid_argument);
}

TEST_CASE("constant polynomial maps everything to c0 mod b") {
    PolyHash h = PolyHash::from_coefficients({5}, 4);
    for (std::uint64_t i = 0; i < 100; ++i) CHECK(h.eval(i) == 1);
}

TEST_CASE("identity polynomial is i mod b") {
    PolyHash h = PolyHash::from_coefficients({0, 1}, 8);
    for (std::uint64_t i = 0; i < 4096; ++i) CHECK(h.eval(i) == i % 8);
    CHECK(h.eval(kHashPrime - 1) == (kHashPrime - 1) % 8);
}

TEST_CASE("degree-5 hash matches the wide-integer reference, frozen values") {
    PolyHash h = PolyHash::from_seed(6, 1024, 42);
    // Captured from the reference evaluation; pins the coefficient-draw
    // stream and the double reduction.
    const std::array<std::uint32_t, 10> frozen = {226, 246, 249, 521, 778,
                                                  980, 161, 387, 1016, 518};
    for (std::uint64_t i = 0; i < 10; ++i) {
        CHECK(h.eval(i) == horner_reference(h.coefficients(), i, 1024));
        CHECK(h.eval(i) == frozen[i]);
    }
}

TEST_CASE("monte carlo uniformity of a 6-wise draw") {
    const std::uint32_t b = 16;
    const int draws = 100000;
    const std::uint64_t x = 12345;
    const std::uint32_t target = 3;
    int hits = 0;
    for (int s = 0; s < draws; ++s)
        if (PolyHash::from_seed(6, b, 1000 + s).eval(x) == target) ++hits;
    double p = 1.0 / b;
    double se = std::sqrt(p * (1 - p) / draws);
    double mod_bias = static_cast<double>(b) / static_cast<double>(kHashPrime);
    CHECK(std::abs(hits / static_cast<double>(draws) - p) < 3 * se + mod_bias);
}

TEST_CASE("monte carlo pairwise independence") {
    const std::uint32_t b = 8;
    const int draws = 100000;
    const std::uint64_t x = 17, y = 9001;
    const std::uint32_t s_target = 2, t_target = 5;
    int hits = 0;
    for (int s = 0; s < draws; ++s) {
        PolyHash h = PolyHash::from_seed(2, b, 50000 + s);
        if (h.eval(x) == s_target && h.eval(y) == t_target) ++hits;
    }
    double p = 1.0 / (static_cast<double>(b) * b);
    double se = std::sqrt(p * (1 - p) / draws);
    CHECK(std::abs(hits / static_cast<double>(draws) - p) < 3 * se + 2.0 / kHashPrime);
}

TEST_CASE("complex4 signs are unit 4th roots") {
    SignGenerator s(SignMode::kComplex4, 5);
    for (std::uint64_t i = 0; i < 2000; ++i) {
        auto v = s.value(i);
        CHECK(std::abs(std::abs(v) - 1.0) < 1e-15);
        auto v4 = v * v * v * v;
        CHECK(v4.real() == doctest::Approx(1.0));
        CHECK(v4.imag() == doctest::Approx(0.0));
    }
}

TEST_CASE("complex4 powers have vanishing mean over generator draws") {
    const int draws = 100000;
    const std::uint64_t x = 77;
    for (int p = 1; p <= 3; ++p) {
        std::complex<double> mean = 0;
        for (int s = 0; s < draws; ++s) {
            SignGenerator g(SignMode::kComplex4, 90000 + s);
            std::complex<double> v = g.value(x);
            std::complex<double> vp = v;
            for (int q = 1; q < p; ++q) vp *= v;
            mean += vp;
        }
        mean /= draws;
        CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(draws)));
    }
}

TEST_CASE("rademacher signs have vanishing mean") {
    const int draws = 100000;
    double mean = 0;
    for (int s = 0; s < draws; ++s) mean += SignGenerator(SignMode::kRademacher, s).value(31).real();
    mean /= draws;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("symmetric bucket is permutation invariant") {
    PolyHash h = PolyHash::from_seed(6, 64, 1234);
    CHECK(symmetric_bucket(h, 2, 5, 9) == symmetric_bucket(h, 9, 2, 5));
    CHECK(symmetric_bucket(h, 2, 5, 9) == symmetric_bucket(h, 5, 9, 2));
    CHECK(symmetric_bucket(h, 2, 2, 9) == symmetric_bucket(h, 9, 2, 2));
}

TEST_CASE("symmetric bucket arithmetic with the identity hash") {
    PolyHash h = PolyHash::from_coefficients({0, 1}, 10);
    CHECK(symmetric_bucket(h, 1, 2, 3) == 6);
    CHECK(symmetric_bucket(h, 4, 4, 4) == 2);
}

TEST_CASE("monte carlo 2-wise independence of the triple bucket map") {
    const std::uint32_t b = 8;
    const int draws = 100000;
    int hits = 0;
    const std::uint32_t s_target = 1, t_target = 6;
    for (int s = 0; s < draws; ++s) {
        PolyHash h = PolyHash::from_seed(6, b, 777777 + s);
        if (symmetric_bucket(h, 0, 3, 11) == s_target && symmetric_bucket(h, 1, 2, 7) == t_target)
            ++hits;
    }
    double p = 1.0 / (static_cast<double>(b) * b);
    double se = std::sqrt(p * (1 - p) / draws);
    CHECK(std::abs(hits / static_cast<double>(draws) - p) < 3 * se + 2.0 / kHashPrime);
}

TEST_CASE("chi-square 2-wise test of the triple bucket map at significance 0.01") {
    const std::uint32_t b = 8;
    const int draws = 100000;
    std::array<int, 64> counts{};
    for (int s = 0; s < draws; ++s) {
        PolyHash h = PolyHash::from_seed(6, b, 31337 + s);
        std::uint32_t u = symmetric_bucket(h, 4, 9, 23);
        std::uint32_t v = symmetric_bucket(h, 5, 9, 40);
        ++counts[u * b + v];
    }
    double expect = draws / 64.0;
    double stat = 0;
    for (int c : counts) stat += (c - expect) * (c - expect) / expect;
    // chi-square critical value, df = 63, alpha = 0.01
    CHECK(stat < 92.01);
}
