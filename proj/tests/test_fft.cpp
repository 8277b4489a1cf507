// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "sketchcp/fft.hpp"
#include "sketchcp/rng.hpp"

using namespace sketchcp;

namespace {

// Quadratic-time reference convolution.
cvec convolve_direct(const cvec& x, const cvec& y) {
    const std::size_t b = x.size();
    cvec z(b, {0.0, 0.0});
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < b; ++j) z[(i + j) % b] += x[i] * y[j];
    return z;
}

cvec random_cvec(std::size_t b, Rng& rng) {
    cvec v(b);
    for (auto& z : v) z = {rng.gaussian(), rng.gaussian()};
    return v;
}

double max_abs_diff(const cvec& a, const cvec& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("inverse of forward is identity") {
    Rng rng(7);
    for (std::size_t b : {2u, 16u, 64u, 1024u}) {
        cvec x = random_cvec(b, rng);
        cvec y = x;
        fft::forward_inplace(y);
        fft::inverse_inplace(y);
        CHECK(max_abs_diff(x, y) < 1e-12);
    }
}

TEST_CASE("convolving with a delta at zero is the identity") {
    Rng rng(3);
    cvec x = random_cvec(32, rng);
    cvec delta(32, {0.0, 0.0});
    delta[0] = {1.0, 0.0};
    cvec z = fft::circular_convolve(x, delta);
    CHECK(max_abs_diff(x, z) < 1e-12);
}

TEST_CASE("b=4 worked example: shift-and-add") {
    cvec x = {{1, 0}, {2, 0}, {3, 0}, {4, 0}};
    cvec y = {{1, 0}, {0, 0}, {0, 0}, {1, 0}};
    cvec expect = convolve_direct(x, y);
    // x + rotate-right-by-1(x) = (5, 3, 5, 7)
    CHECK(expect[0].real() == doctest::Approx(5.0));
    CHECK(expect[1].real() == doctest::Approx(3.0));
    CHECK(expect[2].real() == doctest::Approx(5.0));
    CHECK(expect[3].real() == doctest::Approx(7.0));
    cvec z = fft::circular_convolve(x, y);
    CHECK(max_abs_diff(z, expect) < 1e-12);
}

TEST_CASE("random b=64 pair matches the quadratic reference") {
    Rng rng(11);
    cvec x = random_cvec(64, rng);
    cvec y = random_cvec(64, rng);
    CHECK(max_abs_diff(fft::circular_convolve(x, y), convolve_direct(x, y)) < 1e-10);
}

TEST_CASE("non-power-of-two lengths are rejected") {
    cvec x(12, {1.0, 0.0});
    CHECK_THROWS_AS(fft::forward_inplace(x), std::invalid_argument);
    cvec y(12, {1.0, 0.0});
    CHECK_THROWS_AS(fft::circular_convolve(x, y), std::invalid_argument);
}

TEST_CASE("transform counter advances per call") {
    cvec x(16, {1.0, 0.0});
    auto before = fft::transform_count();
    fft::forward_inplace(x);
    fft::inverse_inplace(x);
    CHECK(fft::transform_count() == before + 2);
}
