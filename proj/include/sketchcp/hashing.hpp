// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "sketchcp/rng.hpp"

namespace sketchcp {

/// Modulus of the polynomial hash family.
inline constexpr std::uint64_t kHashPrime = (std::uint64_t{1} << 31) - 1;

/// k-wise independent hash into [0, b): a degree-(k-1) polynomial over the
/// Mersenne prime 2^31 - 1, reduced mod p then mod b. The double reduction
/// biases bucket probabilities by at most b/p.
class PolyHash {
public:
    PolyHash() = default;

    /// Coefficients drawn uniformly from [0, p); the leading one is unrestricted.
    static PolyHash from_seed(int independence, std::uint32_t b, std::uint64_t seed);

    /// Fixture / deserialization entry: takes coefficients verbatim
    /// (constant term first).
    static PolyHash from_coefficients(std::vector<std::uint64_t> coeffs, std::uint32_t b);

    std::uint32_t eval(std::uint64_t i) const {
        std::uint64_t acc = 0;
        // Horner; every intermediate stays below 2^62.
        for (std::size_t d = coeffs_.size(); d-- > 0;) acc = (acc * (i % kHashPrime) + coeffs_[d]) % kHashPrime;
        return static_cast<std::uint32_t>(acc % b_);
    }

    std::uint32_t buckets() const { return b_; }
    int independence() const { return static_cast<int>(coeffs_.size()); }
    const std::vector<std::uint64_t>& coefficients() const { return coeffs_; }

private:
    std::vector<std::uint64_t> coeffs_;  // constant term first
    std::uint32_t b_ = 2;
};

/// Bucket of an unordered triple: (h(i) + h(j) + h(k)) mod b.
inline std::uint32_t symmetric_bucket(const PolyHash& h, std::uint64_t i, std::uint64_t j,
                                      std::uint64_t k) {
    std::uint64_t s = std::uint64_t{h.eval(i)} + h.eval(j) + h.eval(k);
    return static_cast<std::uint32_t>(s % h.buckets());
}

enum class SignMode { kRademacher, kComplex4 };

/// Unit-modulus sign stream: omega^(e(i)) with omega = -1 (rademacher, m=2)
/// or omega = i (complex4, m=4). e is a 6-wise independent PolyHash into m
/// buckets, so sign products over index tuples keep the independence needed
/// by the colliding-hash argument.
class SignGenerator {
public:
    SignGenerator() = default;
    SignGenerator(SignMode mode, std::uint64_t seed, int independence = 6);
    static SignGenerator from_backing(SignMode mode, PolyHash backing);

    SignMode mode() const { return mode_; }
    int modulus() const { return mode_ == SignMode::kRademacher ? 2 : 4; }

    /// Exponent e(i) in [0, m).
    std::uint32_t exponent(std::uint64_t i) const { return backing_.eval(i); }

    std::complex<double> value(std::uint64_t i) const { return root(exponent(i)); }

    /// omega^e for this generator's omega.
    std::complex<double> root(std::uint32_t e) const {
        if (mode_ == SignMode::kRademacher) return {(e & 1) ? -1.0 : 1.0, 0.0};
        switch (e & 3) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }

    const PolyHash& backing() const { return backing_; }

private:
    SignMode mode_ = SignMode::kRademacher;
    PolyHash backing_;
};

}  // namespace sketchcp
