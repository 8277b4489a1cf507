// SPDX-License-Identifier: Apache-2.0
#include "sketchcp/hashing.hpp"

#include <stdexcept>

namespace sketchcp {

PolyHash PolyHash::from_seed(int independence, std::uint32_t b, std::uint64_t seed) {
    if (independence < 1 || independence > 8)
        throw std::invalid_argument("PolyHash: independence must be in [1, 8]");
    if (b < 2) throw std::invalid_argument("PolyHash: need at least 2 buckets");
    Rng rng(seed);
    std::vector<std::uint64_t> coeffs(static_cast<std::size_t>(independence));
    for (auto& c : coeffs) c = rng.uniform_below(kHashPrime);
    return from_coefficients(std::move(coeffs), b);
}

PolyHash PolyHash::from_coefficients(std::vector<std::uint64_t> coeffs, std::uint32_t b) {
    if (coeffs.empty()) throw std::invalid_argument("PolyHash: no coefficients");
    if (b < 2) throw std::invalid_argument("PolyHash: need at least 2 buckets");
    for (auto c : coeffs)
        if (c >= kHashPrime) throw std::invalid_argument("PolyHash: coefficient out of range");
    PolyHash h;
    h.coeffs_ = std::move(coeffs);
    h.b_ = b;
    return h;
}

SignGenerator::SignGenerator(SignMode mode, std::uint64_t seed, int independence) : mode_(mode) {
    backing_ = PolyHash::from_seed(independence, mode == SignMode::kRademacher ? 2 : 4, seed);
}

SignGenerator SignGenerator::from_backing(SignMode mode, PolyHash backing) {
    std::uint32_t m = mode == SignMode::kRademacher ? 2 : 4;
    if (backing.buckets() != m)
        throw std::invalid_argument("SignGenerator: backing hash bucket count must equal the sign modulus");
    SignGenerator s;
    s.mode_ = mode;
    s.backing_ = std::move(backing);
    return s;
}

}  // namespace sketchcp
