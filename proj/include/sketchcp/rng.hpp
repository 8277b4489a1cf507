// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace sketchcp {

// Seed-splitting rule shared by every randomized component: one master seed
// reproduces an entire run. Derived seeds fold a purpose tag and up to two
// indices through SplitMix64 steps.
namespace seed_tag {
inline constexpr std::uint64_t kAsymBucketHash = 0x11;  // + replicate, slot
inline constexpr std::uint64_t kAsymSign = 0x12;        // + replicate, slot
inline constexpr std::uint64_t kSymBucketHash = 0x21;   // + replicate
inline constexpr std::uint64_t kSymSign = 0x22;         // + replicate
inline constexpr std::uint64_t kPowerInit = 0x31;       // + component, trajectory
inline constexpr std::uint64_t kAlsInit = 0x32;         // + factor index
inline constexpr std::uint64_t kSynthBasis = 0x41;
inline constexpr std::uint64_t kSynthNoise = 0x42;
inline constexpr std::uint64_t kLdaTopics = 0x51;
inline constexpr std::uint64_t kLdaDoc = 0x52;  // + document index
}  // namespace seed_tag

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t i0 = 0, std::uint64_t i1 = 0) {
    std::uint64_t s = master;
    std::uint64_t out = splitmix64_next(s);
    s ^= tag * 0xD6E8FEB86659FD93ull;
    out ^= splitmix64_next(s);
    s ^= i0 * 0xA5A5A5A5A5A5A5A5ull + 0x0123456789ABCDEFull;
    out ^= splitmix64_next(s);
    s ^= i1 * 0xC2B2AE3D27D4EB4Full + 0x9E3779B97F4A7C15ull;
    out ^= splitmix64_next(s);
    return out;
}

/// Deterministic random stream. std::mt19937_64 output is pinned by the
/// standard, and the distribution code below is ours, so sequences are
/// bit-identical across platforms and compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe as a log() argument.
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by rejection on the low bits.
    std::uint64_t uniform_below(std::uint64_t bound) {
        std::uint64_t mask = ~std::uint64_t{0};
        if (bound > 1) {
            unsigned bits = 64 - static_cast<unsigned>(__builtin_clzll(bound - 1));
            mask = (bits >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
        } else {
            return 0;
        }
        for (;;) {
            std::uint64_t x = engine_() & mask;
            if (x < bound) return x;
        }
    }

    /// Standard normal via Box-Muller (pair cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_open();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Eigen::VectorXd gaussian_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = gaussian();
        return v;
    }

    /// Uniform draw from the unit sphere (normalized Gaussian vector).
    Eigen::VectorXd unit_sphere(int n) {
        for (;;) {
            Eigen::VectorXd v = gaussian_vector(n);
            double nrm = v.norm();
            if (nrm > 1e-12) return v / nrm;
        }
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape) {
        if (shape < 1.0) {
            double u = uniform_open();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = gaussian();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform_open();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
        }
    }

    Eigen::VectorXd dirichlet(const Eigen::VectorXd& alpha) {
        Eigen::VectorXd g(alpha.size());
        for (int i = 0; i < alpha.size(); ++i) g[i] = gamma(alpha[i]);
        double s = g.sum();
        if (s <= 0.0) {
            g.setConstant(1.0 / static_cast<double>(alpha.size()));
            return g;
        }
        return g / s;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace sketchcp
