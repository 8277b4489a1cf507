// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "sketchcp/fft.hpp"
#include "sketchcp/hashing.hpp"
#include "sketchcp/tensor.hpp"

namespace sketchcp {

/// Count sketch of a vector: data[t] = sum_{h(i)=t} sign(i) u_i.
struct CountSketch {
    cvec data;
    int slot = 0;  // which hash slot (1..3) produced it, 0 for standalone
};

CountSketch sketch_vector(const Eigen::VectorXd& u, const PolyHash& h, const SignGenerator& s);

enum class SketchMode : std::uint8_t { kAsym = 0, kSym = 1 };

/// B independent tensor sketches with three per-mode hash/sign pairs each.
/// The bucket of entry (i,j,k) is (h1(i)+h2(j)+h3(k)) mod b and the sign is
/// xi1(i) xi2(j) xi3(k).
class AsymTensorSketchSet {
public:
    struct Replicate {
        std::array<PolyHash, 3> h;
        std::array<SignGenerator, 3> xi;
        // Per-index tables, filled once: bucket[s][i] = h_s(i), sign[s][i] = xi_s(i).
        std::array<std::vector<std::uint32_t>, 3> bucket;
        std::array<std::vector<double>, 3> sign;
        cvec data;
    };

    AsymTensorSketchSet() = default;
    AsymTensorSketchSet(int n, std::uint32_t b, int B, std::uint64_t master_seed);

    int n() const { return n_; }
    std::uint32_t b() const { return b_; }
    int replicates() const { return B_; }
    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t version() const { return version_; }
    const Replicate& replicate(int m) const { return reps_[m]; }
    Replicate& mutable_replicate(int m) {
        ++version_;
        return reps_[m];
    }

    /// O(n^3) accumulation of a dense tensor into every replicate.
    void accumulate_dense(const DenseTensor3& T);

    /// Sketch of u (x) v (x) w in one replicate, via the convolution of the
    /// three slot count sketches in Fourier space.
    cvec rank1_sketch(int m, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                      const Eigen::VectorXd& w) const;

    /// data += alpha * rank1 in every replicate.
    void add_rank1(double alpha, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                   const Eigen::VectorXd& w);

    /// data += sum_i a_i * rank1(u_i, v_i, w_i).
    void accumulate_factored(const FactoredTensor& F);

    /// Median over replicates of Re(xi1 xi2 xi3 data[H(i,j,k)]).
    double recover_entry(int i, int j, int k) const;

    void save(const std::string& path) const;
    static AsymTensorSketchSet load(const std::string& path);

private:
    int n_ = 0;
    std::uint32_t b_ = 2;
    int B_ = 0;
    std::uint64_t seed_ = 0;
    std::uint64_t version_ = 0;
    std::vector<Replicate> reps_;

    friend AsymTensorSketchSet load_asym_sketch_stream(std::istream&);
};

/// Colliding-hash sketch for symmetric tensors: one 6-wise hash and one
/// complex 4th-root sign stream per replicate; all permutations of a triple
/// land in the same bucket with the same sign.
class SymTensorSketchSet {
public:
    struct Replicate {
        PolyHash h;
        SignGenerator sigma;  // complex4
        std::vector<std::uint32_t> bucket1, bucket2, bucket3;  // h, 2h mod b, 3h mod b
        std::vector<std::uint8_t> sexp;                        // sigma exponent in [0,4)
        cvec data;
    };

    SymTensorSketchSet() = default;
    SymTensorSketchSet(int n, std::uint32_t b, int B, std::uint64_t master_seed);

    int n() const { return n_; }
    std::uint32_t b() const { return b_; }
    int replicates() const { return B_; }
    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t version() const { return version_; }
    const Replicate& replicate(int m) const { return reps_[m]; }
    Replicate& mutable_replicate(int m) {
        ++version_;
        return reps_[m];
    }

    /// Accumulates a symmetric tensor by iterating sorted triples i<=j<=k with
    /// permutation multiplicities 1/3/6. Verifies symmetry to 1e-9 unless the
    /// caller declares it.
    void accumulate_dense(const DenseTensor3& T, bool assume_symmetric = false);

    /// data += alpha * (full symmetric sketch of u^(x)3) in every replicate,
    /// computed as the triple self-convolution of the count sketch of u.
    void add_scaled_rank1(const Eigen::VectorXd& u, double alpha);

    /// Median over replicates of Re((1/kappa) conj(sigma_i sigma_j sigma_k) data[H~]).
    double recover_entry(int i, int j, int k) const;

    void save(const std::string& path) const;
    static SymTensorSketchSet load(const std::string& path);

private:
    int n_ = 0;
    std::uint32_t b_ = 2;
    int B_ = 0;
    std::uint64_t seed_ = 0;
    std::uint64_t version_ = 0;
    std::vector<Replicate> reps_;

    friend SymTensorSketchSet load_sym_sketch_stream(std::istream&);
};

struct SymAuxSketches {
    cvec s1;  // s[h(i)]    += sigma(i)   u_i
    cvec s2;  // s[2h(i)%b] += sigma(i)^2 u_i^2
    cvec s3;  // s[3h(i)%b] += sigma(i)^3 u_i^3
};

SymAuxSketches sym_aux_sketches(const SymTensorSketchSet::Replicate& rep, std::uint32_t b,
                                const Eigen::VectorXd& u);

/// Sketch of the upper-triangular truncation of u^(x)3 in one replicate:
/// (1/6) s1*s1*s1 + (1/2) s2*s1 + (1/3) s3.
cvec sketch_rank1_sym(const SymTensorSketchSet& set, int m, const Eigen::VectorXd& u);

SketchMode peek_sketch_mode(const std::string& path);

}  // namespace sketchcp
