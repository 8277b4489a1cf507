// SPDX-License-Identifier: Apache-2.0
#include "sketchcp/sketch.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace sketchcp {

namespace {

void fill_asym_tables(AsymTensorSketchSet::Replicate& rep, int n) {
    for (int s = 0; s < 3; ++s) {
        rep.bucket[s].resize(n);
        rep.sign[s].resize(n);
        for (int i = 0; i < n; ++i) {
            rep.bucket[s][i] = rep.h[s].eval(i);
            rep.sign[s][i] = rep.xi[s].value(i).real();
        }
    }
}

void fill_sym_tables(SymTensorSketchSet::Replicate& rep, int n, std::uint32_t b) {
    rep.bucket1.resize(n);
    rep.bucket2.resize(n);
    rep.bucket3.resize(n);
    rep.sexp.resize(n);
    for (int i = 0; i < n; ++i) {
        std::uint32_t hi = rep.h.eval(i);
        rep.bucket1[i] = hi;
        rep.bucket2[i] = static_cast<std::uint32_t>((2ull * hi) % b);
        rep.bucket3[i] = static_cast<std::uint32_t>((3ull * hi) % b);
        rep.sexp[i] = static_cast<std::uint8_t>(rep.sigma.exponent(i));
    }
}

std::complex<double> root4(unsigned e) {
    switch (e & 3u) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// --- little-endian binary container ------------------------------------

constexpr char kMagic[8] = {'S', 'K', 'C', 'P', 'S', 'K', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    if (!is) throw FormatError("sketch file: truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(os, bits);
}

double get_f64(std::istream& is) {
    std::uint64_t bits = get_u64(is);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

void put_hash(std::ostream& os, const PolyHash& h) {
    put_u64(os, h.coefficients().size());
    for (auto c : h.coefficients()) put_u64(os, c);
}

PolyHash get_hash(std::istream& is, std::uint32_t b) {
    std::uint64_t count = get_u64(is);
    if (count == 0 || count > 16) throw FormatError("sketch file: bad hash coefficient count");
    std::vector<std::uint64_t> coeffs(count);
    for (auto& c : coeffs) c = get_u64(is);
    return PolyHash::from_coefficients(std::move(coeffs), b);
}

void put_data(std::ostream& os, const cvec& data) {
    for (const auto& z : data) {
        put_f64(os, z.real());
        put_f64(os, z.imag());
    }
}

void get_data(std::istream& is, cvec& data) {
    for (auto& z : data) {
        double re = get_f64(is);
        double im = get_f64(is);
        z = {re, im};
    }
}

void write_header(std::ostream& os, SketchMode mode, std::uint64_t n, std::uint64_t b,
                  std::uint64_t B, std::uint64_t seed) {
    os.write(kMagic, 8);
    put_u64(os, kVersion);
    put_u64(os, static_cast<std::uint64_t>(mode));
    put_u64(os, n);
    put_u64(os, b);
    put_u64(os, B);
    put_u64(os, seed);
}

struct Header {
    SketchMode mode;
    std::uint64_t n, b, B, seed;
};

Header read_header(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw FormatError("sketch file: bad magic");
    if (get_u64(is) != kVersion) throw FormatError("sketch file: unsupported version");
    std::uint64_t mode = get_u64(is);
    if (mode > 1) throw FormatError("sketch file: unknown mode");
    Header h;
    h.mode = static_cast<SketchMode>(mode);
    h.n = get_u64(is);
    h.b = get_u64(is);
    h.B = get_u64(is);
    h.seed = get_u64(is);
    if (h.n == 0 || h.B == 0 || !is_power_of_two(h.b))
        throw FormatError("sketch file: invalid header");
    return h;
}

}  // namespace

CountSketch sketch_vector(const Eigen::VectorXd& u, const PolyHash& h, const SignGenerator& s) {
    CountSketch cs;
    cs.data.assign(h.buckets(), {0.0, 0.0});
    for (int i = 0; i < u.size(); ++i)
        cs.data[h.eval(i)] += s.value(i) * u[i];
    return cs;
}

// --- AsymTensorSketchSet ------------------------------------------------

AsymTensorSketchSet::AsymTensorSketchSet(int n, std::uint32_t b, int B, std::uint64_t master_seed)
    : n_(n), b_(b), B_(B), seed_(master_seed) {
    if (n < 1) throw std::invalid_argument("sketch set: dimension must be positive");
    if (B < 1) throw std::invalid_argument("sketch set: need at least one replicate");
    if (!is_power_of_two(b)) throw std::invalid_argument("sketch set: b must be a power of two");
    reps_.resize(B);
    for (int m = 0; m < B; ++m) {
        auto& rep = reps_[m];
        for (int s = 0; s < 3; ++s) {
            rep.h[s] = PolyHash::from_seed(2, b, derive_seed(master_seed, seed_tag::kAsymBucketHash, m, s));
            rep.xi[s] = SignGenerator(SignMode::kRademacher,
                                      derive_seed(master_seed, seed_tag::kAsymSign, m, s));
        }
        fill_asym_tables(rep, n);
        rep.data.assign(b, {0.0, 0.0});
    }
}

void AsymTensorSketchSet::accumulate_dense(const DenseTensor3& T) {
    if (T.n != n_) throw std::invalid_argument("accumulate_dense: dimension mismatch");
    ++version_;
#pragma omp parallel for schedule(static)
    for (int m = 0; m < B_; ++m) {
        auto& rep = reps_[m];
        for (int i = 0; i < n_; ++i) {
            std::uint32_t hi = rep.bucket[0][i];
            double si = rep.sign[0][i];
            for (int j = 0; j < n_; ++j) {
                std::uint64_t hij = hi + rep.bucket[1][j];
                double sij = si * rep.sign[1][j];
                const double* row = &T.entries[(static_cast<std::size_t>(i) * n_ + j) * n_];
                for (int k = 0; k < n_; ++k) {
                    std::uint32_t t = static_cast<std::uint32_t>((hij + rep.bucket[2][k]) % b_);
                    rep.data[t] += sij * rep.sign[2][k] * row[k];
                }
            }
        }
    }
}

cvec AsymTensorSketchSet::rank1_sketch(int m, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                       const Eigen::VectorXd& w) const {
    if (u.size() != n_ || v.size() != n_ || w.size() != n_)
        throw std::invalid_argument("rank1_sketch: dimension mismatch");
    const auto& rep = reps_[m];
    cvec su(b_, {0.0, 0.0}), sv(b_, {0.0, 0.0}), sw(b_, {0.0, 0.0});
    for (int i = 0; i < n_; ++i) {
        su[rep.bucket[0][i]] += std::complex<double>(rep.sign[0][i] * u[i], 0.0);
        sv[rep.bucket[1][i]] += std::complex<double>(rep.sign[1][i] * v[i], 0.0);
        sw[rep.bucket[2][i]] += std::complex<double>(rep.sign[2][i] * w[i], 0.0);
    }
    fft::forward_inplace(su);
    fft::forward_inplace(sv);
    fft::forward_inplace(sw);
    for (std::uint32_t t = 0; t < b_; ++t) su[t] *= sv[t] * sw[t];
    fft::inverse_inplace(su);
    return su;
}

void AsymTensorSketchSet::add_rank1(double alpha, const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    ++version_;
#pragma omp parallel for schedule(static)
    for (int m = 0; m < B_; ++m) {
        cvec r = rank1_sketch(m, u, v, w);
        for (std::uint32_t t = 0; t < b_; ++t) reps_[m].data[t] += alpha * r[t];
    }
}

void AsymTensorSketchSet::accumulate_factored(const FactoredTensor& F) {
    if (F.n != n_) throw std::invalid_argument("accumulate_factored: dimension mismatch");
    ++version_;
#pragma omp parallel for schedule(static)
    for (int m = 0; m < B_; ++m) {
        auto& rep = reps_[m];
        cvec su(b_), sv(b_), sw(b_);
        for (const auto& comp : F.components) {
            std::fill(su.begin(), su.end(), std::complex<double>{0.0, 0.0});
            std::fill(sv.begin(), sv.end(), std::complex<double>{0.0, 0.0});
            std::fill(sw.begin(), sw.end(), std::complex<double>{0.0, 0.0});
            for (int i = 0; i < n_; ++i) {
                su[rep.bucket[0][i]] += std::complex<double>(rep.sign[0][i] * comp.u[i], 0.0);
                sv[rep.bucket[1][i]] += std::complex<double>(rep.sign[1][i] * comp.v[i], 0.0);
                sw[rep.bucket[2][i]] += std::complex<double>(rep.sign[2][i] * comp.w[i], 0.0);
            }
            fft::forward_inplace(su);
            fft::forward_inplace(sv);
            fft::forward_inplace(sw);
            for (std::uint32_t t = 0; t < b_; ++t) su[t] *= sv[t] * sw[t];
            fft::inverse_inplace(su);
            for (std::uint32_t t = 0; t < b_; ++t) rep.data[t] += comp.weight * su[t];
        }
    }
}

double AsymTensorSketchSet::recover_entry(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= n_ || j >= n_ || k >= n_)
        throw std::invalid_argument("recover_entry: index out of range");
    std::vector<double> est(B_);
    for (int m = 0; m < B_; ++m) {
        const auto& rep = reps_[m];
        std::uint32_t t = static_cast<std::uint32_t>(
            (std::uint64_t{rep.bucket[0][i]} + rep.bucket[1][j] + rep.bucket[2][k]) % b_);
        double s = rep.sign[0][i] * rep.sign[1][j] * rep.sign[2][k];
        est[m] = s * rep.data[t].real();
    }
    return median_inplace(est);
}

void AsymTensorSketchSet::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot write sketch file: " + path);
    write_header(os, SketchMode::kAsym, n_, b_, B_, seed_);
    for (const auto& rep : reps_) {
        for (int s = 0; s < 3; ++s) put_hash(os, rep.h[s]);
        for (int s = 0; s < 3; ++s) put_hash(os, rep.xi[s].backing());
        put_data(os, rep.data);
    }
    if (!os) throw FormatError("write failure on sketch file: " + path);
}

AsymTensorSketchSet AsymTensorSketchSet::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open sketch file: " + path);
    Header h = read_header(is);
    if (h.mode != SketchMode::kAsym) throw FormatError(path + ": not an asymmetric sketch file");
    AsymTensorSketchSet set;
    set.n_ = static_cast<int>(h.n);
    set.b_ = static_cast<std::uint32_t>(h.b);
    set.B_ = static_cast<int>(h.B);
    set.seed_ = h.seed;
    set.reps_.resize(set.B_);
    for (auto& rep : set.reps_) {
        for (int s = 0; s < 3; ++s) rep.h[s] = get_hash(is, set.b_);
        for (int s = 0; s < 3; ++s)
            rep.xi[s] = SignGenerator::from_backing(SignMode::kRademacher, get_hash(is, 2));
        rep.data.resize(set.b_);
        get_data(is, rep.data);
        fill_asym_tables(rep, set.n_);
    }
    return set;
}

// --- SymTensorSketchSet -------------------------------------------------

SymTensorSketchSet::SymTensorSketchSet(int n, std::uint32_t b, int B, std::uint64_t master_seed)
    : n_(n), b_(b), B_(B), seed_(master_seed) {
    if (n < 1) throw std::invalid_argument("sketch set: dimension must be positive");
    if (B < 1) throw std::invalid_argument("sketch set: need at least one replicate");
    if (!is_power_of_two(b)) throw std::invalid_argument("sketch set: b must be a power of two");
    reps_.resize(B);
    for (int m = 0; m < B; ++m) {
        auto& rep = reps_[m];
        rep.h = PolyHash::from_seed(6, b, derive_seed(master_seed, seed_tag::kSymBucketHash, m));
        rep.sigma = SignGenerator(SignMode::kComplex4, derive_seed(master_seed, seed_tag::kSymSign, m));
        fill_sym_tables(rep, n, b);
        rep.data.assign(b, {0.0, 0.0});
    }
}

void SymTensorSketchSet::accumulate_dense(const DenseTensor3& T, bool assume_symmetric) {
    if (T.n != n_) throw std::invalid_argument("accumulate_dense: dimension mismatch");
    if (!assume_symmetric) {
        if (auto bad = T.first_asymmetric_triple(1e-9))
            throw std::invalid_argument(
                "accumulate_dense: input tensor is not symmetric at (" +
                std::to_string((*bad)[0] + 1) + "," + std::to_string((*bad)[1] + 1) + "," +
                std::to_string((*bad)[2] + 1) + ")");
    }
    ++version_;
#pragma omp parallel for schedule(static)
    for (int m = 0; m < B_; ++m) {
        auto& rep = reps_[m];
        for (int i = 0; i < n_; ++i) {
            std::uint64_t hi = rep.bucket1[i];
            unsigned ei = rep.sexp[i];
            for (int j = i; j < n_; ++j) {
                std::uint64_t hij = hi + rep.bucket1[j];
                unsigned eij = ei + rep.sexp[j];
                const double* row = &T.entries[(static_cast<std::size_t>(i) * n_ + j) * n_];
                for (int k = j; k < n_; ++k) {
                    double value = row[k];
                    if (value == 0.0) continue;
                    double mult = (i == j && j == k) ? 1.0 : ((i == j || j == k) ? 3.0 : 6.0);
                    std::uint32_t t = static_cast<std::uint32_t>((hij + rep.bucket1[k]) % b_);
                    rep.data[t] += mult * value * root4(eij + rep.sexp[k]);
                }
            }
        }
    }
}

void SymTensorSketchSet::add_scaled_rank1(const Eigen::VectorXd& u, double alpha) {
    if (u.size() != n_) throw std::invalid_argument("add_scaled_rank1: dimension mismatch");
    if (alpha == 0.0) return;
    ++version_;
#pragma omp parallel for schedule(static)
    for (int m = 0; m < B_; ++m) {
        auto& rep = reps_[m];
        cvec su(b_, {0.0, 0.0});
        for (int i = 0; i < n_; ++i) su[rep.bucket1[i]] += root4(rep.sexp[i]) * u[i];
        fft::forward_inplace(su);
        for (auto& z : su) z = z * z * z;
        fft::inverse_inplace(su);
        for (std::uint32_t t = 0; t < b_; ++t) rep.data[t] += alpha * su[t];
    }
}

double SymTensorSketchSet::recover_entry(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= n_ || j >= n_ || k >= n_)
        throw std::invalid_argument("recover_entry: index out of range");
    double kappa = (i == j && j == k) ? 1.0 : ((i == j || j == k || i == k) ? 3.0 : 6.0);
    std::vector<double> est(B_);
    for (int m = 0; m < B_; ++m) {
        const auto& rep = reps_[m];
        std::uint32_t t = static_cast<std::uint32_t>(
            (std::uint64_t{rep.bucket1[i]} + rep.bucket1[j] + rep.bucket1[k]) % b_);
        // conj(sigma_i sigma_j sigma_k) = omega^(-e_i-e_j-e_k)
        unsigned e = (4 * 3 - (rep.sexp[i] + rep.sexp[j] + rep.sexp[k])) & 3u;
        est[m] = (root4(e) * rep.data[t]).real() / kappa;
    }
    return median_inplace(est);
}

void SymTensorSketchSet::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot write sketch file: " + path);
    write_header(os, SketchMode::kSym, n_, b_, B_, seed_);
    for (const auto& rep : reps_) {
        put_hash(os, rep.h);
        put_hash(os, rep.sigma.backing());
        put_data(os, rep.data);
    }
    if (!os) throw FormatError("write failure on sketch file: " + path);
}

SymTensorSketchSet SymTensorSketchSet::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open sketch file: " + path);
    Header h = read_header(is);
    if (h.mode != SketchMode::kSym) throw FormatError(path + ": not a symmetric sketch file");
    SymTensorSketchSet set;
    set.n_ = static_cast<int>(h.n);
    set.b_ = static_cast<std::uint32_t>(h.b);
    set.B_ = static_cast<int>(h.B);
    set.seed_ = h.seed;
    set.reps_.resize(set.B_);
    for (auto& rep : set.reps_) {
        rep.h = get_hash(is, set.b_);
        rep.sigma = SignGenerator::from_backing(SignMode::kComplex4, get_hash(is, 4));
        rep.data.resize(set.b_);
        get_data(is, rep.data);
        fill_sym_tables(rep, set.n_, set.b_);
    }
    return set;
}

SymAuxSketches sym_aux_sketches(const SymTensorSketchSet::Replicate& rep, std::uint32_t b,
                                const Eigen::VectorXd& u) {
    SymAuxSketches aux;
    aux.s1.assign(b, {0.0, 0.0});
    aux.s2.assign(b, {0.0, 0.0});
    aux.s3.assign(b, {0.0, 0.0});
    for (int i = 0; i < u.size(); ++i) {
        double ui = u[i];
        aux.s1[rep.bucket1[i]] += root4(rep.sexp[i]) * ui;
        aux.s2[rep.bucket2[i]] += root4(2u * rep.sexp[i]) * (ui * ui);
        aux.s3[rep.bucket3[i]] += root4(3u * rep.sexp[i]) * (ui * ui * ui);
    }
    return aux;
}

cvec sketch_rank1_sym(const SymTensorSketchSet& set, int m, const Eigen::VectorXd& u) {
    if (u.size() != set.n()) throw std::invalid_argument("sketch_rank1_sym: dimension mismatch");
    const auto& rep = set.replicate(m);
    const std::uint32_t b = set.b();
    SymAuxSketches aux = sym_aux_sketches(rep, b, u);
    cvec f1 = aux.s1;
    fft::forward_inplace(f1);
    cvec f2 = aux.s2;
    fft::forward_inplace(f2);
    cvec acc(b);
    // (1/6) F(s1)^3 + (1/2) F(s2) F(s1), one inverse transform for both terms
    for (std::uint32_t t = 0; t < b; ++t)
        acc[t] = f1[t] * (f1[t] * f1[t] * (1.0 / 6.0) + f2[t] * 0.5);
    fft::inverse_inplace(acc);
    for (std::uint32_t t = 0; t < b; ++t) acc[t] += (1.0 / 3.0) * aux.s3[t];
    return acc;
}

SketchMode peek_sketch_mode(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open sketch file: " + path);
    return read_header(is).mode;
}

}  // namespace sketchcp
