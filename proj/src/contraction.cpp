// SPDX-License-Identifier: Apache-2.0
#include "sketchcp/contraction.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sketchcp {

namespace {

inline int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline int thread_id() {
#ifdef _OPENMP
    return omp_get_thread_num();
#else
    return 0;
#endif
}

inline std::complex<double> root4(unsigned e) {
    switch (e & 3u) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Re(omega^(-e) * z) without forming the product.
inline double re_rot_conj(unsigned e, std::complex<double> z) {
    switch (e & 3u) {
        case 0: return z.real();
        case 1: return z.imag();
        case 2: return -z.real();
        default: return -z.imag();
    }
}

double strided_median(std::vector<double>& vals, int n, int B, int i, std::vector<double>& tmp) {
    tmp.resize(B);
    for (int m = 0; m < B; ++m) tmp[m] = vals[static_cast<std::size_t>(m) * n + i];
    return median_inplace(tmp);
}

}  // namespace

// --- symmetric ------------------------------------------------------------

SymContractionWorkspace::SymContractionWorkspace(const SymTensorSketchSet& set)
    : set_(&set), cached_version_(set.version() - 1) {}

void SymContractionWorkspace::ensure_fresh() {
    if (cached_version_ == set_->version() && !fourier_data_.empty()) return;
    const int B = set_->replicates();
    fourier_data_.resize(B);
#pragma omp parallel for schedule(static)
    for (int m = 0; m < B; ++m) {
        fourier_data_[m] = set_->replicate(m).data;
        fft::forward_inplace(fourier_data_[m]);
    }
    cached_version_ = set_->version();
}

SymContractionWorkspace::Scratch& SymContractionWorkspace::scratch_for_thread() {
    return scratch_[thread_id()];
}

const cvec& SymContractionWorkspace::cached_transform(int m) {
    ensure_fresh();
    return fourier_data_[m];
}

double SymContractionWorkspace::vvv(const Eigen::VectorXd& u) {
    const int n = set_->n();
    if (u.size() != n) throw std::invalid_argument("vvv: dimension mismatch");
    ensure_fresh();
    const std::uint32_t b = set_->b();
    const int B = set_->replicates();
    if (static_cast<int>(scratch_.size()) < thread_count()) scratch_.resize(thread_count());
    std::vector<double> est(B);

#pragma omp parallel
    {
        Scratch& sc = scratch_for_thread();
        sc.f1.assign(b, {0.0, 0.0});
        sc.f2.assign(b, {0.0, 0.0});
#pragma omp for schedule(static)
        for (int m = 0; m < B; ++m) {
            const auto& rep = set_->replicate(m);
            std::fill(sc.f1.begin(), sc.f1.end(), std::complex<double>{0.0, 0.0});
            std::fill(sc.f2.begin(), sc.f2.end(), std::complex<double>{0.0, 0.0});
            for (int i = 0; i < n; ++i) {
                double ui = u[i];
                sc.f1[rep.bucket1[i]] += root4(rep.sexp[i]) * ui;
                sc.f2[rep.bucket2[i]] += root4(2u * rep.sexp[i]) * (ui * ui);
            }
            fft::forward_inplace(sc.f1);
            fft::forward_inplace(sc.f2);
            const std::complex<double>* fT = fourier_data_[m].data();
            double acc1 = 0, acc2 = 0;
            for (std::uint32_t t = 0; t < b; ++t) {
                std::complex<double> c1 = std::conj(sc.f1[t]);
                std::complex<double> w1 = fT[t] * c1;
                acc1 += (w1 * c1 * c1).real();
                acc2 += (w1 * std::conj(sc.f2[t])).real();
            }
            double term3 = 0;
            for (int i = 0; i < n; ++i) {
                double u3 = u[i] * u[i] * u[i];
                term3 += u3 * re_rot_conj(3u * rep.sexp[i], rep.data[rep.bucket3[i]]);
            }
            est[m] = (acc1 / 6.0 + acc2 / 2.0) / static_cast<double>(b) + term3 / 3.0;
        }
    }
    return median_inplace(est);
}

Eigen::VectorXd SymContractionWorkspace::Ivv(const Eigen::VectorXd& u) {
    const int n = set_->n();
    if (u.size() != n) throw std::invalid_argument("Ivv: dimension mismatch");
    ensure_fresh();
    const std::uint32_t b = set_->b();
    const int B = set_->replicates();
    if (static_cast<int>(scratch_.size()) < thread_count()) scratch_.resize(thread_count());
    vals_.resize(static_cast<std::size_t>(B) * n);
    const double inv_b = 1.0 / static_cast<double>(b);

#pragma omp parallel
    {
        Scratch& sc = scratch_for_thread();
        sc.f1.resize(b);
        sc.f2.resize(b);
        sc.z1.resize(b);
        sc.z2.resize(b);
#pragma omp for schedule(static)
        for (int m = 0; m < B; ++m) {
            const auto& rep = set_->replicate(m);
            std::fill(sc.f1.begin(), sc.f1.end(), std::complex<double>{0.0, 0.0});
            std::fill(sc.f2.begin(), sc.f2.end(), std::complex<double>{0.0, 0.0});
            for (int i = 0; i < n; ++i) {
                double ui = u[i];
                sc.f1[rep.bucket1[i]] += root4(rep.sexp[i]) * ui;
                sc.f2[rep.bucket2[i]] += root4(2u * rep.sexp[i]) * (ui * ui);
            }
            fft::forward_inplace(sc.f1);
            fft::forward_inplace(sc.f2);
            const std::complex<double>* fT = fourier_data_[m].data();
            for (std::uint32_t t = 0; t < b; ++t) {
                std::complex<double> fu = sc.f1[t];
                sc.z1[t] = fT[t] * std::conj(fu * fu + sc.f2[t]);
                sc.z2[t] = fT[t] * std::conj(fu);
            }
            fft::inverse_inplace_unscaled(sc.z1);
            fft::inverse_inplace_unscaled(sc.z2);
            double* out = &vals_[static_cast<std::size_t>(m) * n];
            for (int i = 0; i < n; ++i) {
                unsigned e = rep.sexp[i];
                double ui = u[i];
                double v = re_rot_conj(e, sc.z1[rep.bucket1[i]]) * (1.0 / 6.0) * inv_b;
                v += ui * re_rot_conj(2u * e, sc.z2[rep.bucket2[i]]) * (1.0 / 3.0) * inv_b;
                v += ui * ui * re_rot_conj(3u * e, rep.data[rep.bucket3[i]]) * (1.0 / 3.0);
                out[i] = v;
            }
        }
    }

    Eigen::VectorXd result(n);
    std::vector<double> tmp;
    for (int i = 0; i < n; ++i) result[i] = strided_median(vals_, n, B, i, tmp);
    return result;
}

// --- asymmetric -----------------------------------------------------------

AsymContractionWorkspace::AsymContractionWorkspace(const AsymTensorSketchSet& set)
    : set_(&set), cached_version_(set.version() - 1) {}

void AsymContractionWorkspace::ensure_fresh() {
    if (cached_version_ == set_->version() && !fourier_data_.empty()) return;
    const int B = set_->replicates();
    fourier_data_.resize(B);
#pragma omp parallel for schedule(static)
    for (int m = 0; m < B; ++m) {
        fourier_data_[m] = set_->replicate(m).data;
        fft::forward_inplace(fourier_data_[m]);
    }
    cached_version_ = set_->version();
}

AsymContractionWorkspace::Scratch& AsymContractionWorkspace::scratch_for_thread() {
    return scratch_[thread_id()];
}

const cvec& AsymContractionWorkspace::cached_transform(int m) {
    ensure_fresh();
    return fourier_data_[m];
}

double AsymContractionWorkspace::vvv(const Eigen::VectorXd& u) {
    const int n = set_->n();
    if (u.size() != n) throw std::invalid_argument("vvv: dimension mismatch");
    ensure_fresh();
    const std::uint32_t b = set_->b();
    const int B = set_->replicates();
    if (static_cast<int>(scratch_.size()) < thread_count()) scratch_.resize(thread_count());
    std::vector<double> est(B);

#pragma omp parallel
    {
        Scratch& sc = scratch_for_thread();
        sc.fx.resize(b);
        sc.fy.resize(b);
        sc.z.resize(b);
#pragma omp for schedule(static)
        for (int m = 0; m < B; ++m) {
            const auto& rep = set_->replicate(m);
            std::fill(sc.fx.begin(), sc.fx.end(), std::complex<double>{0.0, 0.0});
            std::fill(sc.fy.begin(), sc.fy.end(), std::complex<double>{0.0, 0.0});
            std::fill(sc.z.begin(), sc.z.end(), std::complex<double>{0.0, 0.0});
            for (int i = 0; i < n; ++i) {
                sc.fx[rep.bucket[0][i]] += std::complex<double>(rep.sign[0][i] * u[i], 0.0);
                sc.fy[rep.bucket[1][i]] += std::complex<double>(rep.sign[1][i] * u[i], 0.0);
                sc.z[rep.bucket[2][i]] += std::complex<double>(rep.sign[2][i] * u[i], 0.0);
            }
            fft::forward_inplace(sc.fx);
            fft::forward_inplace(sc.fy);
            fft::forward_inplace(sc.z);
            const std::complex<double>* fT = fourier_data_[m].data();
            double acc = 0;
            for (std::uint32_t t = 0; t < b; ++t)
                acc += (fT[t] * std::conj(sc.fx[t] * sc.fy[t] * sc.z[t])).real();
            est[m] = acc / static_cast<double>(b);
        }
    }
    return median_inplace(est);
}

Eigen::VectorXd AsymContractionWorkspace::mode_contraction(int free_mode, const Eigen::VectorXd& x,
                                                           const Eigen::VectorXd& y) {
    const int n = set_->n();
    if (x.size() != n || y.size() != n)
        throw std::invalid_argument("mode_contraction: dimension mismatch");
    if (free_mode < 0 || free_mode > 2)
        throw std::invalid_argument("mode_contraction: free_mode must be 0, 1 or 2");
    ensure_fresh();
    const int slot_x = free_mode == 0 ? 1 : 0;
    const int slot_y = free_mode == 2 ? 1 : 2;
    const std::uint32_t b = set_->b();
    const int B = set_->replicates();
    if (static_cast<int>(scratch_.size()) < thread_count()) scratch_.resize(thread_count());
    vals_.resize(static_cast<std::size_t>(B) * n);
    const double inv_b = 1.0 / static_cast<double>(b);

#pragma omp parallel
    {
        Scratch& sc = scratch_for_thread();
        sc.fx.resize(b);
        sc.fy.resize(b);
        sc.z.resize(b);
#pragma omp for schedule(static)
        for (int m = 0; m < B; ++m) {
            const auto& rep = set_->replicate(m);
            std::fill(sc.fx.begin(), sc.fx.end(), std::complex<double>{0.0, 0.0});
            std::fill(sc.fy.begin(), sc.fy.end(), std::complex<double>{0.0, 0.0});
            for (int i = 0; i < n; ++i) {
                sc.fx[rep.bucket[slot_x][i]] += std::complex<double>(rep.sign[slot_x][i] * x[i], 0.0);
                sc.fy[rep.bucket[slot_y][i]] += std::complex<double>(rep.sign[slot_y][i] * y[i], 0.0);
            }
            fft::forward_inplace(sc.fx);
            fft::forward_inplace(sc.fy);
            const std::complex<double>* fT = fourier_data_[m].data();
            for (std::uint32_t t = 0; t < b; ++t)
                sc.z[t] = fT[t] * std::conj(sc.fx[t] * sc.fy[t]);
            fft::inverse_inplace_unscaled(sc.z);
            double* out = &vals_[static_cast<std::size_t>(m) * n];
            for (int i = 0; i < n; ++i)
                out[i] = rep.sign[free_mode][i] * sc.z[rep.bucket[free_mode][i]].real() * inv_b;
        }
    }

    Eigen::VectorXd result(n);
    std::vector<double> tmp;
    for (int i = 0; i < n; ++i) result[i] = strided_median(vals_, n, B, i, tmp);
    return result;
}

Eigen::VectorXd AsymContractionWorkspace::Ivv(const Eigen::VectorXd& u) {
    return mode_contraction(0, u, u);
}

Eigen::VectorXd AsymContractionWorkspace::Ibc(const Eigen::VectorXd& bvec,
                                              const Eigen::VectorXd& cvec_) {
    return mode_contraction(0, bvec, cvec_);
}

}  // namespace sketchcp
