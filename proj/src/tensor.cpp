// SPDX-License-Identifier: Apache-2.0
#include "sketchcp/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "sketchcp/rng.hpp"

namespace sketchcp {

double median_inplace(std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    double hi = v[m];
    if (v.size() % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + m);
    return 0.5 * (lo + hi);
}

double DenseTensor3::frobenius_sq() const {
    double s = 0;
    for (double x : entries) s += x * x;
    return s;
}

std::optional<std::array<int, 3>> DenseTensor3::first_asymmetric_triple(double tol) const {
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k) {
                double ref = at(i, j, k);
                const std::array<std::array<int, 3>, 5> perms = {
                    {{i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}}};
                for (auto& p : perms)
                    if (std::abs(at(p[0], p[1], p[2]) - ref) > tol) return p;
            }
    return std::nullopt;
}

bool DenseTensor3::is_symmetric(double tol) const { return !first_asymmetric_triple(tol); }

void FactoredTensor::add(double a, Eigen::VectorXd u, Eigen::VectorXd v, Eigen::VectorXd w) {
    if (u.size() != n || v.size() != n || w.size() != n)
        throw std::invalid_argument("FactoredTensor: component dimension mismatch");
    components.push_back({a, std::move(u), std::move(v), std::move(w)});
}

void FactoredTensor::add_symmetric(double a, Eigen::VectorXd u) {
    if (u.size() != n) throw std::invalid_argument("FactoredTensor: component dimension mismatch");
    components.push_back({a, u, u, std::move(u)});
}

CpDecomposition CpDecomposition::symmetric_of(Eigen::VectorXd lambda, Eigen::MatrixXd V) {
    CpDecomposition d;
    d.lambda = std::move(lambda);
    d.A = std::move(V);
    d.B = d.A;
    d.C = d.A;
    return d;
}

double contract_vvv_exact(const DenseTensor3& T, const Eigen::VectorXd& u) {
    if (u.size() != T.n) throw std::invalid_argument("contract_vvv_exact: dimension mismatch");
    const int n = T.n;
    const double* t = T.entries.data();
    double total = 0;
#pragma omp parallel for reduction(+ : total) schedule(static)
    for (int i = 0; i < n; ++i) {
        const double* ti = t + static_cast<std::size_t>(i) * n * n;
        double acc = 0;
        for (int j = 0; j < n; ++j) {
            const double* tij = ti + static_cast<std::size_t>(j) * n;
            double s = 0;
            for (int k = 0; k < n; ++k) s += tij[k] * u[k];
            acc += u[j] * s;
        }
        total += u[i] * acc;
    }
    return total;
}

Eigen::VectorXd contract_Ivv_exact(const DenseTensor3& T, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& v) {
    if (u.size() != T.n || v.size() != T.n)
        throw std::invalid_argument("contract_Ivv_exact: dimension mismatch");
    const int n = T.n;
    const double* t = T.entries.data();
    Eigen::VectorXd out(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double* ti = t + static_cast<std::size_t>(i) * n * n;
        double acc = 0;
        for (int j = 0; j < n; ++j) {
            const double* tij = ti + static_cast<std::size_t>(j) * n;
            double s = 0;
            for (int k = 0; k < n; ++k) s += tij[k] * v[k];
            acc += u[j] * s;
        }
        out[i] = acc;
    }
    return out;
}

Eigen::VectorXd contract_mode_exact(const DenseTensor3& T, int free_mode, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y) {
    if (x.size() != T.n || y.size() != T.n)
        throw std::invalid_argument("contract_mode_exact: dimension mismatch");
    if (free_mode == 0) return contract_Ivv_exact(T, x, y);
    const int n = T.n;
    const double* t = T.entries.data();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    if (free_mode == 1) {
        // out_j = sum_{ik} T_ijk x_i y_k
#pragma omp parallel for schedule(static)
        for (int j = 0; j < n; ++j) {
            double acc = 0;
            for (int i = 0; i < n; ++i) {
                const double* tij = t + (static_cast<std::size_t>(i) * n + j) * n;
                double s = 0;
                for (int k = 0; k < n; ++k) s += tij[k] * y[k];
                acc += x[i] * s;
            }
            out[j] = acc;
        }
    } else if (free_mode == 2) {
        // out_k = sum_{ij} T_ijk x_i y_j; accumulate row-wise to keep the
        // summation order fixed per output lane.
        for (int i = 0; i < n; ++i) {
            const double* ti = t + static_cast<std::size_t>(i) * n * n;
            for (int j = 0; j < n; ++j) {
                const double* tij = ti + static_cast<std::size_t>(j) * n;
                double c = x[i] * y[j];
                for (int k = 0; k < n; ++k) out[k] += c * tij[k];
            }
        }
    } else {
        throw std::invalid_argument("contract_mode_exact: free_mode must be 0, 1 or 2");
    }
    return out;
}

Eigen::MatrixXd mode1_unfold(const DenseTensor3& T) {
    const int n = T.n;
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        T.entries.data(), n, static_cast<Eigen::Index>(n) * n);
}

DenseTensor3 mode1_refold(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    if (M.cols() != static_cast<Eigen::Index>(n) * n)
        throw std::invalid_argument("mode1_refold: expected n x n^2 matrix");
    DenseTensor3 T(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) T.at(i, j, k) = M(i, static_cast<Eigen::Index>(j) * n + k);
    return T;
}

Eigen::MatrixXd khatri_rao(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if (A.cols() != B.cols()) throw std::invalid_argument("khatri_rao: column count mismatch");
    Eigen::MatrixXd out(A.rows() * B.rows(), A.cols());
    for (Eigen::Index c = 0; c < A.cols(); ++c)
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            out.block(i * B.rows(), c, B.rows(), 1) = A(i, c) * B.col(c);
    return out;
}

double cp_residual(const DenseTensor3& T, const CpDecomposition& D) {
    const int n = T.n;
    const int k = D.rank();
    if (k > 0 && (D.A.rows() != n || D.B.rows() != n || D.C.rows() != n))
        throw std::invalid_argument("cp_residual: dimension mismatch");
    double total = 0;
#pragma omp parallel for reduction(+ : total) schedule(static)
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double* tij = T.entries.data() + (static_cast<std::size_t>(i) * n + j) * n;
            for (int kk = 0; kk < n; ++kk) {
                double approx = 0;
                for (int r = 0; r < k; ++r)
                    approx += D.lambda[r] * D.A(i, r) * D.B(j, r) * D.C(kk, r);
                double d = tij[kk] - approx;
                total += d * d;
            }
        }
    }
    return total;
}

SynthTensor synth_orthogonal_tensor(int n, int k, double sigma, std::uint64_t seed) {
    if (k > n) throw std::invalid_argument("synth_orthogonal_tensor: k exceeds dimension");
    if (k < 1) throw std::invalid_argument("synth_orthogonal_tensor: k must be positive");
    if (sigma < 0) throw std::invalid_argument("synth_orthogonal_tensor: negative noise level");

    Rng basis_rng(derive_seed(seed, seed_tag::kSynthBasis));
    Eigen::MatrixXd G(n, n);
    for (int j = 0; j < n; ++j) G.col(j) = basis_rng.gaussian_vector(n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd V = Q.leftCols(k);

    Eigen::VectorXd lambda_raw(k);
    for (int i = 0; i < k; ++i) lambda_raw[i] = 1.0 / (i + 1);
    // Orthonormal basis: the clean sum has squared norm sum_i lambda_i^2.
    double scale = std::sqrt(lambda_raw.squaredNorm());

    SynthTensor out;
    out.lambda_raw = lambda_raw;
    out.norm_scale = scale;
    out.truth = CpDecomposition::symmetric_of(lambda_raw / scale, V);

    DenseTensor3 T(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int kk = 0; kk < n; ++kk) {
                double s = 0;
                for (int r = 0; r < k; ++r)
                    s += out.truth.lambda[r] * V(i, r) * V(j, r) * V(kk, r);
                T.at(i, j, kk) = s;
            }

    if (sigma > 0) {
        Rng noise_rng(derive_seed(seed, seed_tag::kSynthNoise));
        const double sd = sigma / std::pow(static_cast<double>(n), 1.5);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int kk = j; kk < n; ++kk) {
                    double e = sd * noise_rng.gaussian();
                    T.at(i, j, kk) += e;
                    if (!(i == j && j == kk)) {
                        T.at(i, kk, j) = T.at(i, j, kk);
                        T.at(j, i, kk) = T.at(i, j, kk);
                        T.at(j, kk, i) = T.at(i, j, kk);
                        T.at(kk, i, j) = T.at(i, j, kk);
                        T.at(kk, j, i) = T.at(i, j, kk);
                    }
                }
    }
    out.tensor = std::move(T);
    return out;
}

DenseTensor3 materialize(const FactoredTensor& F, std::size_t memory_cap_bytes) {
    std::size_t need = static_cast<std::size_t>(F.n) * F.n * F.n * sizeof(double);
    if (F.n > 1290 || need > memory_cap_bytes)
        throw NumericalError("materialize: n^3 tensor of dimension " + std::to_string(F.n) +
                             " exceeds the configured memory cap");
    DenseTensor3 T(F.n);
    const int n = F.n;
    for (const auto& c : F.components)
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            double au = c.weight * c.u[i];
            for (int j = 0; j < n; ++j) {
                double auv = au * c.v[j];
                double* row = &T.at(i, j, 0);
                for (int k = 0; k < n; ++k) row[k] += auv * c.w[k];
            }
        }
    return T;
}

double factored_vvv(const FactoredTensor& F, const Eigen::VectorXd& x) {
    if (x.size() != F.n) throw std::invalid_argument("factored_vvv: dimension mismatch");
    double s = 0;
    for (const auto& c : F.components) s += c.weight * c.u.dot(x) * c.v.dot(x) * c.w.dot(x);
    return s;
}

DenseTensor3 load_coo(const std::string& path, std::size_t memory_cap_bytes) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open tensor file: " + path);
    std::string header;
    if (!std::getline(in, header)) throw FormatError(path + ": empty file");
    std::istringstream hs(header);
    long long n = 0, nnz = 0;
    std::string flag;
    if (!(hs >> n >> nnz)) throw FormatError(path + ": header must be \"n nnz [sym]\"");
    bool symmetric = false;
    if (hs >> flag) {
        if (flag != "sym") throw FormatError(path + ": unknown header flag \"" + flag + "\"");
        symmetric = true;
    }
    if (n <= 0 || nnz < 0) throw FormatError(path + ": invalid header values");
    if (static_cast<std::size_t>(n) * n * n * sizeof(double) > memory_cap_bytes)
        throw NumericalError(path + ": tensor exceeds the configured memory cap");

    DenseTensor3 T(static_cast<int>(n));
    for (long long e = 0; e < nnz; ++e) {
        long long i, j, k;
        double value;
        if (!(in >> i >> j >> k >> value))
            throw FormatError(path + ": truncated entry list at record " + std::to_string(e + 1));
        if (i < 1 || i > n || j < 1 || j > n || k < 1 || k > n)
            throw FormatError(path + ": index out of range at record " + std::to_string(e + 1));
        int a = static_cast<int>(i - 1), b = static_cast<int>(j - 1), c = static_cast<int>(k - 1);
        if (symmetric) {
            if (!(a <= b && b <= c))
                throw FormatError(path + ": sym file requires i<=j<=k at record " +
                                  std::to_string(e + 1));
            const std::array<std::array<int, 3>, 6> perms = {
                {{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
            for (auto& p : perms) T.at(p[0], p[1], p[2]) = value;
        } else {
            T.at(a, b, c) = value;
        }
    }
    return T;
}

void save_coo(const DenseTensor3& T, const std::string& path, bool symmetric_only,
              double zero_tol) {
    std::vector<Triple> entries;
    for (int i = 0; i < T.n; ++i)
        for (int j = symmetric_only ? i : 0; j < T.n; ++j)
            for (int k = symmetric_only ? j : 0; k < T.n; ++k)
                if (std::abs(T.at(i, j, k)) > zero_tol) entries.push_back({i, j, k, T.at(i, j, k)});
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write tensor file: " + path);
    out.precision(17);
    out << T.n << ' ' << entries.size() << (symmetric_only ? " sym" : "") << '\n';
    for (auto& e : entries)
        out << (e.i + 1) << ' ' << (e.j + 1) << ' ' << (e.k + 1) << ' ' << e.value << '\n';
}

}  // namespace sketchcp
