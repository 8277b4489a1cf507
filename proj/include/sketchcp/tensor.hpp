// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sketchcp/common.hpp"

namespace sketchcp {

/// Dense n x n x n tensor, row-major (i, j, k): entry (i,j,k) at i*n^2 + j*n + k.
struct DenseTensor3 {
    int n = 0;
    std::vector<double> entries;

    DenseTensor3() = default;
    explicit DenseTensor3(int dim) : n(dim), entries(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}

    double& at(int i, int j, int k) {
        return entries[(static_cast<std::size_t>(i) * n + j) * n + k];
    }
    double at(int i, int j, int k) const {
        return entries[(static_cast<std::size_t>(i) * n + j) * n + k];
    }

    double frobenius_sq() const;
    bool is_symmetric(double tol = 0.0) const;

    /// First (i,j,k) with |T_ijk - T_(sorted ijk)| > tol, if any.
    std::optional<std::array<int, 3>> first_asymmetric_triple(double tol = 0.0) const;
};

struct Triple {
    int i, j, k;
    double value;
};

/// Weighted sum of rank-1 components. When `symmetric` is set, v and w alias u.
struct FactoredTensor {
    struct Component {
        double weight;
        Eigen::VectorXd u, v, w;
    };
    int n = 0;
    bool symmetric = false;
    std::vector<Component> components;

    void add(double a, Eigen::VectorXd u, Eigen::VectorXd v, Eigen::VectorXd w);
    void add_symmetric(double a, Eigen::VectorXd u);
};

/// Rank-k CP result: lambda_i and unit-norm factor columns. Symmetric
/// decompositions store the same matrix in all three slots.
struct CpDecomposition {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd A, B, C;

    int rank() const { return static_cast<int>(lambda.size()); }
    int dim() const { return static_cast<int>(A.rows()); }
    bool symmetric() const { return B.size() == 0 || (B.data() == A.data()); }

    static CpDecomposition symmetric_of(Eigen::VectorXd lambda, Eigen::MatrixXd V);
};

// Exact contractions. These are the oracle path: plain loops over all
// entries with a fixed per-row summation order (bit-identical under any
// thread count).

/// sum_{ijk} T_ijk u_i u_j u_k
double contract_vvv_exact(const DenseTensor3& T, const Eigen::VectorXd& u);

/// out_i = sum_{jk} T_ijk u_j v_k
Eigen::VectorXd contract_Ivv_exact(const DenseTensor3& T, const Eigen::VectorXd& u,
                                   const Eigen::VectorXd& v);

/// Contraction leaving `free_mode` (0,1,2) open, e.g. free_mode=1 gives
/// out_j = sum_{ik} T_ijk x_i y_k. free_mode=0 matches contract_Ivv_exact.
Eigen::VectorXd contract_mode_exact(const DenseTensor3& T, int free_mode,
                                    const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Row i lists T_{i,j,k} with (j,k) row-major; a reshape of the storage.
Eigen::MatrixXd mode1_unfold(const DenseTensor3& T);
DenseTensor3 mode1_refold(const Eigen::MatrixXd& M);

/// Column i is A.col(i) (x) B.col(i), flattened with A's index as the outer one.
Eigen::MatrixXd khatri_rao(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// || T - sum_i lambda_i a_i (x) b_i (x) c_i ||_F^2
double cp_residual(const DenseTensor3& T, const CpDecomposition& D);

struct SynthTensor {
    DenseTensor3 tensor;          // normalized clean tensor plus noise
    CpDecomposition truth;        // lambda after normalization, orthonormal factors
    Eigen::VectorXd lambda_raw;   // 1/i weights before normalization
    double norm_scale = 1.0;      // Frobenius norm of the unnormalized clean sum
};

/// Planted instance: orthonormal basis from a seeded Gaussian QR, weights 1/i,
/// normalized to unit Frobenius norm, then symmetric Gaussian noise with
/// stddev sigma/n^1.5 drawn for i<=j<=k and mirrored.
SynthTensor synth_orthogonal_tensor(int n, int k, double sigma, std::uint64_t seed);

inline constexpr std::size_t kDefaultMaterializeCapBytes = std::size_t{2} * 1024 * 1024 * 1024;

/// Entrywise sum of the weighted outer products. Refuses (never truncates)
/// when n^3 doubles would exceed the cap.
DenseTensor3 materialize(const FactoredTensor& F,
                         std::size_t memory_cap_bytes = kDefaultMaterializeCapBytes);

/// Fast path for factored tensors: sum_i a_i (u_i.x)(v_i.x)(w_i.x).
double factored_vvv(const FactoredTensor& F, const Eigen::VectorXd& x);

// COO text format: "n nnz" or "n nnz sym" header, then 1-indexed
// "i j k value" lines. The sym flag stores i<=j<=k and expands permutations
// on load.
DenseTensor3 load_coo(const std::string& path,
                      std::size_t memory_cap_bytes = kDefaultMaterializeCapBytes);
void save_coo(const DenseTensor3& T, const std::string& path, bool symmetric_only = false,
              double zero_tol = 0.0);

}  // namespace sketchcp
