// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sketchcp/contraction.hpp"
#include "sketchcp/tensor.hpp"

namespace sketchcp {

struct PowerConfig {
    int k = 1;
    int L = 30;        // initializations per factor
    int T_iters = 30;  // power iterations per initialization
    std::uint32_t b = 4096;
    int B = 20;
    std::uint64_t seed = 0;
    double tol = 1e-12;  // degenerate-update threshold on the iterate norm
};

struct AlsConfig {
    int k = 1;
    int max_iters = 1000;
    double tol = 1e-6;  // relative change of the lambda vector
    std::uint32_t b = 4096;
    int B = 40;
    std::uint64_t seed = 0;
};

/// Robust tensor power method on a dense symmetric tensor with exact
/// contractions. Deflates a working copy; eigenpairs in extraction order.
CpDecomposition robust_tpm_exact(const DenseTensor3& T, const PowerConfig& cfg);

/// Same driver on a symmetric sketch set: power updates and selection via
/// sketched contractions, deflation by subtracting the rank-1 sketch. The
/// set is left deflated.
CpDecomposition robust_tpm_fast(SymTensorSketchSet& set, const PowerConfig& cfg);

/// CP-ALS with exact unfolding contractions and a spectral pseudoinverse of
/// the k x k Gram product.
CpDecomposition als_exact(const DenseTensor3& T, const AlsConfig& cfg);

/// CP-ALS where each factor column update reads T(., b_i, c_i) off the
/// asymmetric sketch set.
CpDecomposition als_fast(const AsymTensorSketchSet& set, const AlsConfig& cfg);

struct EigengapReport {
    Eigen::VectorXd sorted_lambda;  // descending
    double delta;                   // minimal consecutive gap; +inf for k=1
    double ratio;                   // max lambda_i / lambda_j over i < j; 1 for k=1
    double recommended_b;           // heuristic sketch length, power of two
};

EigengapReport eigengap_report(const CpDecomposition& D);

/// Symmetric positive-semidefinite pseudoinverse with spectral truncation at
/// 1e-10 of the largest eigenvalue magnitude.
Eigen::MatrixXd pinv_spectral(const Eigen::MatrixXd& G);

}  // namespace sketchcp
