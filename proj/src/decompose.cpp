// SPDX-License-Identifier: Apache-2.0
#include "sketchcp/decompose.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "sketchcp/rng.hpp"

namespace sketchcp {

namespace {

void validate_power_config(const PowerConfig& cfg, int n) {
    if (cfg.k < 1 || cfg.L < 1 || cfg.T_iters < 1)
        throw std::invalid_argument("power method: k, L and T must be positive");
    if (cfg.k > n)
        throw std::invalid_argument("power method: target rank exceeds tensor dimension");
}

void deflate_dense(DenseTensor3& W, double lambda, const Eigen::VectorXd& v) {
    const int n = W.n;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double li = lambda * v[i];
        for (int j = 0; j < n; ++j) {
            double lij = li * v[j];
            double* row = &W.at(i, j, 0);
            for (int k = 0; k < n; ++k) row[k] -= lij * v[k];
        }
    }
}

Eigen::VectorXd normalized_or_throw(const Eigen::VectorXd& v, double tol) {
    double nrm = v.norm();
    if (!(nrm > tol))
        throw DegenerateIterationError("power update produced a vanishing iterate");
    return v / nrm;
}

}  // namespace

Eigen::MatrixXd pinv_spectral(const Eigen::MatrixXd& G) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    Eigen::VectorXd d = es.eigenvalues();
    double cutoff = 1e-10 * d.cwiseAbs().maxCoeff();
    Eigen::VectorXd dinv(d.size());
    for (int i = 0; i < d.size(); ++i) dinv[i] = std::abs(d[i]) > cutoff ? 1.0 / d[i] : 0.0;
    return es.eigenvectors() * dinv.asDiagonal() * es.eigenvectors().transpose();
}

CpDecomposition robust_tpm_exact(const DenseTensor3& T, const PowerConfig& cfg) {
    validate_power_config(cfg, T.n);
    if (!T.is_symmetric(1e-9))
        throw std::invalid_argument("robust_tpm_exact: input tensor is not symmetric");
    const int n = T.n;
    DenseTensor3 W = T;
    Eigen::VectorXd lambda(cfg.k);
    Eigen::MatrixXd V(n, cfg.k);

    for (int c = 0; c < cfg.k; ++c) {
        double best = -std::numeric_limits<double>::infinity();
        Eigen::VectorXd best_u;
        for (int tau = 0; tau < cfg.L; ++tau) {
            Rng rng(derive_seed(cfg.seed, seed_tag::kPowerInit, c, tau));
            Eigen::VectorXd u = rng.unit_sphere(n);
            for (int t = 0; t < cfg.T_iters; ++t)
                u = normalized_or_throw(contract_Ivv_exact(W, u, u), cfg.tol);
            double value = contract_vvv_exact(W, u);
            if (value > best) {
                best = value;
                best_u = u;
            }
        }
        lambda[c] = best;
        V.col(c) = best_u;
        deflate_dense(W, best, best_u);
    }
    return CpDecomposition::symmetric_of(std::move(lambda), std::move(V));
}

CpDecomposition robust_tpm_fast(SymTensorSketchSet& set, const PowerConfig& cfg) {
    const int n = set.n();
    validate_power_config(cfg, n);
    SymContractionWorkspace ws(set);
    Eigen::VectorXd lambda(cfg.k);
    Eigen::MatrixXd V(n, cfg.k);

    for (int c = 0; c < cfg.k; ++c) {
        Eigen::MatrixXd finals(n, cfg.L);
        for (int tau = 0; tau < cfg.L; ++tau) {
            Rng rng(derive_seed(cfg.seed, seed_tag::kPowerInit, c, tau));
            Eigen::VectorXd u = rng.unit_sphere(n);
            for (int t = 0; t < cfg.T_iters; ++t)
                u = normalized_or_throw(ws.Ivv(u), cfg.tol);
            finals.col(tau) = u;
        }
        // Selection: argmax over trajectories of the median T(u,u,u)
        // estimate; ties resolve to the lowest trajectory index.
        double best = -std::numeric_limits<double>::infinity();
        int best_tau = 0;
        for (int tau = 0; tau < cfg.L; ++tau) {
            double value = ws.vvv(finals.col(tau));
            if (value > best) {
                best = value;
                best_tau = tau;
            }
        }
        lambda[c] = best;
        V.col(c) = finals.col(best_tau);
        set.add_scaled_rank1(V.col(c), -best);
    }
    return CpDecomposition::symmetric_of(std::move(lambda), std::move(V));
}

namespace {

struct AlsState {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd A, B, C;
};

AlsState als_init(int n, const AlsConfig& cfg) {
    if (cfg.k < 1 || cfg.max_iters < 1)
        throw std::invalid_argument("als: k and max_iters must be positive");
    if (cfg.k > n) throw std::invalid_argument("als: target rank exceeds tensor dimension");
    AlsState s;
    s.lambda = Eigen::VectorXd::Ones(cfg.k);
    s.A.resize(n, cfg.k);
    s.B.resize(n, cfg.k);
    s.C.resize(n, cfg.k);
    for (int r = 0; r < cfg.k; ++r) {
        Rng rng(derive_seed(cfg.seed, seed_tag::kAlsInit, r));
        s.A.col(r) = rng.unit_sphere(n);
        s.B.col(r) = rng.unit_sphere(n);
        s.C.col(r) = rng.unit_sphere(n);
    }
    return s;
}

// Normalizes columns of M into unit vectors, returning the norms; a zero
// column keeps its previous direction.
void normalize_columns(Eigen::MatrixXd& M, const Eigen::MatrixXd& prev, Eigen::VectorXd& lambda) {
    for (int r = 0; r < M.cols(); ++r) {
        double nrm = M.col(r).norm();
        lambda[r] = nrm;
        if (nrm > 0)
            M.col(r) /= nrm;
        else
            M.col(r) = prev.col(r);
    }
}

template <typename ColumnFn>
void als_update_factor(Eigen::MatrixXd& target, const Eigen::MatrixXd& F1,
                       const Eigen::MatrixXd& F2, Eigen::VectorXd& lambda, ColumnFn&& column) {
    const int k = static_cast<int>(target.cols());
    Eigen::MatrixXd M(target.rows(), k);
    for (int r = 0; r < k; ++r) M.col(r) = column(r);
    Eigen::MatrixXd G =
        (F1.transpose() * F1).cwiseProduct(F2.transpose() * F2);
    Eigen::MatrixXd updated = M * pinv_spectral(G);
    Eigen::MatrixXd prev = target;
    target = updated;
    normalize_columns(target, prev, lambda);
}

template <typename ModeFn>
CpDecomposition als_loop(int n, const AlsConfig& cfg, ModeFn&& contract_mode) {
    AlsState s = als_init(n, cfg);
    Eigen::VectorXd lambda_prev = s.lambda;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        als_update_factor(s.A, s.B, s.C, s.lambda, [&](int r) {
            return contract_mode(0, s.B.col(r), s.C.col(r));
        });
        als_update_factor(s.B, s.A, s.C, s.lambda, [&](int r) {
            return contract_mode(1, s.A.col(r), s.C.col(r));
        });
        als_update_factor(s.C, s.A, s.B, s.lambda, [&](int r) {
            return contract_mode(2, s.A.col(r), s.B.col(r));
        });
        double denom = std::max(lambda_prev.norm(), 1e-300);
        if ((s.lambda - lambda_prev).norm() / denom < cfg.tol) break;
        lambda_prev = s.lambda;
    }
    CpDecomposition d;
    d.lambda = std::move(s.lambda);
    d.A = std::move(s.A);
    d.B = std::move(s.B);
    d.C = std::move(s.C);
    return d;
}

}  // namespace

CpDecomposition als_exact(const DenseTensor3& T, const AlsConfig& cfg) {
    return als_loop(T.n, cfg, [&](int mode, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return contract_mode_exact(T, mode, x, y);
    });
}

CpDecomposition als_fast(const AsymTensorSketchSet& set, const AlsConfig& cfg) {
    AsymContractionWorkspace ws(set);
    return als_loop(set.n(), cfg, [&](int mode, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return ws.mode_contraction(mode, x, y);
    });
}

EigengapReport eigengap_report(const CpDecomposition& D) {
    if (D.rank() < 1) throw std::invalid_argument("eigengap_report: empty decomposition");
    EigengapReport rep;
    rep.sorted_lambda = D.lambda;
    std::sort(rep.sorted_lambda.data(), rep.sorted_lambda.data() + rep.sorted_lambda.size(),
              std::greater<double>());
    const int k = static_cast<int>(rep.sorted_lambda.size());
    if (k == 1) {
        rep.delta = std::numeric_limits<double>::infinity();
        rep.ratio = 1.0;
    } else {
        rep.delta = std::numeric_limits<double>::infinity();
        for (int i = 0; i + 1 < k; ++i)
            rep.delta = std::min(rep.delta, rep.sorted_lambda[i] - rep.sorted_lambda[i + 1]);
        rep.ratio = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                if (rep.sorted_lambda[j] != 0.0)
                    rep.ratio = std::max(rep.ratio, rep.sorted_lambda[i] / rep.sorted_lambda[j]);
    }
    // Heuristic sketch-length advisory with epsilon = delta = 0.1; norms taken
    // from the decomposition itself.
    const double eps = 0.1, delta_prob = 0.1;
    double norm_sq = rep.sorted_lambda.squaredNorm();
    double n = static_cast<double>(D.dim());
    double lam1 = rep.sorted_lambda[0];
    double cand1 = std::isfinite(rep.delta) && rep.delta > 0
                       ? norm_sq / (eps * eps * rep.delta * rep.delta)
                       : norm_sq / (eps * eps);
    double cand2 = (lam1 != 0.0 && rep.ratio > 0)
                       ? n * n * norm_sq / (std::pow(delta_prob, 4) * rep.ratio * rep.ratio * lam1 * lam1)
                       : 0.0;
    double want = std::max({cand1, cand2, 2.0});
    rep.recommended_b = std::pow(2.0, std::ceil(std::log2(want)));
    return rep;
}

}  // namespace sketchcp
