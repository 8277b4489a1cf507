// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "sketchcp/rng.hpp"
#include "sketchcp/tensor.hpp"

using namespace sketchcp;

namespace {

DenseTensor3 random_tensor(int n, std::uint64_t seed) {
    Rng rng(seed);
    DenseTensor3 T(n);
    for (auto& x : T.entries) x = rng.gaussian();
    return T;
}

DenseTensor3 random_symmetric_tensor(int n, std::uint64_t seed) {
    Rng rng(seed);
    DenseTensor3 T(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k) {
                double v = rng.gaussian();
                int idx[3] = {i, j, k};
                std::sort(idx, idx + 3);
                T.at(i, j, k) = v;
                T.at(i, k, j) = v;
                T.at(j, i, k) = v;
                T.at(j, k, i) = v;
                T.at(k, i, j) = v;
                T.at(k, j, i) = v;
            }
    return T;
}

DenseTensor3 rank1(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    DenseTensor3 T(static_cast<int>(a.size()));
    for (int i = 0; i < T.n; ++i)
        for (int j = 0; j < T.n; ++j)
            for (int k = 0; k < T.n; ++k) T.at(i, j, k) = a[i] * b[j] * c[k];
    return T;
}

// Independent brute-force oracle, written against the definition only.
double vvv_oracle(const DenseTensor3& T, const Eigen::VectorXd& u) {
    double s = 0;
    for (int i = 0; i < T.n; ++i)
        for (int j = 0; j < T.n; ++j)
            for (int k = 0; k < T.n; ++k) s += T.at(i, j, k) * u[i] * u[j] * u[k];
    return s;
}

}  // namespace

TEST_CASE("vvv on an indicator tensor") {
    Eigen::VectorXd e1 = Eigen::VectorXd::Unit(2, 0);
    DenseTensor3 T = rank1(e1, e1, e1);
    CHECK(contract_vvv_exact(T, e1) == doctest::Approx(1.0));
}

TEST_CASE("vvv on a rank-1 tensor is the cubed inner product") {
    Rng rng(21);
    Eigen::VectorXd a = rng.gaussian_vector(5), u = rng.gaussian_vector(5);
    DenseTensor3 T = rank1(a, a, a);
    CHECK(contract_vvv_exact(T, u) == doctest::Approx(std::pow(a.dot(u), 3)).epsilon(1e-12));
}

TEST_CASE("vvv matches the brute-force oracle on a random tensor") {
    DenseTensor3 T = random_tensor(3, 5);
    Eigen::VectorXd u = Eigen::VectorXd::Constant(3, 1.0 / std::sqrt(3.0));
    CHECK(contract_vvv_exact(T, u) == doctest::Approx(vvv_oracle(T, u)).epsilon(1e-12));
}

TEST_CASE("contraction dimension mismatches are rejected") {
    DenseTensor3 T(3);
    Eigen::VectorXd u = Eigen::VectorXd::Ones(4);
    CHECK_THROWS_AS(contract_vvv_exact(T, u), std::invalid_argument);
    CHECK_THROWS_AS(contract_Ivv_exact(T, u, u), std::invalid_argument);
}

TEST_CASE("Ivv on an indicator tensor") {
    Eigen::VectorXd e1 = Eigen::VectorXd::Unit(2, 0);
    DenseTensor3 T = rank1(e1, e1, e1);
    Eigen::VectorXd out = contract_Ivv_exact(T, e1, e1);
    CHECK(out[0] == doctest::Approx(1.0));
    CHECK(out[1] == doctest::Approx(0.0));
}

TEST_CASE("Ivv is a third of the gradient for symmetric tensors") {
    DenseTensor3 T = random_symmetric_tensor(4, 8);
    Rng rng(9);
    Eigen::VectorXd u = rng.unit_sphere(4);
    Eigen::VectorXd tiuu = contract_Ivv_exact(T, u, u);
    const double h = 1e-5;
    for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd up = u, dn = u;
        up[i] += h;
        dn[i] -= h;
        double grad = (contract_vvv_exact(T, up) - contract_vvv_exact(T, dn)) / (2 * h);
        CHECK(tiuu[i] == doctest::Approx(grad / 3.0).epsilon(1e-6));
    }
}

TEST_CASE("Ivv with distinct vectors matches the unfolding product") {
    DenseTensor3 T = random_tensor(4, 33);
    Rng rng(34);
    Eigen::VectorXd u = rng.gaussian_vector(4), v = rng.gaussian_vector(4);
    Eigen::MatrixXd U = mode1_unfold(T);
    Eigen::MatrixXd kr = khatri_rao(u, v);  // flat (j*n+k) = u_j v_k
    Eigen::VectorXd expect = U * kr.col(0);
    Eigen::VectorXd got = contract_Ivv_exact(T, u, v);
    CHECK((got - expect).norm() < 1e-12);
}

TEST_CASE("vvv of Ivv consistency on symmetric tensors") {
    DenseTensor3 T = random_symmetric_tensor(5, 44);
    Rng rng(45);
    Eigen::VectorXd u = rng.unit_sphere(5);
    double direct = contract_vvv_exact(T, u);
    double via = contract_Ivv_exact(T, u, u).dot(u);
    CHECK(direct == doctest::Approx(via).epsilon(1e-12));
}

TEST_CASE("mode contractions match the definitional loops") {
    DenseTensor3 T = random_tensor(4, 55);
    Rng rng(56);
    Eigen::VectorXd x = rng.gaussian_vector(4), y = rng.gaussian_vector(4);
    Eigen::VectorXd m1 = contract_mode_exact(T, 1, x, y);
    Eigen::VectorXd m2 = contract_mode_exact(T, 2, x, y);
    for (int a = 0; a < 4; ++a) {
        double s1 = 0, s2 = 0;
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) s1 += T.at(i, a, k) * x[i] * y[k];
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) s2 += T.at(i, j, a) * x[i] * y[j];
        CHECK(m1[a] == doctest::Approx(s1).epsilon(1e-12));
        CHECK(m2[a] == doctest::Approx(s2).epsilon(1e-12));
    }
}

TEST_CASE("mode1 unfolding basics") {
    DenseTensor3 T1(1);
    T1.at(0, 0, 0) = 3.5;
    Eigen::MatrixXd M1 = mode1_unfold(T1);
    CHECK(M1.rows() == 1);
    CHECK(M1.cols() == 1);
    CHECK(M1(0, 0) == 3.5);

    Rng rng(66);
    Eigen::VectorXd a = rng.gaussian_vector(3), b = rng.gaussian_vector(3),
                    c = rng.gaussian_vector(3);
    Eigen::MatrixXd M = mode1_unfold(rank1(a, b, c));
    Eigen::VectorXd bc = khatri_rao(b, c).col(0);
    CHECK((M - a * bc.transpose()).norm() < 1e-12);
}

TEST_CASE("unfold then refold is the identity") {
    DenseTensor3 T = random_tensor(3, 77);
    DenseTensor3 R = mode1_refold(mode1_unfold(T));
    CHECK(R.entries == T.entries);
}

TEST_CASE("khatri-rao columns and shapes") {
    Rng rng(88);
    Eigen::VectorXd a = rng.gaussian_vector(3), b = rng.gaussian_vector(3);
    Eigen::MatrixXd kr = khatri_rao(a, b);
    CHECK(kr.rows() == 9);
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) CHECK(kr(j * 3 + k, 0) == doctest::Approx(a[j] * b[k]));

    Eigen::MatrixXd E = Eigen::MatrixXd::Identity(3, 3);
    Eigen::MatrixXd ke = khatri_rao(E.col(1), E.col(2));
    for (int r = 0; r < 9; ++r) CHECK(ke(r, 0) == (r == 1 * 3 + 2 ? 1.0 : 0.0));

    CHECK_THROWS_AS(khatri_rao(Eigen::MatrixXd::Ones(3, 2), Eigen::MatrixXd::Ones(3, 3)),
                    std::invalid_argument);
}

TEST_CASE("khatri-rao transpose-product identity") {
    Rng rng(99);
    Eigen::MatrixXd B = Eigen::MatrixXd::NullaryExpr(3, 2, [&](Eigen::Index, Eigen::Index) {
        return rng.gaussian();
    });
    Eigen::MatrixXd C = Eigen::MatrixXd::NullaryExpr(3, 2, [&](Eigen::Index, Eigen::Index) {
        return rng.gaussian();
    });
    Eigen::VectorXd x = rng.gaussian_vector(9);
    Eigen::MatrixXd X = Eigen::Map<const Eigen::MatrixXd>(x.data(), 3, 3);  // column-major
    Eigen::VectorXd lhs = khatri_rao(C, B).transpose() * x;
    for (int i = 0; i < 2; ++i)
        CHECK(lhs[i] == doctest::Approx(B.col(i).transpose() * X * C.col(i)).epsilon(1e-12));
}

TEST_CASE("cp residual of an exact reproduction and of the empty decomposition") {
    SynthTensor st = synth_orthogonal_tensor(10, 3, 0.0, 123);
    CHECK(cp_residual(st.tensor, st.truth) == doctest::Approx(0.0).epsilon(1e-12));

    CpDecomposition empty;
    empty.lambda.resize(0);
    empty.A.resize(10, 0);
    empty.B.resize(10, 0);
    empty.C.resize(10, 0);
    CHECK(cp_residual(st.tensor, empty) == doctest::Approx(st.tensor.frobenius_sq()));
}

TEST_CASE("sign-flipping one slot of a component leaves 4 lambda^2 residual") {
    SynthTensor st = synth_orthogonal_tensor(50, 5, 0.0, 321);
    const int flip = 2;
    CpDecomposition d = st.truth;
    d.A = st.truth.A;
    d.B = st.truth.A;
    d.C = st.truth.A;
    d.A.col(flip) *= -1.0;
    double lam = st.truth.lambda[flip];
    CHECK(cp_residual(st.tensor, d) == doctest::Approx(4 * lam * lam).epsilon(1e-9));
}

TEST_CASE("negating a symmetric component in all slots with its weight is a no-op") {
    SynthTensor st = synth_orthogonal_tensor(12, 4, 0.0, 55);
    CpDecomposition d = st.truth;
    d.A = st.truth.A;
    d.B = st.truth.A;
    d.C = st.truth.A;
    d.lambda = st.truth.lambda;
    d.A.col(1) *= -1.0;
    d.B.col(1) *= -1.0;
    d.C.col(1) *= -1.0;
    d.lambda[1] *= -1.0;
    CHECK(cp_residual(st.tensor, d) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("synthetic tensor: clean case is symmetric with unit norm at full rank") {
    SynthTensor st = synth_orthogonal_tensor(16, 16, 0.0, 7);
    CHECK(st.tensor.is_symmetric(1e-12));
    CHECK(std::sqrt(st.tensor.frobenius_sq()) == doctest::Approx(1.0).epsilon(1e-12));
    for (int c = 0; c < 16; ++c) CHECK(st.truth.A.col(c).norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(synth_orthogonal_tensor(4, 5, 0.0, 1), std::invalid_argument);
}

TEST_CASE("synthetic noise has the analytic Frobenius expectation") {
    const int n = 100;
    const double sigma = 0.01;
    const int seeds = 20;
    double mean = 0;
    for (int s = 0; s < seeds; ++s) {
        SynthTensor noisy = synth_orthogonal_tensor(n, 1, sigma, 1000 + s);
        SynthTensor clean = synth_orthogonal_tensor(n, 1, 0.0, 1000 + s);
        double diff = 0;
        for (std::size_t i = 0; i < noisy.tensor.entries.size(); ++i) {
            double d = noisy.tensor.entries[i] - clean.tensor.entries[i];
            diff += d * d;
        }
        mean += diff;
    }
    mean /= seeds;
    // E ||E||_F^2 = sigma^2 exactly; the standard error over 20 seeds follows
    // from the class-multiplicity variance of the mirrored draws.
    double analytic = sigma * sigma;
    double se = analytic * std::sqrt(12.0 / (std::pow(double(n), 3.0) * seeds));
    CHECK(std::abs(mean - analytic) < 3 * se);
}

TEST_CASE("materialize basics and the memory cap") {
    FactoredTensor F;
    F.n = 3;
    Eigen::VectorXd e1 = Eigen::VectorXd::Unit(3, 0);
    F.add_symmetric(1.0, e1);
    DenseTensor3 T = materialize(F);
    CHECK(T.at(0, 0, 0) == 1.0);
    CHECK(T.frobenius_sq() == doctest::Approx(1.0));

    FactoredTensor cancel;
    cancel.n = 3;
    Rng rng(2);
    Eigen::VectorXd u = rng.gaussian_vector(3), v = rng.gaussian_vector(3),
                    w = rng.gaussian_vector(3);
    cancel.add(1.0, u, v, w);
    cancel.add(-1.0, u, v, w);
    CHECK(materialize(cancel).frobenius_sq() == doctest::Approx(0.0));

    FactoredTensor big;
    big.n = 2000;
    CHECK_THROWS_AS(materialize(big), NumericalError);
}

TEST_CASE("materialize matches the accumulation oracle and the factored fast path") {
    const int n = 5;
    FactoredTensor F;
    F.n = n;
    Rng rng(27);
    for (int c = 0; c < 10; ++c)
        F.add(rng.gaussian(), rng.gaussian_vector(n), rng.gaussian_vector(n),
              rng.gaussian_vector(n));
    DenseTensor3 T = materialize(F);
    DenseTensor3 oracle(n);
    for (const auto& comp : F.components)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    oracle.at(i, j, k) += comp.weight * comp.u[i] * comp.v[j] * comp.w[k];
    double diff = 0;
    for (std::size_t i = 0; i < T.entries.size(); ++i)
        diff = std::max(diff, std::abs(T.entries[i] - oracle.entries[i]));
    CHECK(diff < 1e-12);

    Eigen::VectorXd x = rng.unit_sphere(n);
    CHECK(contract_vvv_exact(T, x) == doctest::Approx(factored_vvv(F, x)).epsilon(1e-10));
}

TEST_CASE("coo round trip, symmetric expansion and format errors") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "sketchcp_coo_test";
    fs::create_directories(dir);

    DenseTensor3 T = random_tensor(4, 5150);
    std::string full = (dir / "full.coo").string();
    save_coo(T, full);
    DenseTensor3 R = load_coo(full);
    CHECK(R.n == T.n);
    double diff = 0;
    for (std::size_t i = 0; i < T.entries.size(); ++i)
        diff = std::max(diff, std::abs(T.entries[i] - R.entries[i]));
    CHECK(diff < 1e-15);

    DenseTensor3 S = random_symmetric_tensor(4, 5151);
    std::string symf = (dir / "sym.coo").string();
    save_coo(S, symf, /*symmetric_only=*/true);
    DenseTensor3 SR = load_coo(symf);
    diff = 0;
    for (std::size_t i = 0; i < S.entries.size(); ++i)
        diff = std::max(diff, std::abs(S.entries[i] - SR.entries[i]));
    CHECK(diff < 1e-15);

    std::string bad = (dir / "bad.coo").string();
    {
        std::ofstream out(bad);
        out << "3 1\n1 5 1 2.0\n";
    }
    CHECK_THROWS_AS(load_coo(bad), FormatError);
    CHECK_THROWS_AS(load_coo((dir / "missing.coo").string()), FormatError);
}
