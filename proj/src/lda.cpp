// SPDX-License-Identifier: Apache-2.0
#include "sketchcp/lda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "sketchcp/rng.hpp"

namespace sketchcp {

namespace {

inline std::complex<double> root4(unsigned e) {
    switch (e & 3u) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Count sketch of a k-vector under a replicate's hash/sign, already in the
// Fourier domain.
void fourier_sketch(const SymTensorSketchSet::Replicate& rep, std::uint32_t b,
                    const Eigen::VectorXd& v, cvec& out) {
    out.assign(b, {0.0, 0.0});
    for (int i = 0; i < v.size(); ++i) out[rep.bucket1[i]] += root4(rep.sexp[i]) * v[i];
    fft::forward_inplace(out);
}

}  // namespace

long long Corpus::total_tokens() const {
    long long t = 0;
    for (const auto& d : docs) t += d.total;
    return t;
}

Corpus load_docword(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open docword file: " + path);
    long long D = 0, W = 0, NNZ = 0;
    if (!(in >> D >> W >> NNZ) || D <= 0 || W <= 0 || NNZ < 0)
        throw FormatError(path + ": docword header must be three positive counts");
    Corpus c;
    c.V = static_cast<int>(W);
    c.docs.resize(D);
    for (long long e = 0; e < NNZ; ++e) {
        long long doc, word, count;
        if (!(in >> doc >> word >> count))
            throw FormatError(path + ": truncated entry list at record " + std::to_string(e + 1));
        if (doc < 1 || doc > D || word < 1 || word > W || count < 1)
            throw FormatError(path + ": invalid entry at record " + std::to_string(e + 1));
        auto& d = c.docs[doc - 1];
        d.word.push_back(static_cast<int>(word - 1));
        d.count.push_back(static_cast<int>(count));
        d.total += count;
    }
    return c;
}

void save_docword(const Corpus& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write docword file: " + path);
    long long nnz = 0;
    for (const auto& d : c.docs) nnz += static_cast<long long>(d.word.size());
    out << c.docs.size() << '\n' << c.V << '\n' << nnz << '\n';
    for (std::size_t d = 0; d < c.docs.size(); ++d)
        for (std::size_t i = 0; i < c.docs[d].word.size(); ++i)
            out << (d + 1) << ' ' << (c.docs[d].word[i] + 1) << ' ' << c.docs[d].count[i] << '\n';
}

std::vector<std::string> load_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open vocabulary file: " + path);
    std::vector<std::string> vocab;
    std::string line;
    while (std::getline(in, line)) vocab.push_back(line);
    while (!vocab.empty() && vocab.back().empty()) vocab.pop_back();
    return vocab;
}

Eigen::VectorXd compute_m1(const Corpus& c) {
    if (c.docs.empty()) throw NumericalError("compute_m1: empty corpus");
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(c.V);
    long long used = 0;
    for (const auto& d : c.docs) {
        if (d.total < 1) continue;
        double scale = 1.0 / static_cast<double>(d.total);
        for (std::size_t i = 0; i < d.word.size(); ++i) m1[d.word[i]] += scale * d.count[i];
        ++used;
    }
    if (used == 0) throw NumericalError("compute_m1: no nonempty documents");
    return m1 / static_cast<double>(used);
}

Eigen::MatrixXd compute_m2(const Corpus& c, double alpha0) {
    Eigen::VectorXd m1 = compute_m1(c);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(c.V, c.V);
    long long used = 0;
    for (const auto& d : c.docs) {
        if (d.total < 2) continue;
        ++used;
        double scale = 1.0 / (static_cast<double>(d.total) * (d.total - 1));
        for (std::size_t a = 0; a < d.word.size(); ++a)
            for (std::size_t b = 0; b < d.word.size(); ++b) {
                double pair = (a == b) ? static_cast<double>(d.count[a]) * (d.count[a] - 1)
                                       : static_cast<double>(d.count[a]) * d.count[b];
                m2(d.word[a], d.word[b]) += scale * pair;
            }
    }
    if (used == 0) throw NumericalError("compute_m2: no documents with at least 2 words");
    m2 /= static_cast<double>(used);
    m2 -= (alpha0 / (alpha0 + 1.0)) * (m1 * m1.transpose());
    return m2;
}

WhiteningMap whiten(const Eigen::MatrixXd& m2hat, int k) {
    if (m2hat.rows() != m2hat.cols()) throw std::invalid_argument("whiten: matrix must be square");
    if (k < 1 || k > m2hat.rows()) throw std::invalid_argument("whiten: invalid target rank");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m2hat);
    const Eigen::VectorXd& d = es.eigenvalues();  // ascending
    const int V = static_cast<int>(m2hat.rows());
    WhiteningMap wm;
    wm.W.resize(V, k);
    wm.unwhiten.resize(V, k);
    wm.singular_values.resize(k);
    for (int c = 0; c < k; ++c) {
        double ev = d[V - 1 - c];
        if (!(ev > 1e-10))
            throw NumericalError("whiten: moment matrix is rank deficient at component " +
                                 std::to_string(c + 1) + " (eigenvalue " + std::to_string(ev) + ")");
        wm.singular_values[c] = ev;
        wm.W.col(c) = es.eigenvectors().col(V - 1 - c) / std::sqrt(ev);
        wm.unwhiten.col(c) = es.eigenvectors().col(V - 1 - c) * std::sqrt(ev);
    }
    return wm;
}

StreamStats sketch_whitened_m3(const Corpus& c, const WhiteningMap& wm, double alpha0,
                               SymTensorSketchSet& set) {
    const int k = static_cast<int>(wm.W.cols());
    const int V = c.V;
    if (wm.W.rows() != V) throw std::invalid_argument("sketch_whitened_m3: vocabulary mismatch");
    if (set.n() != k)
        throw std::invalid_argument("sketch_whitened_m3: set dimension must equal whitening rank");
    const std::uint32_t b = set.b();
    const int B = set.replicates();

    // Pass over documents: whitened count vectors p_d plus the running
    // vocabulary accumulators that make the w_i terms O(V) FFTs total.
    StreamStats stats;
    std::vector<Eigen::VectorXd> P;
    std::vector<double> scale1, scale2;
    Eigen::VectorXd coeff1 = Eigen::VectorXd::Zero(V);  // weights of w_i^(x)3
    Eigen::VectorXd coeff2 = Eigen::VectorXd::Zero(V);  // dropped pair-repetition cross weights
    Eigen::MatrixXd sumwn = Eigen::MatrixXd::Zero(V, k);
    for (const auto& d : c.docs) {
        if (d.total < 3) {
            ++stats.skipped;
            continue;
        }
        ++stats.used;
        const double m = static_cast<double>(d.total);
        const double s1 = 1.0 / (m * (m - 1.0) * (m - 2.0));
        const double s2 = alpha0 / ((alpha0 + 2.0) * m * (m - 1.0));
        Eigen::VectorXd p = Eigen::VectorXd::Zero(k);
        for (std::size_t i = 0; i < d.word.size(); ++i)
            p.noalias() += static_cast<double>(d.count[i]) * wm.W.row(d.word[i]).transpose();
        for (std::size_t i = 0; i < d.word.size(); ++i) {
            int w = d.word[i];
            double cnt = d.count[i];
            coeff1[w] += 2.0 * s1 * cnt;
            coeff2[w] += s2 * cnt;
            sumwn.row(w) += s1 * cnt * p.transpose();
        }
        P.push_back(std::move(p));
        scale1.push_back(s1);
        scale2.push_back(s2);
    }
    if (stats.used == 0) throw NumericalError("sketch_whitened_m3: no documents with >= 3 words");

    Eigen::VectorXd m1 = compute_m1(c);
    Eigen::VectorXd q = wm.W.transpose() * m1;
    const double inv_docs = 1.0 / static_cast<double>(stats.used);
    const double m1_coeff = 2.0 * alpha0 * alpha0 / ((alpha0 + 1.0) * (alpha0 + 2.0));

    // Everything accumulates in the Fourier domain; one inverse transform per
    // replicate at the end.
#pragma omp parallel for schedule(static)
    for (int m = 0; m < B; ++m) {
        auto& rep = set.mutable_replicate(m);
        cvec acc(b, {0.0, 0.0});    // Fourier accumulator of the full sketch
        cvec cross(b, {0.0, 0.0});  // sum of scale2 * F(s_p)^2, joined with F(s_q) later
        cvec fp(b), fq(b), fw(b), fs(b);
        for (std::size_t d = 0; d < P.size(); ++d) {
            fourier_sketch(rep, b, P[d], fp);
            for (std::uint32_t t = 0; t < b; ++t) {
                std::complex<double> sq = fp[t] * fp[t];
                acc[t] += scale1[d] * (sq * fp[t]);
                cross[t] += scale2[d] * sq;
            }
        }
        fourier_sketch(rep, b, q, fq);
        // Three placements of the p (x) p (x) q cross term share one colliding sketch.
        for (std::uint32_t t = 0; t < b; ++t) acc[t] -= 3.0 * cross[t] * fq[t];
        for (int i = 0; i < V; ++i) {
            fourier_sketch(rep, b, wm.W.row(i).transpose(), fw);
            fourier_sketch(rep, b, sumwn.row(i).transpose(), fs);
            for (std::uint32_t t = 0; t < b; ++t) {
                std::complex<double> w2 = fw[t] * fw[t];
                acc[t] += w2 * (coeff1[i] * fw[t] - 3.0 * fs[t]);
            }
        }
        for (std::uint32_t t = 0; t < b; ++t)
            acc[t] = acc[t] * inv_docs + m1_coeff * (fq[t] * fq[t] * fq[t]);
        fft::inverse_inplace(acc);
        for (std::uint32_t t = 0; t < b; ++t) rep.data[t] += acc[t];
    }
    return stats;
}

LdaModel recover_params(const CpDecomposition& D, const WhiteningMap& wm, double alpha0) {
    const int k = D.rank();
    if (k < 1) throw std::invalid_argument("recover_params: empty decomposition");
    if (D.A.rows() != wm.W.cols())
        throw std::invalid_argument("recover_params: decomposition/whitening rank mismatch");
    LdaModel m;
    m.alpha.resize(k);
    m.Phi.resize(wm.W.rows(), k);
    for (int i = 0; i < k; ++i) {
        double lam = D.lambda[i];
        if (lam == 0.0)
            throw NumericalError("recover_params: zero eigenvalue at component " +
                                 std::to_string(i + 1));
        m.alpha[i] = 4.0 * alpha0 * (alpha0 + 1.0) / ((alpha0 + 2.0) * (alpha0 + 2.0) * lam * lam);
        Eigen::VectorXd mu = 0.5 * (alpha0 + 2.0) * lam * (wm.unwhiten * D.A.col(i));
        m.Phi.col(i) = project_to_simplex(mu);
    }
    return m;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& y) {
    const int n = static_cast<int>(y.size());
    std::vector<double> u(y.data(), y.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0;
    double theta = 0;
    int rho = 0;
    for (int i = 0; i < n; ++i) {
        css += u[i];
        double t = (css - 1.0) / (i + 1);
        if (u[i] - t > 0) {
            rho = i + 1;
            theta = t;
        }
    }
    if (rho == 0) {
        // all mass collapsed; fall back to uniform
        return Eigen::VectorXd::Constant(n, 1.0 / n);
    }
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = std::max(y[i] - theta, 0.0);
    return x;
}

double heldout_likelihood(const LdaModel& m, const Corpus& held, long long* floored_words) {
    const int k = m.topics();
    const int V = m.vocab();
    if (held.V > V)
        throw std::invalid_argument("heldout_likelihood: corpus vocabulary exceeds the model's");
    long long floored = 0;
    double total = 0;
    long long used = 0;

    Eigen::MatrixXd gram = m.Phi.transpose() * m.Phi;  // k x k
    double lips = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().maxCoeff();
    double step = lips > 0 ? 1.0 / lips : 1.0;

    for (const auto& d : held.docs) {
        if (d.total < 1) continue;
        ++used;
        Eigen::VectorXd pi;
        if (k == 1) {
            pi = Eigen::VectorXd::Ones(1);
        } else {
            // min_{pi in simplex} || w - Phi pi ||^2 by projected gradient
            Eigen::VectorXd phi_tw = Eigen::VectorXd::Zero(k);
            double inv_m = 1.0 / static_cast<double>(d.total);
            for (std::size_t i = 0; i < d.word.size(); ++i)
                phi_tw.noalias() +=
                    (inv_m * d.count[i]) * m.Phi.row(d.word[i]).transpose();
            pi = Eigen::VectorXd::Constant(k, 1.0 / k);
            for (int it = 0; it < 500; ++it) {
                Eigen::VectorXd grad = gram * pi - phi_tw;
                Eigen::VectorXd next = project_to_simplex(pi - step * grad);
                double moved = (next - pi).norm();
                pi = next;
                if (moved <= 1e-8) break;
            }
        }
        double ll = 0;
        for (std::size_t i = 0; i < d.word.size(); ++i) {
            double p = m.Phi.row(d.word[i]) * pi;
            if (p < 1e-12) {
                p = 1e-12;
                ++floored;
            }
            ll += d.count[i] * std::log(p);
        }
        total += ll / static_cast<double>(d.total);
    }
    if (floored_words) *floored_words = floored;
    if (used == 0) throw NumericalError("heldout_likelihood: empty held-out corpus");
    return total / static_cast<double>(used);
}

SyntheticCorpus generate_synthetic_corpus(int V, int k, int D, const Eigen::VectorXd& alpha,
                                          int doc_len, std::uint64_t seed) {
    if (V < 1 || k < 1 || D < 1 || doc_len < 1 || alpha.size() != k || alpha.minCoeff() <= 0)
        throw std::invalid_argument("generate_synthetic_corpus: invalid parameters");
    SyntheticCorpus out;
    out.truth.alpha = alpha;
    out.truth.Phi.resize(V, k);
    Rng topic_rng(derive_seed(seed, seed_tag::kLdaTopics));
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(V);
    for (int c = 0; c < k; ++c) out.truth.Phi.col(c) = topic_rng.dirichlet(ones);

    out.corpus.V = V;
    out.corpus.docs.resize(D);
    Rng doc_rng(derive_seed(seed, seed_tag::kLdaDoc));
    std::vector<double> cdf(V);
    std::vector<int> counts(V);
    for (int d = 0; d < D; ++d) {
        Eigen::VectorXd h = doc_rng.dirichlet(alpha);
        Eigen::VectorXd mix = out.truth.Phi * h;
        double acc = 0;
        for (int w = 0; w < V; ++w) {
            acc += mix[w];
            cdf[w] = acc;
        }
        std::fill(counts.begin(), counts.end(), 0);
        for (int t = 0; t < doc_len; ++t) {
            double r = doc_rng.uniform() * acc;
            int w = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
            if (w >= V) w = V - 1;
            ++counts[w];
        }
        auto& doc = out.corpus.docs[d];
        for (int w = 0; w < V; ++w)
            if (counts[w] > 0) {
                doc.word.push_back(w);
                doc.count.push_back(counts[w]);
                doc.total += counts[w];
            }
    }
    return out;
}

Eigen::MatrixXd analytic_m2(const LdaModel& m) {
    double a0 = m.alpha0();
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(m.vocab(), m.vocab());
    for (int i = 0; i < m.topics(); ++i)
        m2 += m.alpha[i] * (m.Phi.col(i) * m.Phi.col(i).transpose());
    return m2 / (a0 * (a0 + 1.0));
}

DenseTensor3 analytic_m3_whitened(const LdaModel& m, const WhiteningMap& wm) {
    const int k = static_cast<int>(wm.W.cols());
    double a0 = m.alpha0();
    double coeff = 2.0 / (a0 * (a0 + 1.0) * (a0 + 2.0));
    DenseTensor3 T(k);
    for (int c = 0; c < m.topics(); ++c) {
        Eigen::VectorXd v = wm.W.transpose() * m.Phi.col(c);
        double w = coeff * m.alpha[c];
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                for (int l = 0; l < k; ++l) T.at(i, j, l) += w * v[i] * v[j] * v[l];
    }
    return T;
}

}  // namespace sketchcp
