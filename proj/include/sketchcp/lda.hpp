// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "sketchcp/sketch.hpp"
#include "sketchcp/tensor.hpp"

namespace sketchcp {

/// Bag-of-words document: parallel word-id / count arrays, ids in [0, V).
struct Document {
    std::vector<int> word;
    std::vector<int> count;
    long long total = 0;  // sum of counts
};

struct Corpus {
    int V = 0;
    std::vector<Document> docs;

    long long total_tokens() const;
};

/// UCI docword format: three header lines D, W, NNZ, then "docID wordID count"
/// (1-indexed).
Corpus load_docword(const std::string& path);
void save_docword(const Corpus& c, const std::string& path);

/// One token per line; line number (1-based) is the word id.
std::vector<std::string> load_vocabulary(const std::string& path);

struct LdaModel {
    Eigen::MatrixXd Phi;    // V x k, column-stochastic
    Eigen::VectorXd alpha;  // positive
    double alpha0() const { return alpha.sum(); }
    int vocab() const { return static_cast<int>(Phi.rows()); }
    int topics() const { return static_cast<int>(Phi.cols()); }
};

struct WhiteningMap {
    Eigen::MatrixXd W;         // V x k, W' M2 W = I on the input moment
    Eigen::MatrixXd unwhiten;  // (W^dagger)^T = U sqrt(S), V x k
    Eigen::VectorXd singular_values;
};

/// Mean normalized word frequency over documents.
Eigen::VectorXd compute_m1(const Corpus& c);

/// Unbiased within-document pair moment minus the alpha0/(alpha0+1) rank-1
/// correction. Documents shorter than 2 are excluded from the average.
Eigen::MatrixXd compute_m2(const Corpus& c, double alpha0);

WhiteningMap whiten(const Eigen::MatrixXd& m2hat, int k);

struct StreamStats {
    long long used = 0;
    long long skipped = 0;  // documents shorter than 3 words
};

/// Single pass over the corpus accumulating the sketch of the whitened third
/// moment into `set` (set dimension must equal the whitening rank). Per
/// document only the rank-1 sketch of p = W'n is transformed; the vocabulary
/// terms are accumulated in running buffers and sketched after the pass.
StreamStats sketch_whitened_m3(const Corpus& c, const WhiteningMap& wm, double alpha0,
                               SymTensorSketchSet& set);

/// Topic/prior recovery from a symmetric CP decomposition of the whitened
/// third moment; recovered topic columns are projected to the simplex.
LdaModel recover_params(const CpDecomposition& D, const WhiteningMap& wm, double alpha0);

/// Average per-word held-out log-likelihood; per-document topic mixtures fit
/// by simplex-projected gradient descent. Words with vanishing probability
/// are floored at 1e-12 and counted into *floored_words when given.
double heldout_likelihood(const LdaModel& m, const Corpus& held,
                          long long* floored_words = nullptr);

struct SyntheticCorpus {
    Corpus corpus;
    LdaModel truth;
};

SyntheticCorpus generate_synthetic_corpus(int V, int k, int D, const Eigen::VectorXd& alpha,
                                          int doc_len, std::uint64_t seed);

/// Closed-form M2 of a model (the infinite-data limit).
Eigen::MatrixXd analytic_m2(const LdaModel& m);

/// Closed-form M3(W, W, W) of a model as a dense k^3 tensor.
DenseTensor3 analytic_m3_whitened(const LdaModel& m, const WhiteningMap& wm);

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& y);

}  // namespace sketchcp
