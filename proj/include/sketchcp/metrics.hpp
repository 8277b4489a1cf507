// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Core>

namespace sketchcp {

struct VectorMatch {
    int recovered;       // column in the recovered matrix
    int truth;           // column in the ground-truth matrix
    double cosine;       // |cos| of the pair
    double sq_distance;  // ||v_truth - sign * v_rec||^2 after sign alignment
};

/// Greedy maximum-|cosine| assignment between recovered and ground-truth
/// columns with sign alignment. Every recovered column gets a distinct truth
/// column (requires truth.cols() >= recovered.cols()).
std::vector<VectorMatch> greedy_match(const Eigen::MatrixXd& recovered,
                                      const Eigen::MatrixXd& truth);

/// Matches with sq_distance above the threshold (0.1 by convention).
int wrong_vector_count(const std::vector<VectorMatch>& matches, double threshold = 0.1);

}  // namespace sketchcp
