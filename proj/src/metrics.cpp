// SPDX-License-Identifier: Apache-2.0
#include "sketchcp/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace sketchcp {

std::vector<VectorMatch> greedy_match(const Eigen::MatrixXd& recovered,
                                      const Eigen::MatrixXd& truth) {
    const int r = static_cast<int>(recovered.cols());
    const int g = static_cast<int>(truth.cols());
    if (g < r) throw std::invalid_argument("greedy_match: fewer truth columns than recovered");
    Eigen::MatrixXd cos(r, g);
    for (int i = 0; i < r; ++i) {
        double ni = recovered.col(i).norm();
        for (int j = 0; j < g; ++j) {
            double nj = truth.col(j).norm();
            double denom = std::max(ni * nj, 1e-300);
            cos(i, j) = std::abs(recovered.col(i).dot(truth.col(j))) / denom;
        }
    }
    std::vector<bool> used_r(r, false), used_g(g, false);
    std::vector<VectorMatch> out;
    for (int step = 0; step < r; ++step) {
        double best = -1.0;
        int bi = -1, bj = -1;
        for (int i = 0; i < r; ++i) {
            if (used_r[i]) continue;
            for (int j = 0; j < g; ++j) {
                if (used_g[j]) continue;
                if (cos(i, j) > best) {
                    best = cos(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        used_r[bi] = true;
        used_g[bj] = true;
        double sign = recovered.col(bi).dot(truth.col(bj)) >= 0 ? 1.0 : -1.0;
        double d = (truth.col(bj) - sign * recovered.col(bi)).squaredNorm();
        out.push_back({bi, bj, best, d});
    }
    return out;
}

int wrong_vector_count(const std::vector<VectorMatch>& matches, double threshold) {
    int c = 0;
    for (const auto& m : matches)
        if (m.sq_distance > threshold) ++c;
    return c;
}

}  // namespace sketchcp
