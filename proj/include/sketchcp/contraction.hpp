// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sketchcp/sketch.hpp"

namespace sketchcp {

// Approximate contractions evaluated directly on sketches, O(n + b log b)
// per replicate. Workspaces cache the forward transform of each replicate's
// tensor sketch and refresh lazily when the set's version changes.

class SymContractionWorkspace {
public:
    explicit SymContractionWorkspace(const SymTensorSketchSet& set);

    /// Median-of-B estimate of T(u,u,u).
    double vvv(const Eigen::VectorXd& u);

    /// Per-coordinate median-of-B estimate of T(I,u,u).
    Eigen::VectorXd Ivv(const Eigen::VectorXd& u);

    /// Cached forward transform of replicate m's data (test hook).
    const cvec& cached_transform(int m);

    const SymTensorSketchSet& set() const { return *set_; }

private:
    void ensure_fresh();
    struct Scratch {
        cvec f1, f2, z1, z2;
    };
    Scratch& scratch_for_thread();

    const SymTensorSketchSet* set_;
    std::uint64_t cached_version_;
    std::vector<cvec> fourier_data_;
    std::vector<Scratch> scratch_;
    std::vector<double> vals_;
};

class AsymContractionWorkspace {
public:
    explicit AsymContractionWorkspace(const AsymTensorSketchSet& set);

    /// Median-of-B estimate of T(u,u,u).
    double vvv(const Eigen::VectorXd& u);

    /// Per-coordinate median-of-B estimate of T(I,u,u).
    Eigen::VectorXd Ivv(const Eigen::VectorXd& u);

    /// T(I,b,c): slot-2 sketch of bvec, slot-3 sketch of cvec, read with slot 1.
    Eigen::VectorXd Ibc(const Eigen::VectorXd& bvec, const Eigen::VectorXd& cvec_);

    /// Contraction leaving `free_mode` (0,1,2) open; x and y fill the other
    /// two slots in mode order. free_mode=0 is Ibc.
    Eigen::VectorXd mode_contraction(int free_mode, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y);

    const cvec& cached_transform(int m);

    const AsymTensorSketchSet& set() const { return *set_; }

private:
    void ensure_fresh();
    struct Scratch {
        cvec fx, fy, z;
    };
    Scratch& scratch_for_thread();

    const AsymTensorSketchSet* set_;
    std::uint64_t cached_version_;
    std::vector<cvec> fourier_data_;
    std::vector<Scratch> scratch_;
    std::vector<double> vals_;
};

}  // namespace sketchcp
