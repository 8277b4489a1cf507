// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "sketchcp/common.hpp"

namespace sketchcp::fft {

// Unnormalized forward DFT; inverse carries the 1/b factor so that
// inverse(forward(x)) == x. Length must be a power of two. Plans are
// created once per length (FFTW, deterministic planner) and shared;
// execution is thread-safe on caller-owned buffers.

void forward_inplace(cvec& x);
void inverse_inplace(cvec& x);

/// Inverse transform without the 1/b scaling, for callers that fold the
/// factor into a later O(n) step.
void inverse_inplace_unscaled(cvec& x);

/// z[t] = sum_{(i+j) mod b = t} x[i] y[j].
cvec circular_convolve(const cvec& x, const cvec& y);

/// Total transforms executed so far (test hook for complexity contracts).
std::uint64_t transform_count();

}  // namespace sketchcp::fft
