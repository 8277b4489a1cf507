// SPDX-License-Identifier: Apache-2.0
#include "sketchcp/fft.hpp"

#include <fftw3.h>

#include <atomic>
#include <map>
#include <mutex>

namespace sketchcp::fft {

namespace {

std::atomic<std::uint64_t> g_transform_count{0};

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

// One in-place plan pair per length. FFTW_ESTIMATE keeps the algorithm
// choice independent of runtime measurements, so results are reproducible
// run to run. Buffers passed to execute must share the scratch alignment;
// cvec's 64-byte allocator guarantees that.
const PlanPair& plans_for(std::size_t b) {
    static std::mutex mu;
    static std::map<std::size_t, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(b);
    if (it != cache.end()) return it->second;

    fftw_complex* scratch = fftw_alloc_complex(b);
    PlanPair p;
    p.fwd = fftw_plan_dft_1d(static_cast<int>(b), scratch, scratch, FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_1d(static_cast<int>(b), scratch, scratch, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(scratch);
    return cache.emplace(b, p).first->second;
}

void check_length(const cvec& x) {
    if (!is_power_of_two(x.size()))
        throw std::invalid_argument("fft: length must be a power of two, got " +
                                    std::to_string(x.size()));
}

}  // namespace

void forward_inplace(cvec& x) {
    check_length(x);
    auto* p = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(plans_for(x.size()).fwd, p, p);
    g_transform_count.fetch_add(1, std::memory_order_relaxed);
}

void inverse_inplace_unscaled(cvec& x) {
    check_length(x);
    auto* p = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(plans_for(x.size()).bwd, p, p);
    g_transform_count.fetch_add(1, std::memory_order_relaxed);
}

void inverse_inplace(cvec& x) {
    inverse_inplace_unscaled(x);
    const double s = 1.0 / static_cast<double>(x.size());
    for (auto& v : x) v *= s;
}

cvec circular_convolve(const cvec& x, const cvec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("circular_convolve: length mismatch");
    check_length(x);
    cvec fx = x, fy = y;
    forward_inplace(fx);
    forward_inplace(fy);
    for (std::size_t t = 0; t < fx.size(); ++t) fx[t] *= fy[t];
    inverse_inplace(fx);
    return fx;
}

std::uint64_t transform_count() { return g_transform_count.load(std::memory_order_relaxed); }

}  // namespace sketchcp::fft
