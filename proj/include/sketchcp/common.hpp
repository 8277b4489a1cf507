// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

namespace sketchcp {

/// Input that cannot be parsed or violates a file-format contract.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure: rank deficiency, degenerate iteration, overflow of a cap.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A power iteration produced an all-zero update vector.
struct DegenerateIterationError : NumericalError {
    using NumericalError::NumericalError;
};

template <typename T, std::size_t Align = 64>
struct AlignedAllocator {
    using value_type = T;
    template <typename U>
    struct rebind {
        using other = AlignedAllocator<U, Align>;
    };
    AlignedAllocator() = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U, Align>&) {}
    T* allocate(std::size_t n) {
        void* p = std::aligned_alloc(Align, ((n * sizeof(T) + Align - 1) / Align) * Align);
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) noexcept { std::free(p); }
    template <typename U>
    bool operator==(const AlignedAllocator<U, Align>&) const { return true; }
};

/// Complex working vector, 64-byte aligned for the transform kernels.
using cvec = std::vector<std::complex<double>, AlignedAllocator<std::complex<double>>>;

inline std::complex<double>* data_ptr(cvec& v) { return v.data(); }
inline const std::complex<double>* data_ptr(const cvec& v) { return v.data(); }

inline bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

/// Median with the even-count convention: mean of the two middle order statistics.
/// Reorders `v`.
double median_inplace(std::vector<double>& v);

}  // namespace sketchcp
