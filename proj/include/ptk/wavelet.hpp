// Orthogonal discrete wavelet transform implemented as a periodized
// filter bank. Only the Daubechies db4 family (8 taps, 4 vanishing
// moments) is provided; that is the wavelet the feature pipeline uses.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ptk/errors.hpp"

namespace ptk {

struct WaveletDecomposition {
    int levels = 0;
    std::vector<double> approximation;        // deepest level
    std::vector<std::vector<double>> details; // ordered deepest-first
    std::string wavelet_name = "db4";
    std::size_t signal_length = 0;
};

namespace db4 {

// Daubechies-4 analysis low-pass filter. The high-pass is the alternating
// flip g[k] = (-1)^k h[7-k]. Validated by the orthonormality and
// vanishing-moment property tests rather than typed-in transforms.
inline constexpr std::array<double, 8> lowpass = {
    0.230377813308855230,  0.714846570552541500,  0.630880767929590400,
    -0.027983769416983850, -0.187034811718881140, 0.030841381835986965,
    0.032883011666982945,  -0.010597401784997278,
};

inline constexpr std::array<double, 8> highpass = [] {
    std::array<double, 8> g{};
    for (std::size_t k = 0; k < 8; ++k)
        g[k] = (k % 2 == 0 ? 1.0 : -1.0) * lowpass[7 - k];
    return g;
}();

} // namespace db4

namespace detail {

// One periodized analysis step: n even, outputs n/2 approximation and
// n/2 detail coefficients.
inline void dwt_step(std::span<const double> x, std::vector<double>& approx,
                     std::vector<double>& detail) {
    const std::size_t n = x.size();
    const std::size_t half = n / 2;
    approx.resize(half);
    detail.resize(half);
    for (std::size_t i = 0; i < half; ++i) {
        double a = 0.0, d = 0.0;
        for (std::size_t k = 0; k < 8; ++k) {
            const double v = x[(2 * i + k) % n];
            a += db4::lowpass[k] * v;
            d += db4::highpass[k] * v;
        }
        approx[i] = a;
        detail[i] = d;
    }
}

// Adjoint of dwt_step; exact inverse because the filter bank is orthogonal.
inline std::vector<double> idwt_step(std::span<const double> approx,
                                     std::span<const double> detail) {
    const std::size_t half = approx.size();
    const std::size_t n = 2 * half;
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
        for (std::size_t k = 0; k < 8; ++k) {
            const std::size_t m = (2 * i + k) % n;
            x[m] += db4::lowpass[k] * approx[i] + db4::highpass[k] * detail[i];
        }
    }
    return x;
}

} // namespace detail

inline WaveletDecomposition dwt_decompose(std::span<const double> signal,
                                          const std::string& wavelet = "db4", int levels = 1) {
    if (wavelet != "db4") throw Error("unsupported wavelet: " + wavelet);
    const std::size_t n = signal.size();
    if (levels < 1) throw TooManyLevels("levels must be >= 1");
    if (n < 2 || levels > static_cast<int>(std::floor(std::log2(double(n)))))
        throw TooManyLevels("levels " + std::to_string(levels) + " too deep for length " +
                            std::to_string(n));

    WaveletDecomposition out;
    out.levels = levels;
    out.wavelet_name = wavelet;
    out.signal_length = n;
    out.details.resize(static_cast<std::size_t>(levels));

    std::vector<double> current(signal.begin(), signal.end());
    for (int level = 0; level < levels; ++level) {
        if (current.size() % 2 != 0)
            throw TooManyLevels("length " + std::to_string(current.size()) +
                                " at level " + std::to_string(level + 1) + " is odd");
        std::vector<double> approx, detail;
        detail::dwt_step(current, approx, detail);
        // details stored deepest-first: level L-1 ends up at index 0
        out.details[static_cast<std::size_t>(levels - 1 - level)] = std::move(detail);
        current = std::move(approx);
    }
    out.approximation = std::move(current);
    return out;
}

inline std::vector<double> dwt_reconstruct(const WaveletDecomposition& dec) {
    if (dec.levels < 1 || dec.details.size() != static_cast<std::size_t>(dec.levels))
        throw ShapeMismatch("decomposition has inconsistent level count");
    std::vector<double> current = dec.approximation;
    for (const auto& detail : dec.details) {
        if (detail.size() != current.size())
            throw ShapeMismatch("detail length " + std::to_string(detail.size()) +
                                " does not match approximation length " +
                                std::to_string(current.size()));
        current = detail::idwt_step(current, detail);
    }
    return current;
}

} // namespace ptk
