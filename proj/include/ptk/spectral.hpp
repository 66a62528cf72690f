// Frequency-domain transforms and bearing defect frequencies.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ptk/errors.hpp"

namespace ptk {

struct Spectrum {
    std::vector<std::complex<double>> bins;
    double resolution_hz = 1.0; // sample_rate / n

    std::size_t size() const { return bins.size(); }
    double magnitude(std::size_t k) const { return std::abs(bins[k]); }
};

// Direct evaluation of bin[k] = sum_t x[t] e^{-j 2 pi k t / n}. O(n^2).
inline Spectrum dft(std::span<const double> signal, double sample_rate_hz = 1.0) {
    const std::size_t n = signal.size();
    Spectrum spec;
    spec.resolution_hz = sample_rate_hz / static_cast<double>(n);
    spec.bins.resize(n);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = step * static_cast<double>(k) * static_cast<double>(t);
            acc += signal[t] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        spec.bins[k] = acc;
    }
    return spec;
}

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey.
inline void fft_in_place(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

} // namespace detail

// Same contract as dft, O(n log n); requires power-of-two length.
inline Spectrum fft(std::span<const double> signal, double sample_rate_hz = 1.0) {
    const std::size_t n = signal.size();
    if (!detail::is_power_of_two(n))
        throw NotPowerOfTwo("fft length must be a power of two, got " + std::to_string(n));
    Spectrum spec;
    spec.resolution_hz = sample_rate_hz / static_cast<double>(n);
    spec.bins.assign(signal.begin(), signal.end());
    detail::fft_in_place(spec.bins);
    return spec;
}

enum class Defect { InnerRing, OuterRing, CageTrain, RollingElement };

inline const char* to_string(Defect d) {
    switch (d) {
        case Defect::InnerRing: return "inner_ring";
        case Defect::OuterRing: return "outer_ring";
        case Defect::CageTrain: return "cage_train";
        case Defect::RollingElement: return "rolling_element";
    }
    return "?";
}

// Defect frequency multipliers per shaft revolution for the SKF 6205-size
// geometry used by the CWRU test rig.
inline double defect_multiplier(Defect d) {
    switch (d) {
        case Defect::InnerRing: return 5.4152;
        case Defect::OuterRing: return 3.5848;
        case Defect::CageTrain: return 0.3983;
        case Defect::RollingElement: return 4.7135;
    }
    return 0.0;
}

inline double fault_frequency(Defect defect, double rpm) {
    return defect_multiplier(defect) * rpm / 60.0;
}

} // namespace ptk
