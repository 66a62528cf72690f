// Continuous wavelet transform with the Morlet wavelet, and scaleogram
// utilities (log-spaced scale grids, bilinear resize).

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "ptk/errors.hpp"

namespace ptk {

// |CWT| magnitudes over a (scale x time) grid. Row i corresponds to
// scales[i], column t to sample index t.
struct Scaleogram {
    std::vector<double> scales; // ascending
    std::vector<double> times;  // sample indices
    std::vector<double> magnitudes; // scales.size() x times.size(), row-major

    std::size_t height() const { return scales.size(); }
    std::size_t width() const { return times.size(); }
    double at(std::size_t row, std::size_t col) const { return magnitudes[row * width() + col]; }
    double& at(std::size_t row, std::size_t col) { return magnitudes[row * width() + col]; }
};

// magnitudes[s][tau] = | 1/sqrt(s) * sum_t x[t] psi*((t-tau)/s) | with the
// Morlet wavelet psi(u) = pi^{-1/4} e^{j w0 u} e^{-u^2/2}, summed directly
// over the +-4s support window (clipped to the signal).
inline Scaleogram cwt(std::span<const double> signal, std::span<const double> scales,
                      double omega0 = 6.0) {
    if (scales.empty()) throw EmptyScales("scales must be non-empty");
    for (std::size_t i = 1; i < scales.size(); ++i)
        if (scales[i] <= scales[i - 1]) throw EmptyScales("scales must be strictly ascending");
    if (scales.front() <= 0.0) throw EmptyScales("scales must be positive");
    if (signal.size() < 8) throw TooSmall("signal too short for cwt");

    const std::size_t n = signal.size();
    const double norm = std::pow(std::numbers::pi, -0.25);

    Scaleogram out;
    out.scales.assign(scales.begin(), scales.end());
    out.times.resize(n);
    for (std::size_t t = 0; t < n; ++t) out.times[t] = static_cast<double>(t);
    out.magnitudes.assign(scales.size() * n, 0.0);

    std::vector<double> kernel_re, kernel_im;
    for (std::size_t si = 0; si < scales.size(); ++si) {
        const double s = scales[si];
        const double inv_s = 1.0 / s;
        const double amp = norm / std::sqrt(s);
        const auto half_support = static_cast<std::ptrdiff_t>(std::ceil(4.0 * s));

        // tabulate conj(psi)((t - tau)/s) once per scale; every tau then
        // reuses the same sampled kernel
        kernel_re.assign(static_cast<std::size_t>(2 * half_support + 1), 0.0);
        kernel_im.assign(kernel_re.size(), 0.0);
        for (std::ptrdiff_t offset = -half_support; offset <= half_support; ++offset) {
            const double u = static_cast<double>(offset) * inv_s;
            const double envelope = std::exp(-0.5 * u * u);
            kernel_re[static_cast<std::size_t>(offset + half_support)] = envelope * std::cos(omega0 * u);
            kernel_im[static_cast<std::size_t>(offset + half_support)] = -envelope * std::sin(omega0 * u);
        }

        for (std::size_t tau = 0; tau < n; ++tau) {
            const auto center = static_cast<std::ptrdiff_t>(tau);
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, center - half_support);
            const std::ptrdiff_t hi =
                std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, center + half_support);
            double re = 0.0, im = 0.0;
            const double* kre = kernel_re.data() + (lo - center + half_support);
            const double* kim = kernel_im.data() + (lo - center + half_support);
            const double* x = signal.data() + lo;
            const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
            for (std::size_t t = 0; t < len; ++t) {
                re += x[t] * kre[t];
                im += x[t] * kim[t];
            }
            out.at(si, tau) = amp * std::hypot(re, im);
        }
    }
    return out;
}

// 128 log-spaced scales covering [2, signal_length/4] by default.
inline std::vector<double> log_spaced_scales(std::size_t count, double lo, double hi) {
    std::vector<double> scales(count);
    if (count == 1) {
        scales[0] = lo;
        return scales;
    }
    const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        scales[i] = lo * std::exp(ratio * static_cast<double>(i));
    return scales;
}

inline std::vector<double> default_scale_grid(std::size_t signal_length, std::size_t count = 128) {
    return log_spaced_scales(count, 2.0, static_cast<double>(signal_length) / 4.0);
}

// Bilinear resize onto an out_h x out_w grid (corner-aligned). Axis labels
// are interpolated the same way.
inline Scaleogram scaleogram_resize(const Scaleogram& src, std::size_t out_h = 128,
                                    std::size_t out_w = 128) {
    const std::size_t sh = src.height(), sw = src.width();
    if (sh < 2 || sw < 2 || out_h < 1 || out_w < 1)
        throw TooSmall("scaleogram_resize needs a source of at least 2x2");

    auto lerp_axis = [](const std::vector<double>& axis, double pos) {
        const auto i0 = static_cast<std::size_t>(pos);
        const std::size_t i1 = std::min(i0 + 1, axis.size() - 1);
        const double frac = pos - static_cast<double>(i0);
        return axis[i0] * (1.0 - frac) + axis[i1] * frac;
    };

    Scaleogram out;
    out.scales.resize(out_h);
    out.times.resize(out_w);
    out.magnitudes.resize(out_h * out_w);

    const double row_step = static_cast<double>(sh - 1) / static_cast<double>(std::max<std::size_t>(out_h - 1, 1));
    const double col_step = static_cast<double>(sw - 1) / static_cast<double>(std::max<std::size_t>(out_w - 1, 1));

    for (std::size_t i = 0; i < out_h; ++i) out.scales[i] = lerp_axis(src.scales, row_step * static_cast<double>(i));
    for (std::size_t j = 0; j < out_w; ++j) out.times[j] = lerp_axis(src.times, col_step * static_cast<double>(j));

    for (std::size_t i = 0; i < out_h; ++i) {
        const double r = row_step * static_cast<double>(i);
        const auto r0 = static_cast<std::size_t>(r);
        const std::size_t r1 = std::min(r0 + 1, sh - 1);
        const double fr = r - static_cast<double>(r0);
        for (std::size_t j = 0; j < out_w; ++j) {
            const double c = col_step * static_cast<double>(j);
            const auto c0 = static_cast<std::size_t>(c);
            const std::size_t c1 = std::min(c0 + 1, sw - 1);
            const double fc = c - static_cast<double>(c0);
            const double top = src.at(r0, c0) * (1.0 - fc) + src.at(r0, c1) * fc;
            const double bottom = src.at(r1, c0) * (1.0 - fc) + src.at(r1, c1) * fc;
            out.magnitudes[i * out_w + j] = top * (1.0 - fr) + bottom * fr;
        }
    }
    return out;
}

// Scale whose Morlet center frequency matches `freq_hz` at `sample_rate_hz`.
inline double morlet_scale_for_frequency(double freq_hz, double sample_rate_hz,
                                         double omega0 = 6.0) {
    return omega0 * sample_rate_hz / (2.0 * std::numbers::pi * freq_hz);
}

} // namespace ptk
