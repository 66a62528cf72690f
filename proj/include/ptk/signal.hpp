// Signal representation, segmentation, signal-to-image conversion and
// Savitzky-Golay smoothing.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ptk/errors.hpp"

namespace ptk {

// Uniformly sampled real-valued time series.
struct Signal {
    std::vector<double> samples;
    double sample_rate_hz = 1.0;

    Signal() = default;
    Signal(std::vector<double> s, double rate) : samples(std::move(s)), sample_rate_hz(rate) {}

    std::size_t size() const { return samples.size(); }
    double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

// Grayscale image with pixels in [0,1], row-major.
struct SignalImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> pixels;

    double at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

// Number of whole non-overlapping chunks of `image_pixels` samples that fit
// in a signal; the tail remainder is discarded.
inline std::size_t image_count(std::size_t signal_length, std::size_t image_pixels) {
    return signal_length / image_pixels;
}

inline std::vector<std::vector<double>> segment(const Signal& signal, std::size_t chunk_len) {
    const std::size_t count = image_count(signal.samples.size(), chunk_len);
    std::vector<std::vector<double>> chunks;
    chunks.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto begin = signal.samples.begin() + static_cast<std::ptrdiff_t>(i * chunk_len);
        chunks.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(chunk_len));
    }
    return chunks;
}

// Reshape a chunk of side*side samples into a square image, min-max scaled
// to [0,1] per image. A constant chunk maps to all-0.5.
inline SignalImage signal_to_image(std::span<const double> chunk, std::size_t side = 64) {
    if (chunk.size() != side * side)
        throw LengthMismatch("chunk length " + std::to_string(chunk.size()) +
                             " does not equal side^2 = " + std::to_string(side * side));
    const auto [min_it, max_it] = std::minmax_element(chunk.begin(), chunk.end());
    const double lo = *min_it, hi = *max_it;

    SignalImage img;
    img.width = side;
    img.height = side;
    img.pixels.resize(chunk.size());
    if (hi == lo) {
        std::fill(img.pixels.begin(), img.pixels.end(), 0.5);
    } else {
        // divide rather than multiply by the reciprocal so the maximum
        // lands exactly on 1.0
        const double span = hi - lo;
        for (std::size_t i = 0; i < chunk.size(); ++i) img.pixels[i] = (chunk[i] - lo) / span;
    }
    return img;
}

namespace detail {

// Solves the (order+1)x(order+1) normal equations by Gaussian elimination
// with partial pivoting. Small systems only.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        const double diag = a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = a[r][col] / diag;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
        x[i] = acc / a[i][i];
    }
    return x;
}

// Weights of the least-squares polynomial fit over offsets [-m, m],
// evaluated at offset `eval`. smoothed = sum_j w[j] * y[j].
inline std::vector<double> savgol_weights(int half_window, int poly_order, int eval) {
    const int w = 2 * half_window + 1;
    const int terms = poly_order + 1;
    // Normal equations A^T A beta = A^T y with A_{jk} = (j - m)^k.
    std::vector<std::vector<double>> ata(terms, std::vector<double>(terms, 0.0));
    for (int r = 0; r < terms; ++r)
        for (int c = 0; c < terms; ++c)
            for (int j = 0; j < w; ++j)
                ata[r][c] += std::pow(double(j - half_window), r + c);

    // weight_j = sum_k inv(A^T A)[.,k] applied to column j of A^T,
    // contracted with powers of `eval`.
    std::vector<double> weights(w, 0.0);
    for (int j = 0; j < w; ++j) {
        std::vector<double> rhs(terms);
        for (int r = 0; r < terms; ++r) rhs[r] = std::pow(double(j - half_window), r);
        const std::vector<double> beta = solve_dense(ata, rhs);
        double acc = 0.0;
        for (int k = 0; k < terms; ++k) acc += beta[k] * std::pow(double(eval), k);
        weights[j] = acc;
    }
    return weights;
}

} // namespace detail

// Savitzky-Golay smoothing. Interior samples use the centered window;
// samples within half a window of either edge reuse the first/last full
// window with the fit evaluated at their actual offset, so polynomials of
// degree <= poly_order are reproduced exactly over the whole series.
inline std::vector<double> savitzky_golay(std::span<const double> series, int window,
                                          int poly_order) {
    if (window < 1 || window % 2 == 0)
        throw BadWindow("window must be odd and positive, got " + std::to_string(window));
    if (poly_order < 0 || poly_order >= window)
        throw BadWindow("poly_order must satisfy 0 <= order < window");
    const std::size_t n = series.size();
    if (n < static_cast<std::size_t>(window))
        throw BadWindow("series shorter than window");

    const int m = window / 2;
    const std::vector<double> center = detail::savgol_weights(m, poly_order, 0);

    std::vector<double> out(n);
    for (std::size_t i = static_cast<std::size_t>(m); i + static_cast<std::size_t>(m) < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < window; ++j) acc += center[static_cast<std::size_t>(j)] * series[i + j - m];
        out[i] = acc;
    }
    for (int e = 0; e < m; ++e) {
        const std::vector<double> wl = detail::savgol_weights(m, poly_order, e - m);
        const std::vector<double> wr = detail::savgol_weights(m, poly_order, m - e);
        double left = 0.0, right = 0.0;
        for (int j = 0; j < window; ++j) {
            left += wl[static_cast<std::size_t>(j)] * series[static_cast<std::size_t>(j)];
            right += wr[static_cast<std::size_t>(j)] * series[n - window + static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(e)] = left;
        out[n - 1 - static_cast<std::size_t>(e)] = right;
    }
    return out;
}

} // namespace ptk
