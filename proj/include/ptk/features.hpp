// Classic and trigonometric health-indicator features extracted from
// vibration snapshots, and cumulative descriptors.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ptk/errors.hpp"
#include "ptk/signal.hpp"
#include "ptk/wavelet.hpp"

namespace ptk {

struct FeatureVector {
    double entropy = 0.0;
    double energy = 0.0;
    double rms = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
    double upper_bound = 0.0;
    double std_asinh = 0.0;
    double std_atan = 0.0;
};

// One scalar indicator tracked over a unit's life, ordered by snapshot.
struct FeatureSeries {
    std::string feature_name;
    std::vector<double> values;
};

namespace detail {

inline double mean(std::span<const double> x) {
    double acc = 0.0;
    for (const double v : x) acc += v;
    return acc / static_cast<double>(x.size());
}

// Sample standard deviation (n-1 denominator).
inline double sample_std(std::span<const double> x) {
    const double m = mean(x);
    double acc = 0.0;
    for (const double v : x) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

} // namespace detail

inline double energy(std::span<const double> x) {
    if (x.empty()) throw TooShort("energy of empty series");
    double acc = 0.0;
    for (const double v : x) acc += v * v;
    return acc;
}

inline double rms(std::span<const double> x) {
    if (x.empty()) throw TooShort("rms of empty series");
    return std::sqrt(energy(x) / static_cast<double>(x.size()));
}

inline double skewness(std::span<const double> x) {
    if (x.size() < 2) throw TooShort("skewness needs n >= 2");
    const double m = detail::mean(x);
    const double sigma = detail::sample_std(x);
    if (sigma == 0.0) throw ZeroVariance("skewness of constant series");
    double acc = 0.0;
    for (const double v : x) acc += (v - m) * (v - m) * (v - m);
    return acc / (static_cast<double>(x.size() - 1) * sigma * sigma * sigma);
}

inline double kurtosis(std::span<const double> x) {
    if (x.size() < 2) throw TooShort("kurtosis needs n >= 2");
    const double m = detail::mean(x);
    const double sigma = detail::sample_std(x);
    if (sigma == 0.0) throw ZeroVariance("kurtosis of constant series");
    double acc = 0.0;
    for (const double v : x) {
        const double d = (v - m) * (v - m);
        acc += d * d;
    }
    return acc / (static_cast<double>(x.size() - 1) * sigma * sigma * sigma * sigma);
}

inline double upper_bound(std::span<const double> x) {
    if (x.size() < 2) throw TooShort("upper_bound needs n >= 2");
    double lo = x[0], hi = x[0];
    for (const double v : x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi + 0.5 * (hi - lo) / static_cast<double>(x.size() - 1);
}

// Shannon entropy of the normalized energy distribution p_j = x_j^2 / sum x^2,
// in nats, with 0 ln 0 = 0. Always in [0, ln n].
inline double entropy(std::span<const double> x) {
    const double total = energy(x);
    if (total <= 0.0) throw ZeroEnergy("entropy of zero-energy series");
    double acc = 0.0;
    for (const double v : x) {
        const double p = v * v / total;
        if (p > 0.0) acc -= p * std::log(p);
    }
    return acc;
}

inline double std_asinh(std::span<const double> x) {
    if (x.size() < 2) throw TooShort("std_asinh needs n >= 2");
    std::vector<double> t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) t[i] = std::asinh(x[i]);
    return detail::sample_std(t);
}

inline double std_atan(std::span<const double> x) {
    if (x.size() < 2) throw TooShort("std_atan needs n >= 2");
    std::vector<double> t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) t[i] = std::atan(x[i]);
    return detail::sample_std(t);
}

enum class TrigCoeffs { Approximation, Detail };

struct TrigFeatures {
    double std_asinh = 0.0;
    double std_atan = 0.0;
};

// db4 decomposition at level 4, trigonometric scaling of the coefficients,
// then sample standard deviation. `which` selects approximation (default)
// or deepest-detail coefficients.
inline TrigFeatures extract_trig_features(const Signal& snapshot,
                                          TrigCoeffs which = TrigCoeffs::Approximation) {
    const WaveletDecomposition dec = dwt_decompose(snapshot.samples, "db4", 4);
    const std::vector<double>& coeffs =
        which == TrigCoeffs::Approximation ? dec.approximation : dec.details.front();
    return TrigFeatures{std_asinh(coeffs), std_atan(coeffs)};
}

// All features of one snapshot: classic features on the raw samples, the
// trigonometric pair on the wavelet coefficients.
inline FeatureVector extract_features(const Signal& snapshot,
                                      TrigCoeffs which = TrigCoeffs::Approximation) {
    FeatureVector f;
    f.entropy = entropy(snapshot.samples);
    f.energy = energy(snapshot.samples);
    f.rms = rms(snapshot.samples);
    f.skewness = skewness(snapshot.samples);
    f.kurtosis = kurtosis(snapshot.samples);
    f.upper_bound = upper_bound(snapshot.samples);
    const TrigFeatures trig = extract_trig_features(snapshot, which);
    f.std_asinh = trig.std_asinh;
    f.std_atan = trig.std_atan;
    return f;
}

// Cumulative descriptor Cf_n = S_n / sqrt(|S_n|) of the running total
// S_n, with Cf_n = 0 where S_n = 0.
inline FeatureSeries cumulative(const FeatureSeries& series) {
    FeatureSeries out;
    out.feature_name = "C-" + series.feature_name;
    out.values.reserve(series.values.size());
    double running = 0.0;
    for (const double v : series.values) {
        running += v;
        out.values.push_back(running == 0.0 ? 0.0 : running / std::sqrt(std::abs(running)));
    }
    return out;
}

} // namespace ptk
