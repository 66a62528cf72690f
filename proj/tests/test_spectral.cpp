#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ptk/rng.hpp"
#include "ptk/spectral.hpp"

using namespace ptk;

namespace {

// Straight transcription of bin[k] = sum_t x[t] e^{-j2pi kt/n}, kept
// independent of the library implementation.
std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> bins(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                                 static_cast<double>(t) / static_cast<double>(n);
            acc += x[t] * std::polar(1.0, angle);
        }
        bins[k] = acc;
    }
    return bins;
}

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.gaussian();
    return x;
}

} // namespace

TEST_CASE("dft of a constant signal is DC-only", "[spectral]") {
    const Spectrum s = dft(std::vector<double>{1, 1, 1, 1});
    CHECK(std::abs(s.bins[0] - std::complex<double>{4.0, 0.0}) < 1e-12);
    for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(s.bins[k]) < 1e-12);
}

TEST_CASE("dft of an impulse is flat", "[spectral]") {
    const Spectrum s = dft(std::vector<double>{1, 0, 0, 0});
    for (const auto& bin : s.bins) CHECK(std::abs(bin - std::complex<double>{1.0, 0.0}) < 1e-12);
}

TEST_CASE("dft matches the naive summation oracle", "[spectral]") {
    const auto x = random_signal(64, 123);
    const Spectrum s = dft(x);
    const auto expected = naive_dft(x);
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(s.bins[k] - expected[k]) < 1e-9);
}

TEST_CASE("fft agrees with dft", "[spectral]") {
    const Spectrum a = fft(std::vector<double>{1, 1, 1, 1});
    const Spectrum b = dft(std::vector<double>{1, 1, 1, 1});
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(a.bins[k] - b.bins[k]) < 1e-12);

    const auto x = random_signal(1024, 5);
    const Spectrum f = fft(x);
    const Spectrum d = dft(x);
    double worst = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, std::abs(f.bins[k] - d.bins[k]));
    CHECK(worst <= 1e-9);
}

TEST_CASE("fft rejects non-power-of-two lengths", "[spectral]") {
    CHECK_THROWS_AS(fft(std::vector<double>{1, 2, 3}), NotPowerOfTwo);
}

TEST_CASE("Parseval holds for dft and fft", "[spectral]") {
    for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto x = random_signal(256, seed);
        double time_energy = 0.0;
        for (const double v : x) time_energy += v * v;
        const Spectrum s = fft(x);
        double freq_energy = 0.0;
        for (const auto& bin : s.bins) freq_energy += std::norm(bin);
        freq_energy /= static_cast<double>(x.size());
        CHECK(std::abs(freq_energy - time_energy) <= 1e-6 * time_energy);
    }
}

TEST_CASE("real-input spectrum is conjugate symmetric", "[spectral]") {
    const auto x = random_signal(128, 9);
    const Spectrum s = fft(x);
    for (std::size_t k = 1; k < x.size(); ++k)
        CHECK(std::abs(s.bins[k] - std::conj(s.bins[x.size() - k])) < 1e-9);
}

TEST_CASE("spectrum resolution is sample rate over length", "[spectral]") {
    const auto x = random_signal(64, 10);
    CHECK(dft(x, 640.0).resolution_hz == Catch::Approx(10.0));
    CHECK(fft(x, 640.0).resolution_hz == Catch::Approx(10.0));
}

TEST_CASE("fault_frequency applies the defect multiplier per rev/s", "[spectral]") {
    CHECK(fault_frequency(Defect::InnerRing, 60.0) == Catch::Approx(5.4152));
    CHECK(fault_frequency(Defect::CageTrain, 60.0) == Catch::Approx(0.3983));
    CHECK(fault_frequency(Defect::OuterRing, 1797.0) == Catch::Approx(107.36).margin(0.01));
    CHECK(fault_frequency(Defect::RollingElement, 60.0) == Catch::Approx(4.7135));
}
