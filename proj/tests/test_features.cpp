#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ptk/features.hpp"
#include "ptk/rng.hpp"

using namespace ptk;

namespace {

std::vector<double> random_series(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.gaussian(0.0, scale);
    return x;
}

} // namespace

TEST_CASE("energy sums squares", "[features]") {
    CHECK(energy(std::vector<double>{1, 2, 3}) == Catch::Approx(14.0));
    CHECK(energy(std::vector<double>(8, 0.0)) == 0.0);
    const auto x = random_series(100, 50);
    double expected = 0.0;
    for (const double v : x) expected += v * v;
    CHECK(energy(x) == Catch::Approx(expected).epsilon(1e-9));
}

TEST_CASE("rms is the root mean square", "[features]") {
    CHECK(rms(std::vector<double>{3, 4}) == Catch::Approx(std::sqrt(12.5)));
    CHECK(rms(std::vector<double>(5, -2.5)) == Catch::Approx(2.5));
    const auto x = random_series(1000, 51);
    CHECK(rms(x) == Catch::Approx(std::sqrt(energy(x) / 1000.0)).epsilon(1e-12));
}

TEST_CASE("skewness and kurtosis follow the (n-1)-denominator formulas", "[features]") {
    CHECK(skewness(std::vector<double>{-1, 0, 1}) == Catch::Approx(0.0).margin(1e-12));
    CHECK_THROWS_AS(skewness(std::vector<double>(4, 2.0)), ZeroVariance);
    CHECK_THROWS_AS(kurtosis(std::vector<double>(4, 2.0)), ZeroVariance);

    const auto x = random_series(500, 52);
    double m = 0.0;
    for (const double v : x) m += v;
    m /= 500.0;
    double var = 0.0;
    for (const double v : x) var += (v - m) * (v - m);
    const double sigma = std::sqrt(var / 499.0);
    double s3 = 0.0, s4 = 0.0;
    for (const double v : x) {
        s3 += std::pow(v - m, 3);
        s4 += std::pow(v - m, 4);
    }
    CHECK(skewness(x) == Catch::Approx(s3 / (499.0 * std::pow(sigma, 3))).epsilon(1e-9));
    CHECK(kurtosis(x) == Catch::Approx(s4 / (499.0 * std::pow(sigma, 4))).epsilon(1e-9));
}

TEST_CASE("skewness is antisymmetric; energy and rms are sign-blind", "[features]") {
    const auto x = random_series(64, 53);
    std::vector<double> neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    CHECK(skewness(neg) == Catch::Approx(-skewness(x)).margin(1e-12));
    CHECK(energy(neg) == Catch::Approx(energy(x)));
    CHECK(rms(neg) == Catch::Approx(rms(x)));
}

TEST_CASE("upper_bound evaluates the literal formula", "[features]") {
    CHECK(upper_bound(std::vector<double>{0, 1, 2}) == Catch::Approx(2.5));
    CHECK(upper_bound(std::vector<double>(5, 3.25)) == Catch::Approx(3.25));
    CHECK_THROWS_AS(upper_bound(std::vector<double>{1.0}), TooShort);
    const auto x = random_series(50, 54);
    double lo = x[0], hi = x[0];
    for (const double v : x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(upper_bound(x) == Catch::Approx(hi + 0.5 * (hi - lo) / 49.0).epsilon(1e-12));
}

TEST_CASE("entropy of degenerate and uniform energy distributions", "[features]") {
    CHECK(entropy(std::vector<double>{0, 0, 5, 0}) == Catch::Approx(0.0).margin(1e-12));
    CHECK(entropy(std::vector<double>{2, -2, 2, 2, -2, 2, 2, 2}) ==
          Catch::Approx(std::log(8.0)).margin(1e-12));
    CHECK_THROWS_AS(entropy(std::vector<double>(4, 0.0)), ZeroEnergy);
}

TEST_CASE("entropy matches a loop oracle and stays in [0, ln n]", "[features]") {
    const auto x = random_series(128, 55);
    const double total = energy(x);
    double expected = 0.0;
    for (const double v : x) {
        const double p = v * v / total;
        if (p > 0.0) expected -= p * std::log(p);
    }
    CHECK(entropy(x) == Catch::Approx(expected).margin(1e-9));
    CHECK(entropy(x) >= 0.0);
    CHECK(entropy(x) <= std::log(128.0));
}

TEST_CASE("trigonometric stds transform then take the sample std", "[features]") {
    CHECK(std_asinh(std::vector<double>(6, 1.5)) == Catch::Approx(0.0).margin(1e-12));
    CHECK(std_atan(std::vector<double>(6, 1.5)) == Catch::Approx(0.0).margin(1e-12));

    // a symmetric set maps to a symmetric set under odd functions
    const std::vector<double> sym{-2.0, -1.0, 0.0, 1.0, 2.0};
    std::vector<double> flipped(sym.rbegin(), sym.rend());
    for (auto& v : flipped) v = -v;
    CHECK(std_asinh(sym) == Catch::Approx(std_asinh(flipped)).margin(1e-12));
    CHECK(std_atan(sym) == Catch::Approx(std_atan(flipped)).margin(1e-12));

    const auto x = random_series(256, 56);
    std::vector<double> asinh_t(x.size()), atan_t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        asinh_t[i] = std::log(x[i] + std::sqrt(x[i] * x[i] + 1.0));
        atan_t[i] = std::atan(x[i]);
    }
    auto sample_std = [](const std::vector<double>& v) {
        double m = 0.0;
        for (const double t : v) m += t;
        m /= static_cast<double>(v.size());
        double acc = 0.0;
        for (const double t : v) acc += (t - m) * (t - m);
        return std::sqrt(acc / static_cast<double>(v.size() - 1));
    };
    CHECK(std_asinh(x) == Catch::Approx(sample_std(asinh_t)).margin(1e-9));
    CHECK(std_atan(x) == Catch::Approx(sample_std(atan_t)).margin(1e-9));
}

TEST_CASE("extract_trig_features composes dwt and std", "[features]") {
    Signal zero{std::vector<double>(64, 0.0), 25600.0};
    const TrigFeatures zf = extract_trig_features(zero);
    CHECK(zf.std_asinh == 0.0);
    CHECK(zf.std_atan == 0.0);

    // FEMTO snapshot geometry: 2560 samples -> 160 level-4 coefficients
    Signal snap{random_series(2560, 57), 25600.0};
    const auto dec = dwt_decompose(snap.samples, "db4", 4);
    CHECK(dec.approximation.size() == 160);

    const TrigFeatures t = extract_trig_features(snap);
    CHECK(t.std_asinh == Catch::Approx(std_asinh(dec.approximation)).margin(1e-12));
    CHECK(t.std_atan == Catch::Approx(std_atan(dec.approximation)).margin(1e-12));

    const TrigFeatures td = extract_trig_features(snap, TrigCoeffs::Detail);
    CHECK(td.std_asinh == Catch::Approx(std_asinh(dec.details.front())).margin(1e-12));
}

TEST_CASE("cumulative descriptor is S/sqrt(|S|)", "[features]") {
    FeatureSeries f{"rms", {4.0}};
    CHECK(cumulative(f).values == std::vector<double>{2.0});

    FeatureSeries g{"rms", {1.0, 3.0}};
    const auto cg = cumulative(g);
    CHECK(cg.values[0] == Catch::Approx(1.0));
    CHECK(cg.values[1] == Catch::Approx(2.0));
    CHECK(cg.feature_name == "C-rms");

    FeatureSeries zero_sum{"x", {1.0, -1.0}};
    CHECK(cumulative(zero_sum).values[1] == 0.0);
}

TEST_CASE("cumulative equals sign(S) sqrt(|S|)", "[features]") {
    Rng rng(58);
    FeatureSeries f{"energy", {}};
    for (int i = 0; i < 100; ++i) f.values.push_back(rng.uniform(0.1, 2.0));
    const auto c = cumulative(f);
    double running = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        running += f.values[i];
        const double expected = (running > 0 ? 1.0 : -1.0) * std::sqrt(std::abs(running));
        CHECK(c.values[i] == Catch::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("cumulative of a positive series increases strictly", "[features]") {
    Rng rng(59);
    FeatureSeries f{"rms", {}};
    for (int i = 0; i < 200; ++i) f.values.push_back(rng.uniform(0.01, 1.0));
    const auto c = cumulative(f);
    for (std::size_t i = 1; i < c.values.size(); ++i) CHECK(c.values[i] > c.values[i - 1]);
}
