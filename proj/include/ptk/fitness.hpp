// Prognostic feature fitness: monotonicity and trendability.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ptk/errors.hpp"

namespace ptk {

struct FitnessScore {
    std::string feature_name;
    double monotonicity = 0.0; // in [0, 1]
    double trendability = 0.0; // <= 1
};

// |#(rising steps) - #(falling steps)| / (n-1). Plateau steps count in
// neither term, so they lower the score. The absolute value makes an
// always-decreasing series score 1 just like an always-increasing one.
inline double monotonicity(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 2) throw TooShort("monotonicity needs n >= 2");
    long long positive = 0, negative = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = series[i] - series[i - 1];
        if (d > 0.0)
            ++positive;
        else if (d < 0.0)
            ++negative;
    }
    return static_cast<double>(std::llabs(positive - negative)) / static_cast<double>(n - 1);
}

namespace detail {

// t_i = #(first diffs > 0)/(n-1) + #(second diffs > 0)/(n-2); second diffs
// are forward differences of the first diffs.
inline double trend_statistic(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 3) throw TooShort("trendability needs series of length >= 3");
    long long rising = 0, accelerating = 0;
    double prev_diff = series[1] - series[0];
    if (prev_diff > 0.0) ++rising;
    for (std::size_t i = 2; i < n; ++i) {
        const double diff = series[i] - series[i - 1];
        if (diff > 0.0) ++rising;
        if (diff - prev_diff > 0.0) ++accelerating;
        prev_diff = diff;
    }
    return static_cast<double>(rising) / static_cast<double>(n - 1) +
           static_cast<double>(accelerating) / static_cast<double>(n - 2);
}

} // namespace detail

// 1 - population standard deviation of the per-series trend statistics.
// Population std (divide by N) keeps a single-member population defined
// and equal to 1.
inline double trendability(const std::vector<std::vector<double>>& population) {
    if (population.empty()) throw TooShort("trendability needs a non-empty population");
    std::vector<double> stats;
    stats.reserve(population.size());
    for (const auto& series : population) stats.push_back(detail::trend_statistic(series));
    double mean = 0.0;
    for (const double t : stats) mean += t;
    mean /= static_cast<double>(stats.size());
    double var = 0.0;
    for (const double t : stats) var += (t - mean) * (t - mean);
    var /= static_cast<double>(stats.size());
    return 1.0 - std::sqrt(var);
}

// Per feature: monotonicity averaged over the population members and
// trendability over the whole population. Output ordered by feature name.
inline std::vector<FitnessScore> fitness_table(
    const std::map<std::string, std::vector<std::vector<double>>>& features) {
    std::vector<FitnessScore> table;
    table.reserve(features.size());
    for (const auto& [name, population] : features) {
        FitnessScore score;
        score.feature_name = name;
        double mono = 0.0;
        for (const auto& series : population) mono += monotonicity(series);
        score.monotonicity = population.empty() ? 0.0 : mono / static_cast<double>(population.size());
        score.trendability = trendability(population);
        table.push_back(std::move(score));
    }
    return table;
}

} // namespace ptk
