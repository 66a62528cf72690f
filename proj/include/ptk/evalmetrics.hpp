// Classification and regression evaluation: confusion matrix, derived
// metrics, ROC/AUC, MAE.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ptk/errors.hpp"

namespace ptk {

struct ConfusionMatrix {
    std::size_t classes = 0;
    std::vector<std::int64_t> counts; // rows = actual, cols = predicted

    std::int64_t& at(std::size_t actual, std::size_t predicted) {
        return counts[actual * classes + predicted];
    }
    std::int64_t at(std::size_t actual, std::size_t predicted) const {
        return counts[actual * classes + predicted];
    }
    std::int64_t total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t(0)); }
};

struct RocCurve {
    // (false positive rate, true positive rate), thresholds descending
    std::vector<std::pair<double, double>> points;
};

struct Prf1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false; // some denominator vanished and was defined as 0
};

inline ConfusionMatrix confusion(std::span<const int> actual, std::span<const int> predicted,
                                 std::size_t k) {
    if (actual.size() != predicted.size())
        throw ShapeMismatch("confusion: label vectors differ in length");
    ConfusionMatrix m;
    m.classes = k;
    m.counts.assign(k * k, 0);
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] < 0 || predicted[i] < 0 || static_cast<std::size_t>(actual[i]) >= k ||
            static_cast<std::size_t>(predicted[i]) >= k)
            throw LabelOutOfRange("label outside [0," + std::to_string(k) + ") at sample " +
                                  std::to_string(i));
        ++m.at(static_cast<std::size_t>(actual[i]), static_cast<std::size_t>(predicted[i]));
    }
    return m;
}

// One-vs-rest precision/recall/F1 for `positive_class`. Vanishing
// denominators yield 0 with the degenerate flag set.
inline Prf1 prf1(const ConfusionMatrix& m, std::size_t positive_class) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t a = 0; a < m.classes; ++a) {
        for (std::size_t p = 0; p < m.classes; ++p) {
            const std::int64_t c = m.at(a, p);
            const bool actual_pos = a == positive_class;
            const bool pred_pos = p == positive_class;
            if (actual_pos && pred_pos) tp += c;
            else if (!actual_pos && pred_pos) fp += c;
            else if (actual_pos && !pred_pos) fn += c;
        }
    }
    Prf1 out;
    if (tp + fp == 0 || tp + fn == 0) out.degenerate = true;
    out.precision = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
    out.recall = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
    out.f1 = out.precision + out.recall == 0.0
                 ? 0.0
                 : 2.0 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

inline Prf1 macro_prf1(const ConfusionMatrix& m) {
    Prf1 avg;
    for (std::size_t c = 0; c < m.classes; ++c) {
        const Prf1 one = prf1(m, c);
        avg.precision += one.precision;
        avg.recall += one.recall;
        avg.f1 += one.f1;
        avg.degenerate = avg.degenerate || one.degenerate;
    }
    const double k = static_cast<double>(m.classes);
    avg.precision /= k;
    avg.recall /= k;
    avg.f1 /= k;
    return avg;
}

inline double accuracy(const ConfusionMatrix& m) {
    const std::int64_t total = m.total();
    if (total == 0) throw EmptyInput("accuracy of an empty confusion matrix");
    std::int64_t diag = 0;
    for (std::size_t c = 0; c < m.classes; ++c) diag += m.at(c, c);
    return double(diag) / double(total);
}

inline double mae(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) throw ShapeMismatch("mae: length mismatch");
    if (predicted.empty()) throw EmptyInput("mae of empty vectors");
    double acc = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) acc += std::abs(predicted[i] - actual[i]);
    return acc / static_cast<double>(predicted.size());
}

// Threshold sweep over the unique scores (ties grouped into one step).
// The curve runs from (0,0) to (1,1); AUC is the trapezoidal area,
// accumulated in exact integer arithmetic so it coincides with the
// Mann-Whitney pair count (ties counted 1/2).
inline std::pair<RocCurve, double> roc_auc(std::span<const double> scores,
                                           std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ShapeMismatch("roc_auc: length mismatch");
    std::int64_t npos = 0, nneg = 0;
    for (const int l : labels) (l != 0 ? npos : nneg) += 1;
    if (npos == 0 || nneg == 0) throw SingleClass("roc_auc needs both classes present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    RocCurve curve;
    curve.points.emplace_back(0.0, 0.0);
    std::int64_t tp = 0, fp = 0;
    __int128 twice_area = 0; // sum of (fp_step) * (tp_prev + tp_cur)

    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::int64_t step_tp = 0, step_fp = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] != 0 ? step_tp : step_fp) += 1;
            ++j;
        }
        twice_area += static_cast<__int128>(step_fp) * (2 * tp + step_tp);
        tp += step_tp;
        fp += step_fp;
        curve.points.emplace_back(double(fp) / double(nneg), double(tp) / double(npos));
        i = j;
    }
    const double auc = static_cast<double>(twice_area) / (2.0 * double(npos) * double(nneg));
    return {curve, auc};
}

} // namespace ptk
