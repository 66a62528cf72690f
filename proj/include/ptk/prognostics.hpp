// RUL target construction, health-state labeling, PCA degradation views
// and prediction post-processing.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ptk/errors.hpp"
#include "ptk/signal.hpp"

namespace ptk {

// One machine's full life: per-cycle operational settings and sensor
// readings, cycles numbered consecutively from 1.
struct CycleRecord {
    int cycle = 0;
    std::vector<double> settings; // 3 for the turbofan format
    std::vector<double> sensors;  // 21 for the turbofan format
};

struct RunToFailureUnit {
    int unit_id = 0;
    std::vector<CycleRecord> cycles;

    std::size_t life_length() const { return cycles.size(); }
};

struct RulModel {
    enum class Kind { Linear, Piecewise, Polynomial } kind = Kind::Linear;
    double knee = 125.0; // Piecewise cap, cycles
    double power = 3.0;  // Polynomial exponent, > 1

    static RulModel linear() { return {Kind::Linear, 0.0, 0.0}; }
    static RulModel piecewise(double knee) { return {Kind::Piecewise, knee, 0.0}; }
    static RulModel polynomial(double p) { return {Kind::Polynomial, 0.0, p}; }
};

// Target RUL series for a unit of life L, indexed from t = 0 at the first
// observed cycle.
//   Linear:      L - t
//   Piecewise:   min(knee, L - t)
//   Polynomial:  L (1 - (t/L)^p), slow early decline accelerating to 0
inline std::vector<double> rul_target(std::size_t life_length, const RulModel& model) {
    if (life_length < 2) throw TooShort("rul_target needs a life of at least 2 cycles");
    const double L = static_cast<double>(life_length);
    std::vector<double> rul(life_length);
    for (std::size_t t = 0; t < life_length; ++t) {
        const double td = static_cast<double>(t);
        switch (model.kind) {
            case RulModel::Kind::Linear: rul[t] = L - td; break;
            case RulModel::Kind::Piecewise: rul[t] = std::min(model.knee, L - td); break;
            case RulModel::Kind::Polynomial:
                rul[t] = L * (1.0 - std::pow(td / L, model.power));
                break;
        }
    }
    return rul;
}

inline double rul_from_failure_time(double t_f, double t_c) {
    if (t_f < t_c) throw NegativeRul("failure time precedes current time");
    return t_f - t_c;
}

enum class HealthLabel { Healthy, Faulty, Unlabeled };

// First k snapshots healthy, last k faulty, the middle unlabeled.
inline std::vector<HealthLabel> health_labels(std::size_t snapshot_count, std::size_t k = 80) {
    if (snapshot_count < 2 * k)
        throw LifeTooShort("need at least " + std::to_string(2 * k) + " snapshots, have " +
                           std::to_string(snapshot_count));
    std::vector<HealthLabel> labels(snapshot_count, HealthLabel::Unlabeled);
    for (std::size_t i = 0; i < k; ++i) labels[i] = HealthLabel::Healthy;
    for (std::size_t i = snapshot_count - k; i < snapshot_count; ++i) labels[i] = HealthLabel::Faulty;
    return labels;
}

// ---------------------------------------------------------------------------
// PCA

struct PcaModel {
    std::vector<double> mean;
    std::vector<double> scale;              // 1s when standardization is off
    std::vector<std::vector<double>> components; // orthonormal rows, variance-descending
    std::vector<double> explained_variance;

    std::size_t dims() const { return mean.size(); }
};

namespace detail {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
// eigenvalues and stores the eigenvectors as columns of `vectors`.
inline void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& values,
                         std::vector<std::vector<double>>& vectors) {
    const std::size_t n = a.size();
    vectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) vectors[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-24) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = vectors[k][p], vkq = vectors[k][q];
                    vectors[k][p] = c * vkp - s * vkq;
                    vectors[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a[i][i];
}

} // namespace detail

// Center (and scale when `standardize`), eigendecompose the covariance.
// Deterministic sign: the largest-magnitude loading of each component is
// positive. Constant columns get scale 1.
inline PcaModel pca_fit(const std::vector<std::vector<double>>& rows, bool standardize = true) {
    const std::size_t n = rows.size();
    if (n < 2) throw DegenerateData("pca_fit needs at least 2 rows");
    const std::size_t d = rows.front().size();
    if (d < 1) throw DegenerateData("pca_fit needs at least 1 column");
    for (const auto& r : rows)
        if (r.size() != d) throw ShapeMismatch("pca_fit: ragged rows");

    PcaModel model;
    model.mean.assign(d, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) model.mean[j] += r[j];
    for (auto& m : model.mean) m /= static_cast<double>(n);

    model.scale.assign(d, 1.0);
    if (standardize) {
        for (std::size_t j = 0; j < d; ++j) {
            double var = 0.0;
            for (const auto& r : rows) var += (r[j] - model.mean[j]) * (r[j] - model.mean[j]);
            var /= static_cast<double>(n - 1);
            model.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
        }
    }

    // covariance of the centered/scaled data
    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (const auto& r : rows) {
        for (std::size_t a = 0; a < d; ++a) {
            const double va = (r[a] - model.mean[a]) / model.scale[a];
            for (std::size_t b = a; b < d; ++b) {
                const double vb = (r[b] - model.mean[b]) / model.scale[b];
                cov[a][b] += va * vb;
            }
        }
    }
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            cov[a][b] /= static_cast<double>(n - 1);
            cov[b][a] = cov[a][b];
        }

    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
    detail::jacobi_eigen(cov, values, vectors);

    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

    model.components.resize(d);
    model.explained_variance.resize(d);
    for (std::size_t rank = 0; rank < d; ++rank) {
        const std::size_t src = order[rank];
        model.explained_variance[rank] = std::max(0.0, values[src]);
        std::vector<double> comp(d);
        for (std::size_t j = 0; j < d; ++j) comp[j] = vectors[j][src];
        std::size_t biggest = 0;
        for (std::size_t j = 1; j < d; ++j)
            if (std::abs(comp[j]) > std::abs(comp[biggest])) biggest = j;
        if (comp[biggest] < 0.0)
            for (auto& v : comp) v = -v;
        model.components[rank] = std::move(comp);
    }
    return model;
}

inline std::vector<std::vector<double>> pca_transform(const PcaModel& model,
                                                      const std::vector<std::vector<double>>& rows,
                                                      std::size_t components) {
    const std::size_t d = model.dims();
    components = std::min(components, model.components.size());
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.size() != d) throw ShapeMismatch("pca_transform: row width mismatch");
        std::vector<double> proj(components, 0.0);
        for (std::size_t c = 0; c < components; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                acc += model.components[c][j] * (r[j] - model.mean[j]) / model.scale[j];
            proj[c] = acc;
        }
        out.push_back(std::move(proj));
    }
    return out;
}

inline std::vector<std::vector<double>> pca_inverse_transform(
    const PcaModel& model, const std::vector<std::vector<double>>& projected) {
    const std::size_t d = model.dims();
    std::vector<std::vector<double>> out;
    out.reserve(projected.size());
    for (const auto& p : projected) {
        std::vector<double> row(d, 0.0);
        for (std::size_t c = 0; c < p.size(); ++c)
            for (std::size_t j = 0; j < d; ++j) row[j] += p[c] * model.components[c][j];
        for (std::size_t j = 0; j < d; ++j) row[j] = row[j] * model.scale[j] + model.mean[j];
        out.push_back(std::move(row));
    }
    return out;
}

// ---------------------------------------------------------------------------
// prediction smoothing

// Least-squares polynomial fit over cycle index, evaluated back onto every
// cycle. Indices are mapped to [-1,1] before fitting to keep the normal
// equations well conditioned.
inline std::vector<double> rul_smooth(std::span<const double> predictions, int degree = 3) {
    const std::size_t n = predictions.size();
    if (degree < 0 || n <= static_cast<std::size_t>(degree))
        throw TooShort("rul_smooth needs more points than the polynomial degree");

    const int terms = degree + 1;
    auto scaled = [&](std::size_t i) {
        return n == 1 ? 0.0 : 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) - 1.0;
    };

    std::vector<std::vector<double>> ata(terms, std::vector<double>(terms, 0.0));
    std::vector<double> atb(terms, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = scaled(i);
        std::vector<double> powers(terms);
        powers[0] = 1.0;
        for (int p = 1; p < terms; ++p) powers[p] = powers[p - 1] * t;
        for (int r = 0; r < terms; ++r) {
            atb[r] += powers[r] * predictions[i];
            for (int c = 0; c < terms; ++c) ata[r][c] += powers[r] * powers[c];
        }
    }
    const std::vector<double> beta = detail::solve_dense(ata, atb);

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = scaled(i);
        double acc = 0.0, power = 1.0;
        for (int p = 0; p < terms; ++p) {
            acc += beta[static_cast<std::size_t>(p)] * power;
            power *= t;
        }
        out[i] = acc;
    }
    return out;
}

} // namespace ptk
