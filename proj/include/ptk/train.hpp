// Mini-batch training (SGD / Adam), per-epoch reporting and the central
// finite-difference gradient checker.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ptk/errors.hpp"
#include "ptk/nn.hpp"
#include "ptk/rng.hpp"
#include "ptk/tensor.hpp"

namespace ptk::nn {

enum class Optimizer : std::uint32_t { SGD = 0, Adam };

struct TrainConfig {
    int epochs = 30;
    int batch_size = 32;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Adam;
    double validation_split = 0.0; // fraction of the dataset held out
    std::uint64_t seed = 0;
    std::vector<double> dropout_rates; // optional per-dropout-layer overrides
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = std::numeric_limits<double>::quiet_NaN();
    double train_metric = 0.0;
    double val_metric = std::numeric_limits<double>::quiet_NaN();
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    std::string metric_name;
};

template <class Real>
struct Dataset {
    std::vector<Tensor<Real>> inputs;
    std::vector<Tensor<Real>> targets;

    std::size_t size() const { return inputs.size(); }
};

namespace detail {

// classification: argmax agreement (or thresholded for scalar outputs);
// regression: mean absolute error over unmasked elements.
template <class Real>
double sample_metric(Loss loss, const Tensor<Real>& pred, const Tensor<Real>& target,
                     double mask_value) {
    if (loss == Loss::CCE || (loss == Loss::BCE && pred.size() > 1)) {
        std::size_t pa = 0, ta = 0;
        for (std::size_t i = 1; i < pred.size(); ++i) {
            if (pred.data[i] > pred.data[pa]) pa = i;
            if (target.data[i] > target.data[ta]) ta = i;
        }
        return pa == ta ? 1.0 : 0.0;
    }
    if (loss == Loss::BCE) {
        const bool p = static_cast<double>(pred.data[0]) > 0.5;
        const bool t = static_cast<double>(target.data[0]) > 0.5;
        return p == t ? 1.0 : 0.0;
    }
    double acc = 0.0;
    std::size_t counted = 0;
    const bool masking = !std::isnan(mask_value);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (masking && static_cast<double>(target.data[i]) == mask_value) continue;
        acc += std::abs(static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i]));
        ++counted;
    }
    return counted ? acc / static_cast<double>(counted) : 0.0;
}

template <class Real>
class AdamState {
public:
    void ensure(std::size_t n) {
        if (m_.size() != n) {
            m_.assign(n, 0.0);
            v_.assign(n, 0.0);
        }
    }

    void step(std::span<Real> params, std::span<Real> grads, double scale, double lr) {
        ensure(params.size());
        ++t_;
        const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        const double bc1 = 1.0 - std::pow(b1, t_);
        const double bc2 = 1.0 - std::pow(b2, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double g = static_cast<double>(grads[i]) * scale;
            m_[i] = b1 * m_[i] + (1.0 - b1) * g;
            v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
            const double mhat = m_[i] / bc1;
            const double vhat = v_[i] / bc2;
            params[i] -= static_cast<Real>(lr * mhat / (std::sqrt(vhat) + eps));
        }
    }

private:
    std::vector<double> m_, v_;
    int t_ = 0;
};

} // namespace detail

// Seeded mini-batch gradient descent over explicit train/validation index
// lists. Deterministic for a fixed seed in single-threaded use: the
// shuffle order, dropout masks and update order are all driven by one
// stream derived from config.seed.
template <class Real>
TrainReport train_indexed(Network<Real>& net, const Dataset<Real>& data,
                          std::vector<std::size_t> train_idx,
                          std::vector<std::size_t> val_idx, const TrainConfig& config) {
    if (train_idx.empty()) throw EmptyInput("training dataset is empty");
    if (data.inputs.size() != data.targets.size())
        throw ShapeMismatch("inputs/targets count mismatch");
    if (config.epochs < 1 || config.batch_size < 1) throw Error("bad train config");

    if (!config.dropout_rates.empty()) {
        std::size_t next = 0;
        for (auto& layer : net.layers()) {
            auto* drop = dynamic_cast<DropoutLayer<Real>*>(layer.get());
            if (drop != nullptr && next < config.dropout_rates.size())
                drop->set_rate(config.dropout_rates[next++]);
        }
    }

    Rng rng(hash64(config.seed, "train"));
    std::vector<detail::AdamState<Real>> adam(net.layers().size());

    TrainReport report;
    report.metric_name = net.loss == Loss::MSE ? "mae" : "accuracy";

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(train_idx);
        double epoch_loss = 0.0, epoch_metric = 0.0;

        for (std::size_t start = 0; start < train_idx.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop =
                std::min(train_idx.size(), start + static_cast<std::size_t>(config.batch_size));
            net.zero_grads();
            for (std::size_t k = start; k < stop; ++k) {
                const std::size_t idx = train_idx[k];
                FwdContext ctx;
                ctx.training = true;
                ctx.rng = &rng;
                const double sample_loss = net.backward(data.inputs[idx], data.targets[idx], ctx);
                if (!std::isfinite(sample_loss))
                    throw DivergenceDetected("loss became non-finite at epoch " +
                                             std::to_string(epoch + 1));
                epoch_loss += sample_loss;
                // metric from the predictions backward() already computed
                epoch_metric += detail::sample_metric(net.loss, net.last_prediction(),
                                                      data.targets[idx], net.mask_value);
            }
            const double scale = 1.0 / static_cast<double>(stop - start);
            for (std::size_t li = 0; li < net.layers().size(); ++li) {
                auto params = net.layers()[li]->params();
                auto grads = net.layers()[li]->grads();
                if (params.empty()) continue;
                if (config.optimizer == Optimizer::SGD) {
                    for (std::size_t i = 0; i < params.size(); ++i)
                        params[i] -= static_cast<Real>(config.learning_rate * scale *
                                                       static_cast<double>(grads[i]));
                } else {
                    adam[li].step(params, grads, scale, config.learning_rate);
                }
            }
        }

        EpochStats stats;
        stats.epoch = epoch + 1;
        stats.train_loss = epoch_loss / static_cast<double>(train_idx.size());
        stats.train_metric = epoch_metric / static_cast<double>(train_idx.size());

        if (!val_idx.empty()) {
            double vloss = 0.0, vmetric = 0.0;
            for (const std::size_t idx : val_idx) {
                FwdContext ctx;
                const Tensor<Real> pred = net.forward(data.inputs[idx], ctx);
                vloss += net.compute_loss(pred, data.targets[idx]);
                vmetric += detail::sample_metric(net.loss, pred, data.targets[idx], net.mask_value);
            }
            stats.val_loss = vloss / static_cast<double>(val_idx.size());
            stats.val_metric = vmetric / static_cast<double>(val_idx.size());
        }
        report.epochs.push_back(stats);
    }
    return report;
}

// Convenience wrapper: hold out config.validation_split of the dataset
// (seeded shuffle decides membership once, before training).
template <class Real>
TrainReport train(Network<Real>& net, const Dataset<Real>& data, const TrainConfig& config) {
    if (data.size() == 0) throw EmptyInput("training dataset is empty");
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::size_t val_count = 0;
    if (config.validation_split > 0.0) {
        Rng rng(hash64(config.seed, "valsplit"));
        rng.shuffle(order);
        val_count = static_cast<std::size_t>(std::llround(config.validation_split *
                                                          static_cast<double>(data.size())));
        val_count = std::min(val_count, data.size() - 1);
    }
    std::vector<std::size_t> val_idx(order.end() - static_cast<std::ptrdiff_t>(val_count),
                                     order.end());
    order.resize(order.size() - val_count);
    return train_indexed(net, data, std::move(order), std::move(val_idx), config);
}

// Central finite-difference check of every parameter gradient (a seeded
// 10k subsample above 10k parameters). Returns the maximum relative
// error; run with Real = double.
template <class Real>
double grad_check(Network<Real>& net, const Tensor<Real>& input, const Tensor<Real>& target,
                  double eps = 1e-5, std::uint64_t seed = 0) {
    net.zero_grads();
    FwdContext ctx; // eval mode: dropout inactive
    net.backward(input, target, ctx);

    std::vector<Real*> param_ptrs;
    std::vector<Real> analytic;
    for (auto& layer : net.layers()) {
        auto params = layer->params();
        auto grads = layer->grads();
        for (std::size_t i = 0; i < params.size(); ++i) {
            param_ptrs.push_back(&params[i]);
            analytic.push_back(grads[i]);
        }
    }
    if (param_ptrs.empty()) return 0.0;

    std::vector<std::size_t> picks(param_ptrs.size());
    std::iota(picks.begin(), picks.end(), 0);
    constexpr std::size_t kMaxChecks = 10'000;
    if (picks.size() > kMaxChecks) {
        Rng rng(hash64(seed, "grad_check"));
        rng.shuffle(picks);
        picks.resize(kMaxChecks);
    }

    double worst = 0.0;
    for (const std::size_t i : picks) {
        Real* p = param_ptrs[i];
        const Real original = *p;
        *p = original + static_cast<Real>(eps);
        const double up = net.compute_loss(net.forward(input, ctx), target);
        *p = original - static_cast<Real>(eps);
        const double down = net.compute_loss(net.forward(input, ctx), target);
        *p = original;
        const double numeric = (up - down) / (2.0 * eps);
        const double exact = static_cast<double>(analytic[i]);
        const double rel =
            std::abs(exact - numeric) / std::max({1.0, std::abs(exact), std::abs(numeric)});
        worst = std::max(worst, rel);
    }
    return worst;
}

} // namespace ptk::nn
