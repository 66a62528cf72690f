// From-scratch neural network engine: dense / conv2d / maxpool / dropout /
// flatten / LSTM layers, reverse-mode gradients for all of them, and the
// three loss heads (MSE+linear, BCE+sigmoid, CCE+softmax, fused for
// stability). Templated on the scalar so training runs in float and
// gradient checks in double.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ptk/errors.hpp"
#include "ptk/rng.hpp"
#include "ptk/tensor.hpp"

namespace ptk::nn {

enum class Activation : std::uint32_t { Identity = 0, Sigmoid, Tanh, Relu, LeakyRelu };
enum class Loss : std::uint32_t { MSE = 0, BCE, CCE };

inline const char* to_string(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::LeakyRelu: return "leaky_relu";
    }
    return "?";
}

inline const char* to_string(Loss l) {
    switch (l) {
        case Loss::MSE: return "mse";
        case Loss::BCE: return "bce";
        case Loss::CCE: return "cce";
    }
    return "?";
}

template <class Real>
Real activate(Activation kind, Real x) {
    switch (kind) {
        case Activation::Identity: return x;
        case Activation::Sigmoid: return Real(1) / (Real(1) + std::exp(-x));
        case Activation::Tanh: return std::tanh(x);
        case Activation::Relu: return x > Real(0) ? x : Real(0);
        case Activation::LeakyRelu: return x > Real(0) ? x : Real(0.1) * x;
    }
    return x;
}

// Derivative expressed through the activation output.
template <class Real>
Real activate_grad_from_output(Activation kind, Real a) {
    switch (kind) {
        case Activation::Identity: return Real(1);
        case Activation::Sigmoid: return a * (Real(1) - a);
        case Activation::Tanh: return Real(1) - a * a;
        case Activation::Relu: return a > Real(0) ? Real(1) : Real(0);
        case Activation::LeakyRelu: return a > Real(0) ? Real(1) : Real(0.1);
    }
    return Real(1);
}

struct FwdContext {
    bool training = false;
    Rng* rng = nullptr;
    // time steps to skip (sequence models); set by the network when a
    // mask value is configured
    const std::vector<unsigned char>* time_mask = nullptr;
};

template <class Real>
class Layer {
public:
    virtual ~Layer() = default;

    virtual std::string kind() const = 0;
    virtual std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const = 0;
    virtual Tensor<Real> forward(const Tensor<Real>& input, FwdContext& ctx) = 0;
    // Consumes the gradient w.r.t. this layer's output, accumulates
    // parameter gradients, returns the gradient w.r.t. the input.
    virtual Tensor<Real> backward(const Tensor<Real>& grad_out) = 0;

    virtual std::span<Real> params() { return {}; }
    virtual std::span<Real> grads() { return {}; }
    virtual void init_params(Rng&) {}

    // serialization hooks: integral/real hyperparameters, enough to
    // reconstruct the layer via make_layer()
    virtual std::vector<double> hyperparams() const { return {}; }

    void zero_grads() {
        auto g = grads();
        std::fill(g.begin(), g.end(), Real(0));
    }
};

namespace detail {

template <class Real>
void he_uniform(std::span<Real> w, std::size_t fan_in, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (Real& v : w) v = static_cast<Real>(rng.uniform(-limit, limit));
}

template <class Real>
void glorot_uniform(std::span<Real> w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (Real& v : w) v = static_cast<Real>(rng.uniform(-limit, limit));
}

} // namespace detail

template <class Real>
class DenseLayer final : public Layer<Real> {
public:
    DenseLayer(std::size_t in, std::size_t out, Activation act = Activation::Identity)
        : in_(in), out_(out), act_(act), params_(in * out + out, Real(0)),
          grads_(params_.size(), Real(0)) {}

    std::string kind() const override { return "dense"; }

    // Rank-1 input maps [in] -> [out]; rank-2 input [T,in] is treated as T
    // independent rows, giving [T,out].
    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() == 2 && in[1] == in_) return {in[0], out_};
        if (Tensor<Real>::count(in) != in_)
            throw ShapeMismatch("dense expects " + std::to_string(in_) + " inputs");
        return {out_};
    }

    Tensor<Real> forward(const Tensor<Real>& input, FwdContext&) override {
        const bool rowwise = input.rank() == 2 && input.shape[1] == in_;
        if (!rowwise && input.size() != in_)
            throw ShapeMismatch("dense layer fed " + input.shape_string() + ", expected " +
                                std::to_string(in_) + " features");
        input_ = input;
        const std::size_t rows = rowwise ? input.shape[0] : 1;
        Tensor<Real> out(rowwise ? std::vector<std::size_t>{rows, out_}
                                 : std::vector<std::size_t>{out_});
        const Real* w = params_.data();
        const Real* b = params_.data() + in_ * out_;
        for (std::size_t r = 0; r < rows; ++r) {
            const Real* x = input.data.data() + r * in_;
            Real* y = out.data.data() + r * out_;
            for (std::size_t o = 0; o < out_; ++o) {
                Real acc = b[o];
                const Real* row = w + o * in_;
                for (std::size_t i = 0; i < in_; ++i) acc += row[i] * x[i];
                y[o] = activate(act_, acc);
            }
        }
        output_ = out;
        return out;
    }

    Tensor<Real> backward(const Tensor<Real>& grad_out) override {
        Tensor<Real> grad_in(input_.shape);
        const std::size_t rows = input_.size() / in_;
        const Real* w = params_.data();
        Real* dw = grads_.data();
        Real* db = grads_.data() + in_ * out_;
        for (std::size_t r = 0; r < rows; ++r) {
            const Real* x = input_.data.data() + r * in_;
            Real* gx = grad_in.data.data() + r * in_;
            for (std::size_t o = 0; o < out_; ++o) {
                const Real dz = grad_out.data[r * out_ + o] *
                                activate_grad_from_output(act_, output_.data[r * out_ + o]);
                db[o] += dz;
                const Real* wrow = w + o * in_;
                Real* dwrow = dw + o * in_;
                for (std::size_t i = 0; i < in_; ++i) {
                    dwrow[i] += dz * x[i];
                    gx[i] += dz * wrow[i];
                }
            }
        }
        return grad_in;
    }

    std::span<Real> params() override { return params_; }
    std::span<Real> grads() override { return grads_; }

    void init_params(Rng& rng) override {
        std::span<Real> w(params_.data(), in_ * out_);
        if (act_ == Activation::Relu || act_ == Activation::LeakyRelu)
            detail::he_uniform(w, in_, rng);
        else
            detail::glorot_uniform(w, in_, out_, rng);
        std::fill(params_.begin() + static_cast<std::ptrdiff_t>(in_ * out_), params_.end(), Real(0));
    }

    std::vector<double> hyperparams() const override {
        return {double(in_), double(out_), double(static_cast<std::uint32_t>(act_))};
    }

    std::size_t in_features() const { return in_; }
    std::size_t out_features() const { return out_; }
    Activation activation() const { return act_; }

private:
    std::size_t in_, out_;
    Activation act_;
    std::vector<Real> params_, grads_;
    Tensor<Real> input_, output_;
};

// Cross-correlation with zero same-padding, stride 1, odd kernel.
template <class Real>
class Conv2DLayer final : public Layer<Real> {
public:
    Conv2DLayer(std::size_t in_ch, std::size_t out_ch, std::size_t kh, std::size_t kw,
                Activation act = Activation::Relu)
        : in_ch_(in_ch), out_ch_(out_ch), kh_(kh), kw_(kw), act_(act),
          params_(out_ch * in_ch * kh * kw + out_ch, Real(0)), grads_(params_.size(), Real(0)) {
        if (kh_ % 2 == 0 || kw_ % 2 == 0)
            throw ShapeMismatch("same padding requires odd kernel dims");
    }

    std::string kind() const override { return "conv2d"; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 3 || in[0] != in_ch_)
            throw ShapeMismatch("conv2d expects [C,H,W] input with C = " + std::to_string(in_ch_));
        return {out_ch_, in[1], in[2]};
    }

    Tensor<Real> forward(const Tensor<Real>& input, FwdContext&) override {
        if (input.rank() != 3 || input.shape[0] != in_ch_)
            throw ShapeMismatch("conv2d fed tensor of shape " + input.shape_string());
        input_ = input;
        const std::size_t h = input.shape[1], w = input.shape[2];
        const std::ptrdiff_t ph = static_cast<std::ptrdiff_t>(kh_ / 2);
        const std::ptrdiff_t pw = static_cast<std::ptrdiff_t>(kw_ / 2);
        Tensor<Real> out({out_ch_, h, w});
        const Real* bias = params_.data() + out_ch_ * in_ch_ * kh_ * kw_;

        for (std::size_t oc = 0; oc < out_ch_; ++oc) {
            Real* oplane = out.data.data() + oc * h * w;
            for (std::size_t i = 0; i < h * w; ++i) oplane[i] = bias[oc];
            for (std::size_t ic = 0; ic < in_ch_; ++ic) {
                const Real* iplane = input.data.data() + ic * h * w;
                const Real* kern = kernel(oc, ic);
                for (std::size_t ky = 0; ky < kh_; ++ky) {
                    const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(ky) - ph;
                    for (std::size_t kx = 0; kx < kw_; ++kx) {
                        const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - pw;
                        const Real kv = kern[ky * kw_ + kx];
                        const auto [y_lo, y_hi] = shift_bounds(dy, h);
                        const auto [x_lo, x_hi] = shift_bounds(dx, w);
                        for (std::size_t y = y_lo; y < y_hi; ++y) {
                            const Real* irow =
                                iplane + (static_cast<std::ptrdiff_t>(y) + dy) * static_cast<std::ptrdiff_t>(w);
                            Real* orow = oplane + y * w;
                            for (std::size_t x = x_lo; x < x_hi; ++x)
                                orow[x] += kv * irow[static_cast<std::ptrdiff_t>(x) + dx];
                        }
                    }
                }
            }
        }
        for (auto& v : out.data) v = activate(act_, v);
        output_ = out;
        return out;
    }

    Tensor<Real> backward(const Tensor<Real>& grad_out) override {
        const std::size_t h = input_.shape[1], w = input_.shape[2];
        const std::ptrdiff_t ph = static_cast<std::ptrdiff_t>(kh_ / 2);
        const std::ptrdiff_t pw = static_cast<std::ptrdiff_t>(kw_ / 2);

        Tensor<Real> dz = grad_out;
        for (std::size_t i = 0; i < dz.size(); ++i)
            dz.data[i] *= activate_grad_from_output(act_, output_.data[i]);

        Tensor<Real> grad_in({in_ch_, h, w});
        Real* dbias = grads_.data() + out_ch_ * in_ch_ * kh_ * kw_;

        for (std::size_t oc = 0; oc < out_ch_; ++oc) {
            const Real* dzplane = dz.data.data() + oc * h * w;
            for (std::size_t i = 0; i < h * w; ++i) dbias[oc] += dzplane[i];
            for (std::size_t ic = 0; ic < in_ch_; ++ic) {
                const Real* iplane = input_.data.data() + ic * h * w;
                Real* giplane = grad_in.data.data() + ic * h * w;
                const Real* kern = kernel(oc, ic);
                Real* dkern = kernel_grad(oc, ic);
                for (std::size_t ky = 0; ky < kh_; ++ky) {
                    const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(ky) - ph;
                    for (std::size_t kx = 0; kx < kw_; ++kx) {
                        const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(kx) - pw;
                        const auto [y_lo, y_hi] = shift_bounds(dy, h);
                        const auto [x_lo, x_hi] = shift_bounds(dx, w);
                        const Real kv = kern[ky * kw_ + kx];
                        Real kacc = Real(0);
                        for (std::size_t y = y_lo; y < y_hi; ++y) {
                            const Real* dzrow = dzplane + y * w;
                            const Real* irow =
                                iplane + (static_cast<std::ptrdiff_t>(y) + dy) * static_cast<std::ptrdiff_t>(w);
                            Real* girow =
                                giplane + (static_cast<std::ptrdiff_t>(y) + dy) * static_cast<std::ptrdiff_t>(w);
                            for (std::size_t x = x_lo; x < x_hi; ++x) {
                                const Real g = dzrow[x];
                                kacc += g * irow[static_cast<std::ptrdiff_t>(x) + dx];
                                girow[static_cast<std::ptrdiff_t>(x) + dx] += g * kv;
                            }
                        }
                        dkern[ky * kw_ + kx] += kacc;
                    }
                }
            }
        }
        return grad_in;
    }

    std::span<Real> params() override { return params_; }
    std::span<Real> grads() override { return grads_; }

    void init_params(Rng& rng) override {
        const std::size_t fan_in = in_ch_ * kh_ * kw_;
        const std::size_t fan_out = out_ch_ * kh_ * kw_;
        std::span<Real> w(params_.data(), out_ch_ * in_ch_ * kh_ * kw_);
        if (act_ == Activation::Relu || act_ == Activation::LeakyRelu)
            detail::he_uniform(w, fan_in, rng);
        else
            detail::glorot_uniform(w, fan_in, fan_out, rng);
        std::fill(params_.begin() + static_cast<std::ptrdiff_t>(w.size()), params_.end(), Real(0));
    }

    std::vector<double> hyperparams() const override {
        return {double(in_ch_), double(out_ch_), double(kh_), double(kw_),
                double(static_cast<std::uint32_t>(act_))};
    }

private:
    // valid output range [lo, hi) such that 0 <= y + shift < extent
    static std::pair<std::size_t, std::size_t> shift_bounds(std::ptrdiff_t shift,
                                                            std::size_t extent) {
        const auto n = static_cast<std::ptrdiff_t>(extent);
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, n - shift);
        if (hi <= lo) return {0, 0};
        return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
    }

    Real* kernel_ptr(std::vector<Real>& v, std::size_t oc, std::size_t ic) {
        return v.data() + ((oc * in_ch_ + ic) * kh_) * kw_;
    }
    const Real* kernel(std::size_t oc, std::size_t ic) const {
        return params_.data() + ((oc * in_ch_ + ic) * kh_) * kw_;
    }
    Real* kernel_grad(std::size_t oc, std::size_t ic) { return kernel_ptr(grads_, oc, ic); }

    std::size_t in_ch_, out_ch_, kh_, kw_;
    Activation act_;
    std::vector<Real> params_, grads_;
    Tensor<Real> input_, output_;
};

// 2x2 max pooling, stride 2. Odd spatial dims are padded on the
// right/bottom with -inf, so output dims are ceil(in/2). Gradient routes
// to the first maximal element in row-major order.
template <class Real>
class MaxPool2DLayer final : public Layer<Real> {
public:
    std::string kind() const override { return "maxpool2d"; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 3) throw ShapeMismatch("maxpool2d expects [C,H,W]");
        return {in[0], (in[1] + 1) / 2, (in[2] + 1) / 2};
    }

    Tensor<Real> forward(const Tensor<Real>& input, FwdContext&) override {
        if (input.rank() != 3) throw ShapeMismatch("maxpool2d expects [C,H,W]");
        in_shape_ = input.shape;
        const std::size_t c = input.shape[0], h = input.shape[1], w = input.shape[2];
        const std::size_t oh = (h + 1) / 2, ow = (w + 1) / 2;
        Tensor<Real> out({c, oh, ow});
        argmax_.assign(out.size(), 0);
        for (std::size_t ch = 0; ch < c; ++ch) {
            for (std::size_t oy = 0; oy < oh; ++oy) {
                for (std::size_t ox = 0; ox < ow; ++ox) {
                    Real best = -std::numeric_limits<Real>::infinity();
                    std::size_t best_idx = 0;
                    for (std::size_t dy = 0; dy < 2; ++dy) {
                        const std::size_t y = 2 * oy + dy;
                        if (y >= h) continue;
                        for (std::size_t dx = 0; dx < 2; ++dx) {
                            const std::size_t x = 2 * ox + dx;
                            if (x >= w) continue;
                            const std::size_t idx = (ch * h + y) * w + x;
                            if (input.data[idx] > best) {
                                best = input.data[idx];
                                best_idx = idx;
                            }
                        }
                    }
                    const std::size_t out_idx = (ch * oh + oy) * ow + ox;
                    out.data[out_idx] = best;
                    argmax_[out_idx] = best_idx;
                }
            }
        }
        return out;
    }

    Tensor<Real> backward(const Tensor<Real>& grad_out) override {
        Tensor<Real> grad_in(in_shape_);
        for (std::size_t i = 0; i < grad_out.size(); ++i)
            grad_in.data[argmax_[i]] += grad_out.data[i];
        return grad_in;
    }

private:
    std::vector<std::size_t> in_shape_;
    std::vector<std::size_t> argmax_;
};

// Inverted dropout: kept activations are scaled by 1/(1-rate) during
// training so the expected activation is unchanged; identity in eval.
template <class Real>
class DropoutLayer final : public Layer<Real> {
public:
    explicit DropoutLayer(double rate) : rate_(rate) {
        if (rate_ < 0.0 || rate_ >= 1.0) throw Error("dropout rate must be in [0,1)");
    }

    std::string kind() const override { return "dropout"; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        return in;
    }

    Tensor<Real> forward(const Tensor<Real>& input, FwdContext& ctx) override {
        if (!ctx.training || rate_ == 0.0) {
            mask_.clear();
            return input;
        }
        if (ctx.rng == nullptr) throw Error("dropout in training mode needs an rng");
        const Real scale = Real(1.0 / (1.0 - rate_));
        mask_.resize(input.size());
        Tensor<Real> out = input;
        for (std::size_t i = 0; i < input.size(); ++i) {
            const bool keep = ctx.rng->uniform() >= rate_;
            mask_[i] = keep ? scale : Real(0);
            out.data[i] *= mask_[i];
        }
        return out;
    }

    Tensor<Real> backward(const Tensor<Real>& grad_out) override {
        if (mask_.empty()) return grad_out;
        Tensor<Real> grad_in = grad_out;
        for (std::size_t i = 0; i < grad_in.size(); ++i) grad_in.data[i] *= mask_[i];
        return grad_in;
    }

    std::vector<double> hyperparams() const override { return {rate_}; }

    double rate() const { return rate_; }
    void set_rate(double r) { rate_ = r; }

private:
    double rate_;
    std::vector<Real> mask_;
};

template <class Real>
class FlattenLayer final : public Layer<Real> {
public:
    std::string kind() const override { return "flatten"; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        return {Tensor<Real>::count(in)};
    }

    Tensor<Real> forward(const Tensor<Real>& input, FwdContext&) override {
        in_shape_ = input.shape;
        return input.reshaped({input.size()});
    }

    Tensor<Real> backward(const Tensor<Real>& grad_out) override {
        return grad_out.reshaped(in_shape_);
    }

private:
    std::vector<std::size_t> in_shape_;
};

// Peephole LSTM, gate equations exactly as printed in the reference
// material: input and forget gates see c_{t-1}, the output gate sees c_t.
// Time steps flagged by the context mask pass hidden and cell state
// through unchanged.
template <class Real>
class LstmLayer final : public Layer<Real> {
public:
    LstmLayer(std::size_t input_size, std::size_t hidden, bool return_sequences)
        : x_(input_size), h_(hidden), return_seq_(return_sequences) {
        // [W_xi W_hi W_ci b_i | W_xf W_hf W_cf b_f | W_xo W_ho W_co b_o | W_xc W_hc b_c]
        gate_span_ = h_ * x_ + h_ * h_ + h_ * h_ + h_;
        cand_span_ = h_ * x_ + h_ * h_ + h_;
        params_.assign(3 * gate_span_ + cand_span_, Real(0));
        grads_.assign(params_.size(), Real(0));
    }

    std::string kind() const override { return "lstm"; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 2 || in[1] != x_)
            throw ShapeMismatch("lstm expects [T," + std::to_string(x_) + "] input");
        if (return_seq_) return {in[0], h_};
        return {h_};
    }

    Tensor<Real> forward(const Tensor<Real>& input, FwdContext& ctx) override {
        if (input.rank() != 2 || input.shape[1] != x_)
            throw ShapeMismatch("lstm fed tensor of shape " + input.shape_string());
        const std::size_t steps = input.shape[0];
        input_ = input;
        masked_.assign(steps, 0);
        if (ctx.time_mask != nullptr && ctx.time_mask->size() == steps)
            masked_.assign(ctx.time_mask->begin(), ctx.time_mask->end());

        h_states_.assign(steps + 1, std::vector<Real>(h_, Real(0)));
        c_states_.assign(steps + 1, std::vector<Real>(h_, Real(0)));
        gate_i_.assign(steps, std::vector<Real>(h_, Real(0)));
        gate_f_.assign(steps, std::vector<Real>(h_, Real(0)));
        gate_o_.assign(steps, std::vector<Real>(h_, Real(0)));
        cand_.assign(steps, std::vector<Real>(h_, Real(0)));
        tanh_c_.assign(steps, std::vector<Real>(h_, Real(0)));

        for (std::size_t t = 0; t < steps; ++t) {
            const std::vector<Real>& h_prev = h_states_[t];
            const std::vector<Real>& c_prev = c_states_[t];
            if (masked_[t]) {
                h_states_[t + 1] = h_prev;
                c_states_[t + 1] = c_prev;
                continue;
            }
            const Real* xt = input.data.data() + t * x_;
            auto& i = gate_i_[t];
            auto& f = gate_f_[t];
            auto& o = gate_o_[t];
            auto& g = cand_[t];
            auto& c = c_states_[t + 1];
            auto& h = h_states_[t + 1];

            gate_preact(W_xi(), W_hi(), W_ci(), b_i(), xt, h_prev.data(), c_prev.data(), i.data());
            gate_preact(W_xf(), W_hf(), W_cf(), b_f(), xt, h_prev.data(), c_prev.data(), f.data());
            for (std::size_t u = 0; u < h_; ++u) {
                i[u] = activate(Activation::Sigmoid, i[u]);
                f[u] = activate(Activation::Sigmoid, f[u]);
            }
            gate_preact(W_xc(), W_hc(), nullptr, b_c(), xt, h_prev.data(), nullptr, g.data());
            for (std::size_t u = 0; u < h_; ++u) {
                g[u] = std::tanh(g[u]);
                c[u] = f[u] * c_prev[u] + i[u] * g[u];
            }
            // output gate peeks at the new cell state
            gate_preact(W_xo(), W_ho(), W_co(), b_o(), xt, h_prev.data(), c.data(), o.data());
            for (std::size_t u = 0; u < h_; ++u) {
                o[u] = activate(Activation::Sigmoid, o[u]);
                tanh_c_[t][u] = std::tanh(c[u]);
                h[u] = o[u] * tanh_c_[t][u];
            }
        }

        if (return_seq_) {
            Tensor<Real> out({steps, h_});
            for (std::size_t t = 0; t < steps; ++t)
                std::copy(h_states_[t + 1].begin(), h_states_[t + 1].end(),
                          out.data.begin() + static_cast<std::ptrdiff_t>(t * h_));
            return out;
        }
        Tensor<Real> out({h_});
        std::copy(h_states_[steps].begin(), h_states_[steps].end(), out.data.begin());
        return out;
    }

    Tensor<Real> backward(const Tensor<Real>& grad_out) override {
        const std::size_t steps = input_.shape[0];
        Tensor<Real> grad_in({steps, x_});
        std::vector<Real> dh(h_, Real(0)), dc(h_, Real(0));
        std::vector<Real> dzi(h_), dzf(h_), dzo(h_), dzg(h_);

        for (std::size_t t = steps; t-- > 0;) {
            // gradient arriving at h_t from the layer output
            if (return_seq_) {
                for (std::size_t u = 0; u < h_; ++u) dh[u] += grad_out.data[t * h_ + u];
            } else if (t == steps - 1) {
                for (std::size_t u = 0; u < h_; ++u) dh[u] += grad_out.data[u];
            }

            if (masked_[t]) continue; // state identity: dh, dc flow to t-1

            const Real* xt = input_.data.data() + t * x_;
            const auto& h_prev = h_states_[t];
            const auto& c_prev = c_states_[t];
            const auto& c_cur = c_states_[t + 1];
            const auto& i = gate_i_[t];
            const auto& f = gate_f_[t];
            const auto& o = gate_o_[t];
            const auto& g = cand_[t];
            const auto& tc = tanh_c_[t];

            for (std::size_t u = 0; u < h_; ++u) {
                dzo[u] = dh[u] * tc[u] * o[u] * (Real(1) - o[u]);
                dc[u] += dh[u] * o[u] * (Real(1) - tc[u] * tc[u]);
            }
            // o's pre-activation contains W_co c_t
            add_matT_vec(W_co(), dzo.data(), dc.data());

            for (std::size_t u = 0; u < h_; ++u) {
                dzg[u] = dc[u] * i[u] * (Real(1) - g[u] * g[u]);
                dzi[u] = dc[u] * g[u] * i[u] * (Real(1) - i[u]);
                dzf[u] = dc[u] * c_prev[u] * f[u] * (Real(1) - f[u]);
            }

            // parameter gradients
            accum_gate_grads(dW_xi(), dW_hi(), dW_ci(), db_i(), dzi.data(), xt, h_prev.data(),
                             c_prev.data());
            accum_gate_grads(dW_xf(), dW_hf(), dW_cf(), db_f(), dzf.data(), xt, h_prev.data(),
                             c_prev.data());
            accum_gate_grads(dW_xo(), dW_ho(), dW_co(), db_o(), dzo.data(), xt, h_prev.data(),
                             c_cur.data());
            accum_gate_grads(dW_xc(), dW_hc(), nullptr, db_c(), dzg.data(), xt, h_prev.data(),
                             nullptr);

            // gradients flowing to x_t, h_{t-1}, c_{t-1}
            Real* dx = grad_in.data.data() + t * x_;
            add_matT_vec_x(W_xi(), dzi.data(), dx);
            add_matT_vec_x(W_xf(), dzf.data(), dx);
            add_matT_vec_x(W_xo(), dzo.data(), dx);
            add_matT_vec_x(W_xc(), dzg.data(), dx);

            std::vector<Real> dh_prev(h_, Real(0)), dc_prev(h_, Real(0));
            add_matT_vec(W_hi(), dzi.data(), dh_prev.data());
            add_matT_vec(W_hf(), dzf.data(), dh_prev.data());
            add_matT_vec(W_ho(), dzo.data(), dh_prev.data());
            add_matT_vec(W_hc(), dzg.data(), dh_prev.data());
            for (std::size_t u = 0; u < h_; ++u) dc_prev[u] = dc[u] * f[u];
            add_matT_vec(W_ci(), dzi.data(), dc_prev.data());
            add_matT_vec(W_cf(), dzf.data(), dc_prev.data());

            dh = std::move(dh_prev);
            dc = std::move(dc_prev);
        }
        return grad_in;
    }

    std::span<Real> params() override { return params_; }
    std::span<Real> grads() override { return grads_; }

    void init_params(Rng& rng) override {
        std::fill(params_.begin(), params_.end(), Real(0));
        auto init_block = [&](Real* w, std::size_t rows_cols_in) {
            detail::glorot_uniform(std::span<Real>(w, h_ * rows_cols_in), rows_cols_in, h_, rng);
        };
        init_block(W_xi(), x_); init_block(W_hi(), h_); init_block(W_ci(), h_);
        init_block(W_xf(), x_); init_block(W_hf(), h_); init_block(W_cf(), h_);
        init_block(W_xo(), x_); init_block(W_ho(), h_); init_block(W_co(), h_);
        init_block(W_xc(), x_); init_block(W_hc(), h_);
        // biases stay zero
    }

    std::vector<double> hyperparams() const override {
        return {double(x_), double(h_), return_seq_ ? 1.0 : 0.0};
    }

    std::size_t hidden_size() const { return h_; }
    std::size_t input_size() const { return x_; }
    bool returns_sequences() const { return return_seq_; }

    struct StepResult {
        std::vector<Real> h;
        std::vector<Real> c;
    };

    // One cell update from caller-supplied states.
    StepResult step(std::span<const Real> x_t, std::span<const Real> h_prev,
                    std::span<const Real> c_prev) const {
        if (x_t.size() != x_ || h_prev.size() != h_ || c_prev.size() != h_)
            throw ShapeMismatch("lstm step state sizes do not match the cell");
        std::vector<Real> i(h_), f(h_), o(h_), g(h_);
        StepResult out{std::vector<Real>(h_), std::vector<Real>(h_)};
        gate_preact(W_xi(), W_hi(), W_ci(), b_i(), x_t.data(), h_prev.data(), c_prev.data(),
                    i.data());
        gate_preact(W_xf(), W_hf(), W_cf(), b_f(), x_t.data(), h_prev.data(), c_prev.data(),
                    f.data());
        gate_preact(W_xc(), W_hc(), nullptr, b_c(), x_t.data(), h_prev.data(), nullptr, g.data());
        for (std::size_t u = 0; u < h_; ++u) {
            i[u] = activate(Activation::Sigmoid, i[u]);
            f[u] = activate(Activation::Sigmoid, f[u]);
            g[u] = std::tanh(g[u]);
            out.c[u] = f[u] * c_prev[u] + i[u] * g[u];
        }
        gate_preact(W_xo(), W_ho(), W_co(), b_o(), x_t.data(), h_prev.data(), out.c.data(),
                    o.data());
        for (std::size_t u = 0; u < h_; ++u) {
            o[u] = activate(Activation::Sigmoid, o[u]);
            out.h[u] = o[u] * std::tanh(out.c[u]);
        }
        return out;
    }

private:
    // z = W_x x + W_h h_prev + W_c c (optional) + b
    void gate_preact(const Real* wx, const Real* wh, const Real* wc, const Real* b, const Real* x,
                     const Real* hp, const Real* cp, Real* z) const {
        for (std::size_t u = 0; u < h_; ++u) {
            Real acc = b[u];
            const Real* wxrow = wx + u * x_;
            for (std::size_t k = 0; k < x_; ++k) acc += wxrow[k] * x[k];
            const Real* whrow = wh + u * h_;
            for (std::size_t k = 0; k < h_; ++k) acc += whrow[k] * hp[k];
            if (wc != nullptr) {
                const Real* wcrow = wc + u * h_;
                for (std::size_t k = 0; k < h_; ++k) acc += wcrow[k] * cp[k];
            }
            z[u] = acc;
        }
    }

    // out += W^T dz for an h x h matrix
    void add_matT_vec(const Real* w, const Real* dz, Real* out) const {
        for (std::size_t u = 0; u < h_; ++u) {
            const Real d = dz[u];
            const Real* row = w + u * h_;
            for (std::size_t k = 0; k < h_; ++k) out[k] += row[k] * d;
        }
    }

    // out += W^T dz for an h x x matrix
    void add_matT_vec_x(const Real* w, const Real* dz, Real* out) const {
        for (std::size_t u = 0; u < h_; ++u) {
            const Real d = dz[u];
            const Real* row = w + u * x_;
            for (std::size_t k = 0; k < x_; ++k) out[k] += row[k] * d;
        }
    }

    void accum_gate_grads(Real* dwx, Real* dwh, Real* dwc, Real* db, const Real* dz, const Real* x,
                          const Real* hp, const Real* cp) {
        for (std::size_t u = 0; u < h_; ++u) {
            const Real d = dz[u];
            Real* wxrow = dwx + u * x_;
            for (std::size_t k = 0; k < x_; ++k) wxrow[k] += d * x[k];
            Real* whrow = dwh + u * h_;
            for (std::size_t k = 0; k < h_; ++k) whrow[k] += d * hp[k];
            if (dwc != nullptr) {
                Real* wcrow = dwc + u * h_;
                for (std::size_t k = 0; k < h_; ++k) wcrow[k] += d * cp[k];
            }
            db[u] += d;
        }
    }

    // parameter block offsets
    Real* block(std::vector<Real>& v, std::size_t off) { return v.data() + off; }
    const Real* cblock(std::size_t off) const { return params_.data() + off; }
    std::size_t off_gate(std::size_t gate) const { return gate * gate_span_; }

    const Real* W_xi() const { return cblock(off_gate(0)); }
    const Real* W_hi() const { return cblock(off_gate(0) + h_ * x_); }
    const Real* W_ci() const { return cblock(off_gate(0) + h_ * x_ + h_ * h_); }
    const Real* b_i() const { return cblock(off_gate(0) + h_ * x_ + 2 * h_ * h_); }
    const Real* W_xf() const { return cblock(off_gate(1)); }
    const Real* W_hf() const { return cblock(off_gate(1) + h_ * x_); }
    const Real* W_cf() const { return cblock(off_gate(1) + h_ * x_ + h_ * h_); }
    const Real* b_f() const { return cblock(off_gate(1) + h_ * x_ + 2 * h_ * h_); }
    const Real* W_xo() const { return cblock(off_gate(2)); }
    const Real* W_ho() const { return cblock(off_gate(2) + h_ * x_); }
    const Real* W_co() const { return cblock(off_gate(2) + h_ * x_ + h_ * h_); }
    const Real* b_o() const { return cblock(off_gate(2) + h_ * x_ + 2 * h_ * h_); }
    const Real* W_xc() const { return cblock(off_gate(3)); }
    const Real* W_hc() const { return cblock(off_gate(3) + h_ * x_); }
    const Real* b_c() const { return cblock(off_gate(3) + h_ * x_ + h_ * h_); }

    Real* W_xi() { return block(params_, off_gate(0)); }
    Real* W_hi() { return block(params_, off_gate(0) + h_ * x_); }
    Real* W_ci() { return block(params_, off_gate(0) + h_ * x_ + h_ * h_); }
    Real* W_xf() { return block(params_, off_gate(1)); }
    Real* W_hf() { return block(params_, off_gate(1) + h_ * x_); }
    Real* W_cf() { return block(params_, off_gate(1) + h_ * x_ + h_ * h_); }
    Real* W_xo() { return block(params_, off_gate(2)); }
    Real* W_ho() { return block(params_, off_gate(2) + h_ * x_); }
    Real* W_co() { return block(params_, off_gate(2) + h_ * x_ + h_ * h_); }
    Real* W_xc() { return block(params_, off_gate(3)); }
    Real* W_hc() { return block(params_, off_gate(3) + h_ * x_); }

    Real* dW_xi() { return block(grads_, off_gate(0)); }
    Real* dW_hi() { return block(grads_, off_gate(0) + h_ * x_); }
    Real* dW_ci() { return block(grads_, off_gate(0) + h_ * x_ + h_ * h_); }
    Real* db_i() { return block(grads_, off_gate(0) + h_ * x_ + 2 * h_ * h_); }
    Real* dW_xf() { return block(grads_, off_gate(1)); }
    Real* dW_hf() { return block(grads_, off_gate(1) + h_ * x_); }
    Real* dW_cf() { return block(grads_, off_gate(1) + h_ * x_ + h_ * h_); }
    Real* db_f() { return block(grads_, off_gate(1) + h_ * x_ + 2 * h_ * h_); }
    Real* dW_xo() { return block(grads_, off_gate(2)); }
    Real* dW_ho() { return block(grads_, off_gate(2) + h_ * x_); }
    Real* dW_co() { return block(grads_, off_gate(2) + h_ * x_ + h_ * h_); }
    Real* db_o() { return block(grads_, off_gate(2) + h_ * x_ + 2 * h_ * h_); }
    Real* dW_xc() { return block(grads_, off_gate(3)); }
    Real* dW_hc() { return block(grads_, off_gate(3) + h_ * x_); }
    Real* db_c() { return block(grads_, off_gate(3) + h_ * x_ + h_ * h_); }

    std::size_t x_, h_;
    bool return_seq_;
    std::size_t gate_span_ = 0, cand_span_ = 0;
    std::vector<Real> params_, grads_;

    Tensor<Real> input_;
    std::vector<unsigned char> masked_;
    std::vector<std::vector<Real>> h_states_, c_states_;
    std::vector<std::vector<Real>> gate_i_, gate_f_, gate_o_, cand_, tanh_c_;
};

// ---------------------------------------------------------------------------
// losses

namespace detail {

constexpr double kProbEps = 1e-12;

template <class Real>
double clamp_prob(Real p) {
    return std::min(1.0 - kProbEps, std::max(kProbEps, static_cast<double>(p)));
}

} // namespace detail

// Standalone loss evaluation. MSE and BCE average over all elements; CCE
// averages over rows (first dimension) and sums over classes. Elements
// whose target equals `mask_value` are excluded (NaN disables masking).
template <class Real>
double loss_value(Loss kind, const Tensor<Real>& pred, const Tensor<Real>& target,
                  double mask_value = std::numeric_limits<double>::quiet_NaN()) {
    if (pred.shape != target.shape) throw ShapeMismatch("loss: prediction/target shapes differ");
    const bool masking = !std::isnan(mask_value);
    double acc = 0.0;
    std::size_t counted = 0;
    switch (kind) {
        case Loss::MSE:
            for (std::size_t i = 0; i < pred.size(); ++i) {
                if (masking && static_cast<double>(target.data[i]) == mask_value) continue;
                const double d = static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i]);
                acc += d * d;
                ++counted;
            }
            return counted ? acc / static_cast<double>(counted) : 0.0;
        case Loss::BCE:
            for (std::size_t i = 0; i < pred.size(); ++i) {
                if (masking && static_cast<double>(target.data[i]) == mask_value) continue;
                const double p = detail::clamp_prob(pred.data[i]);
                const double y = static_cast<double>(target.data[i]);
                acc -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
                ++counted;
            }
            return counted ? acc / static_cast<double>(counted) : 0.0;
        case Loss::CCE: {
            const std::size_t rows = pred.rank() >= 2 ? pred.shape[0] : 1;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                const double y = static_cast<double>(target.data[i]);
                if (y != 0.0) acc -= y * std::log(detail::clamp_prob(pred.data[i]));
            }
            return acc / static_cast<double>(rows);
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// network

template <class Real>
class Network {
public:
    Loss loss = Loss::MSE;
    // target/input sentinel for sequence models; NaN = disabled
    double mask_value = std::numeric_limits<double>::quiet_NaN();

    std::vector<std::unique_ptr<Layer<Real>>>& layers() { return layers_; }
    const std::vector<std::unique_ptr<Layer<Real>>>& layers() const { return layers_; }

    template <class L, class... Args>
    L& add(Args&&... args) {
        auto layer = std::make_unique<L>(std::forward<Args>(args)...);
        L& ref = *layer;
        layers_.push_back(std::move(layer));
        return ref;
    }

    void add_layer(std::unique_ptr<Layer<Real>> layer) { layers_.push_back(std::move(layer)); }

    void init_params(std::uint64_t seed) {
        Rng rng(hash64(seed, "init"));
        for (auto& layer : layers_) layer->init_params(rng);
    }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto& layer : layers_)
            n += const_cast<Layer<Real>*>(layer.get())->params().size();
        return n;
    }

    // Forward pass; applies the loss head's output transform (identity /
    // sigmoid / softmax). Dropout is active only when ctx.training.
    Tensor<Real> forward(const Tensor<Real>& input, FwdContext ctx = {}) {
        std::vector<unsigned char> mask;
        if (!std::isnan(mask_value) && input.rank() == 2) {
            mask.resize(input.shape[0]);
            for (std::size_t t = 0; t < input.shape[0]; ++t) {
                bool all_masked = true;
                for (std::size_t f = 0; f < input.shape[1] && all_masked; ++f)
                    if (static_cast<double>(input.at2(t, f)) != mask_value) all_masked = false;
                mask[t] = all_masked ? 1 : 0;
            }
            ctx.time_mask = &mask;
        }
        Tensor<Real> current = input;
        for (auto& layer : layers_) current = layer->forward(current, ctx);
        apply_output_transform(current);
        last_pred_ = current;
        return current;
    }

    double compute_loss(const Tensor<Real>& pred, const Tensor<Real>& target) const {
        return loss_value(loss, pred, target, loss == Loss::MSE ? mask_value
                                                                : std::numeric_limits<double>::quiet_NaN());
    }

    // Forward + fused loss gradient + full backward sweep. Accumulates
    // parameter gradients (callers zero them between batches). Returns
    // the sample loss.
    double backward(const Tensor<Real>& input, const Tensor<Real>& target, FwdContext ctx = {}) {
        const Tensor<Real> pred = forward(input, ctx);
        if (pred.shape != target.shape)
            throw ShapeMismatch("target shape " + target.shape_string() +
                                " does not match prediction " + pred.shape_string());
        const double sample_loss = compute_loss(pred, target);

        Tensor<Real> grad(pred.shape);
        const bool masking = loss == Loss::MSE && !std::isnan(mask_value);
        std::size_t counted = 0;
        if (masking) {
            for (std::size_t i = 0; i < pred.size(); ++i)
                if (static_cast<double>(target.data[i]) != mask_value) ++counted;
        } else {
            counted = pred.size();
        }
        switch (loss) {
            case Loss::MSE: {
                const double scale = counted ? 2.0 / static_cast<double>(counted) : 0.0;
                for (std::size_t i = 0; i < pred.size(); ++i) {
                    if (masking && static_cast<double>(target.data[i]) == mask_value) {
                        grad.data[i] = Real(0);
                        continue;
                    }
                    grad.data[i] = static_cast<Real>(
                        scale * (static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i])));
                }
                break;
            }
            case Loss::BCE: {
                const double scale = 1.0 / static_cast<double>(pred.size());
                for (std::size_t i = 0; i < pred.size(); ++i)
                    grad.data[i] = static_cast<Real>(
                        scale * (static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i])));
                break;
            }
            case Loss::CCE: {
                const double rows = pred.rank() >= 2 ? static_cast<double>(pred.shape[0]) : 1.0;
                for (std::size_t i = 0; i < pred.size(); ++i)
                    grad.data[i] = static_cast<Real>(
                        (static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i])) / rows);
                break;
            }
        }
        for (std::size_t li = layers_.size(); li-- > 0;) grad = layers_[li]->backward(grad);
        return sample_loss;
    }

    void zero_grads() {
        for (auto& layer : layers_) layer->zero_grads();
    }

    const Tensor<Real>& last_prediction() const { return last_pred_; }

private:
    void apply_output_transform(Tensor<Real>& out) const {
        switch (loss) {
            case Loss::MSE: return;
            case Loss::BCE:
                for (auto& v : out.data) v = activate(Activation::Sigmoid, v);
                return;
            case Loss::CCE: {
                // softmax over the last dimension, per row
                const std::size_t cols = out.rank() >= 2 ? out.shape.back() : out.size();
                const std::size_t rows = out.size() / cols;
                for (std::size_t r = 0; r < rows; ++r) {
                    Real* z = out.data.data() + r * cols;
                    Real m = z[0];
                    for (std::size_t c = 1; c < cols; ++c) m = std::max(m, z[c]);
                    double sum = 0.0;
                    for (std::size_t c = 0; c < cols; ++c) {
                        z[c] = std::exp(z[c] - m);
                        sum += static_cast<double>(z[c]);
                    }
                    for (std::size_t c = 0; c < cols; ++c)
                        z[c] = static_cast<Real>(static_cast<double>(z[c]) / sum);
                }
                return;
            }
        }
    }

    std::vector<std::unique_ptr<Layer<Real>>> layers_;
    Tensor<Real> last_pred_;
};

// Builds a layer from its serialized kind + hyperparameters.
template <class Real>
std::unique_ptr<Layer<Real>> make_layer(const std::string& kind, const std::vector<double>& hyper) {
    auto u = [&](std::size_t i) { return static_cast<std::size_t>(hyper.at(i)); };
    if (kind == "dense")
        return std::make_unique<DenseLayer<Real>>(u(0), u(1), static_cast<Activation>(u(2)));
    if (kind == "conv2d")
        return std::make_unique<Conv2DLayer<Real>>(u(0), u(1), u(2), u(3),
                                                   static_cast<Activation>(u(4)));
    if (kind == "maxpool2d") return std::make_unique<MaxPool2DLayer<Real>>();
    if (kind == "dropout") return std::make_unique<DropoutLayer<Real>>(hyper.at(0));
    if (kind == "flatten") return std::make_unique<FlattenLayer<Real>>();
    if (kind == "lstm") return std::make_unique<LstmLayer<Real>>(u(0), u(1), hyper.at(2) != 0.0);
    throw Error("unknown layer kind: " + kind);
}

} // namespace ptk::nn
