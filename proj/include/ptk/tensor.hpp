#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ptk/errors.hpp"

namespace ptk {

// Dense n-dimensional array, row-major.
template <class Real>
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<Real> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> dims, Real fill = Real(0))
        : shape(std::move(dims)), data(count(shape), fill) {}
    Tensor(std::vector<std::size_t> dims, std::vector<Real> values)
        : shape(std::move(dims)), data(std::move(values)) {
        if (data.size() != count(shape)) throw ShapeMismatch("tensor data does not match shape");
    }

    static std::size_t count(const std::vector<std::size_t>& dims) {
        std::size_t n = 1;
        for (const std::size_t d : dims) n *= d;
        return dims.empty() ? 1 : n;
    }

    std::size_t size() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }

    Real& operator[](std::size_t i) { return data[i]; }
    const Real& operator[](std::size_t i) const { return data[i]; }

    // [C,H,W] indexing
    Real& at3(std::size_t c, std::size_t y, std::size_t x) {
        return data[(c * shape[1] + y) * shape[2] + x];
    }
    const Real& at3(std::size_t c, std::size_t y, std::size_t x) const {
        return data[(c * shape[1] + y) * shape[2] + x];
    }

    // [T,F] indexing
    Real& at2(std::size_t t, std::size_t f) { return data[t * shape[1] + f]; }
    const Real& at2(std::size_t t, std::size_t f) const { return data[t * shape[1] + f]; }

    Tensor reshaped(std::vector<std::size_t> dims) const {
        if (count(dims) != data.size()) throw ShapeMismatch("reshape changes element count");
        Tensor out = *this;
        out.shape = std::move(dims);
        return out;
    }

    template <class Other>
    Tensor<Other> cast() const {
        Tensor<Other> out;
        out.shape = shape;
        out.data.resize(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<Other>(data[i]);
        return out;
    }

    std::string shape_string() const {
        std::string s = "[";
        for (std::size_t i = 0; i < shape.size(); ++i)
            s += (i ? "," : "") + std::to_string(shape[i]);
        return s + "]";
    }
};

} // namespace ptk
