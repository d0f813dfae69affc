#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tsxb {

/// Dense N x d x L tensor, row-major [instance][channel][time].
struct Tensor3 {
    int n = 0;
    int d = 0;
    int l = 0;
    std::vector<double> v;

    Tensor3() = default;
    Tensor3(int n_, int d_, int l_, double fill = 0.0)
        : n(n_), d(d_), l(l_),
          v(static_cast<std::size_t>(n_) * static_cast<std::size_t>(d_) * static_cast<std::size_t>(l_),
            fill) {}

    std::size_t instance_size() const {
        return static_cast<std::size_t>(d) * static_cast<std::size_t>(l);
    }
    std::size_t size() const { return v.size(); }

    double& at(int i, int c, int t) {
        return v[(static_cast<std::size_t>(i) * d + c) * l + t];
    }
    double at(int i, int c, int t) const {
        return v[(static_cast<std::size_t>(i) * d + c) * l + t];
    }

    std::span<double> instance(int i) {
        return {v.data() + static_cast<std::size_t>(i) * instance_size(), instance_size()};
    }
    std::span<const double> instance(int i) const {
        return {v.data() + static_cast<std::size_t>(i) * instance_size(), instance_size()};
    }

    bool same_shape(const Tensor3& other) const {
        return n == other.n && d == other.d && l == other.l;
    }
};

/// Row-major rows x cols matrix of doubles (prediction outputs and the like).
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), v(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

    std::span<double> row(int r) { return {v.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
    std::span<const double> row(int r) const {
        return {v.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }
};

inline int argmax(std::span<const double> values) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i) {
        if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}

} // namespace tsxb
