#pragma once

#include <cstddef>
#include <vector>

#include "tidp/errors.hpp"

namespace tidp {

/// Row-major dense matrix of 64-bit reals.
struct Dense2D {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Dense2D() = default;
    Dense2D(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    static Dense2D zeros(int r, int c) { return Dense2D(r, c); }

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }

    bool same_shape(const Dense2D& other) const {
        return rows == other.rows && cols == other.cols;
    }
};

inline void require_shape(const Dense2D& m, int rows, int cols, const char* what) {
    if (m.rows != rows || m.cols != cols) {
        throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                             std::to_string(cols) + ", got " + std::to_string(m.rows) + "x" +
                             std::to_string(m.cols));
    }
}

Dense2D matmul(const Dense2D& a, const Dense2D& b);
Dense2D transpose(const Dense2D& a);

}  // namespace tidp
