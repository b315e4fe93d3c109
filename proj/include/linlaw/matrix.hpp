#pragma once

#include <cstddef>
#include <vector>

#include "linlaw/error.hpp"

namespace linlaw {

/// Dense row-major matrix of doubles. All matrices in this library are
/// small (order <= a few dozen), so no attempt is made at sparsity or
/// blocking.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Symmetric matrix with exact mirror storage: set(i, j, v) writes both
/// triangles, so S(a, b) == S(b, a) holds bit-for-bit by construction.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t order) : dense_(order, order) {}

    std::size_t order() const noexcept { return dense_.rows(); }

    double operator()(std::size_t i, std::size_t j) const { return dense_(i, j); }

    void set(std::size_t i, std::size_t j, double value) {
        dense_(i, j) = value;
        dense_(j, i) = value;
    }

    const Matrix& dense() const noexcept { return dense_; }

    /// Wraps an existing square matrix, rejecting anything that is not
    /// exactly symmetric.
    static SymmetricMatrix from_dense(Matrix m) {
        if (m.rows() != m.cols())
            fail(ErrorCode::DimensionMismatch, "symmetric matrix must be square");
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = i + 1; j < m.cols(); ++j)
                if (m(i, j) != m(j, i))
                    fail(ErrorCode::DimensionMismatch, "matrix is not exactly symmetric");
        SymmetricMatrix s;
        s.dense_ = std::move(m);
        return s;
    }

    bool operator==(const SymmetricMatrix& other) const = default;

private:
    Matrix dense_;
};

double frobenius_norm(const Matrix& m);
double frobenius_norm(const SymmetricMatrix& m);
double trace(const SymmetricMatrix& m);

/// Plain dense product A * B.
Matrix multiply(const Matrix& a, const Matrix& b);

double norm2(const std::vector<double>& v);
double dot(const std::vector<double>& a, const std::vector<double>& b);

/// S * v for a symmetric S.
std::vector<double> multiply(const SymmetricMatrix& s, const std::vector<double>& v);

} // namespace linlaw
