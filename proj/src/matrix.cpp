#include "linlaw/matrix.hpp"

#include <cmath>

namespace linlaw {

double frobenius_norm(const Matrix& m) {
    double sum = 0.0;
    for (double x : m.data()) sum += x * x;
    return std::sqrt(sum);
}

double frobenius_norm(const SymmetricMatrix& m) {
    return frobenius_norm(m.dense());
}

double trace(const SymmetricMatrix& m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.order(); ++i) sum += m(i, i);
    return sum;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        fail(ErrorCode::DimensionMismatch,
             "cannot multiply " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                 " by " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

double norm2(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        fail(ErrorCode::DimensionMismatch, "dot product of vectors with different lengths");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

std::vector<double> multiply(const SymmetricMatrix& s, const std::vector<double>& v) {
    if (s.order() != v.size())
        fail(ErrorCode::DimensionMismatch, "matrix-vector size mismatch");
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t i = 0; i < s.order(); ++i)
        for (std::size_t j = 0; j < s.order(); ++j) out[i] += s(i, j) * v[j];
    return out;
}

} // namespace linlaw
