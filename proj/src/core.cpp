#include "linlaw/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace linlaw {

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kSweepTolerance = 1e-13;      // vs ||S||_F
constexpr double kResidualTolerance = 1e-9;    // vs max(1, ||S||_F)
constexpr double kRepeatedEigTolerance = 1e-10; // vs max(1, ||S||_F)

double offdiag_frobenius(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) sum += a(i, j) * a(i, j);
    return std::sqrt(2.0 * sum);
}

/// One Jacobi rotation zeroing a(p, q); accumulates the rotation into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
    const double apq = a(p, q);
    if (apq == 0.0) return;

    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    double t;
    if (std::abs(theta) > 1e150) {
        t = 1.0 / (2.0 * theta); // avoid overflow in theta * theta
    } else {
        t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
    }
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    const std::size_t n = a.rows();
    const double app = a(p, p);
    const double aqq = a(q, q);
    a(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
    a(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == p || i == q) continue;
        const double aip = a(i, p);
        const double aiq = a(i, q);
        a(i, p) = c * aip - s * aiq;
        a(p, i) = a(i, p);
        a(i, q) = s * aip + c * aiq;
        a(q, i) = a(i, q);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double vip = v(i, p);
        const double viq = v(i, q);
        v(i, p) = c * vip - s * viq;
        v(i, q) = s * vip + c * viq;
    }
}

} // namespace

void validate(const EmbeddingConfig& config) {
    if (config.dim < 2)
        fail(ErrorCode::InvalidConfig, "dim must be at least 2, got " + std::to_string(config.dim));
    if (config.lag < 1 || config.lag > config.dim)
        fail(ErrorCode::InvalidConfig, "lag must be in [1, dim], got lag=" +
                                           std::to_string(config.lag) +
                                           " with dim=" + std::to_string(config.dim));
}

std::size_t embedding_rows(std::size_t series_length, const EmbeddingConfig& config) {
    return (series_length - config.dim) / config.lag + 1;
}

Matrix embed_matrix(const TimeSeries& series, const EmbeddingConfig& config) {
    validate(config);
    const std::size_t k = series.size();
    const std::size_t l = config.dim;
    if (k < l)
        fail(ErrorCode::SeriesTooShort, "series of length " + std::to_string(k) +
                                            " cannot be embedded with dim " + std::to_string(l));
    const std::size_t r = embedding_rows(k, config);
    Matrix a(r, l);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < l; ++j) a(i, j) = series.values[i * config.lag + j];
    return a;
}

SymmetricMatrix gram_matrix(const TimeSeries& series, const EmbeddingConfig& config) {
    const Matrix a = embed_matrix(series, config);
    const std::size_t l = a.cols();
    SymmetricMatrix s(l);
    for (std::size_t p = 0; p < l; ++p) {
        for (std::size_t q = p; q < l; ++q) {
            double sum = 0.0;
            for (std::size_t i = 0; i < a.rows(); ++i) sum += a(i, p) * a(i, q);
            s.set(p, q, sum);
        }
    }
    return s;
}

void apply_sign_convention(std::vector<double>& v) {
    std::size_t pivot = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]);
        if (mag > best) {
            best = mag;
            pivot = i;
        }
    }
    if (!v.empty() && v[pivot] < 0.0)
        for (double& x : v) x = -x;
}

SmallestEigenpair smallest_eigpair(const SymmetricMatrix& s) {
    const std::size_t n = s.order();
    if (n < 2) fail(ErrorCode::DimensionMismatch, "eigensolver requires order >= 2");

    Matrix a = s.dense();
    Matrix v = Matrix::identity(n);
    const double scale = frobenius_norm(s);
    const double sweep_threshold = kSweepTolerance * scale;

    bool converged = false;
    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        if (offdiag_frobenius(a) <= sweep_threshold) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    }
    if (!converged && offdiag_frobenius(a) > sweep_threshold)
        fail(ErrorCode::NumericalFailure,
             "Jacobi eigensolver did not converge within " + std::to_string(kMaxJacobiSweeps) +
                 " sweeps");

    // Sort eigenvalues ascending; index tie-break keeps the result
    // deterministic when diagonal entries coincide.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&a](std::size_t x, std::size_t y) {
        if (a(x, x) != a(y, y)) return a(x, x) < a(y, y);
        return x < y;
    });

    SmallestEigenpair result;
    result.eigenvalue = a(order[0], order[0]);
    result.vector = v.column(order[0]);
    apply_sign_convention(result.vector);
    const double gap = a(order[1], order[1]) - a(order[0], order[0]);
    result.repeated_minimum = gap <= kRepeatedEigTolerance * std::max(1.0, scale);

    std::vector<double> sv = multiply(s, result.vector);
    for (std::size_t i = 0; i < n; ++i) sv[i] -= result.eigenvalue * result.vector[i];
    if (norm2(sv) > kResidualTolerance * std::max(1.0, scale))
        fail(ErrorCode::NumericalFailure, "eigenpair residual exceeds tolerance");

    return result;
}

LinearLaw linear_law(const TimeSeries& series, const EmbeddingConfig& config,
                     const LawProvenance& provenance) {
    const SymmetricMatrix s = gram_matrix(series, config);
    const SmallestEigenpair eig = smallest_eigpair(s);

    LinearLaw law;
    law.coefficients = eig.vector;
    law.eigenvalue = eig.eigenvalue;
    law.degenerate =
        eig.repeated_minimum || embedding_rows(series.size(), config) < config.dim;
    law.instance_id = provenance.instance_id;
    law.feature_id = provenance.feature_id;
    law.class_label = provenance.class_label;
    return law;
}

} // namespace linlaw
