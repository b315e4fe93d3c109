#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "linlaw/matrix.hpp"

namespace linlaw {

/// One scalar channel of one instance: ordered, finite samples.
/// Finiteness is enforced where series enter the system (the parsers);
/// the numeric kernel treats the values as given.
struct TimeSeries {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
};

/// Time-delay embedding parameters: window length `dim` (the order of the
/// Gram matrix) and row stride `lag` (rows start at samples 0, lag, 2*lag,
/// ... and each spans `dim` consecutive samples).
struct EmbeddingConfig {
    std::size_t dim = 2;
    std::size_t lag = 1;
};

/// Throws InvalidConfig unless 2 <= dim and 1 <= lag <= dim.
void validate(const EmbeddingConfig& config);

/// Number of embedding rows for a series of length k: (k - dim) / lag + 1.
std::size_t embedding_rows(std::size_t series_length, const EmbeddingConfig& config);

/// Builds the r x dim window matrix A with A(i, j) = z[i*lag + j].
/// Throws SeriesTooShort when the series is shorter than dim.
Matrix embed_matrix(const TimeSeries& series, const EmbeddingConfig& config);

/// S = A^T A, computed on the upper triangle and mirrored exactly.
SymmetricMatrix gram_matrix(const TimeSeries& series, const EmbeddingConfig& config);

struct SmallestEigenpair {
    double eigenvalue = 0.0;
    std::vector<double> vector;
    /// True when the smallest eigenvalue is (numerically) repeated:
    /// |lambda_1 - lambda_2| <= 1e-10 * max(1, ||S||_F).
    bool repeated_minimum = false;
};

/// Minimum eigenpair of a symmetric matrix via cyclic Jacobi sweeps.
/// The eigenvector is unit-norm and sign-normalized (largest-|component|
/// positive, ties to the lowest index). Deterministic for identical input.
/// Throws NumericalFailure if 100 sweeps do not reach an off-diagonal
/// Frobenius norm of 1e-13 * ||S||_F, or if the residual ||Sv - lambda*v||
/// exceeds 1e-9 * max(1, ||S||_F).
SmallestEigenpair smallest_eigpair(const SymmetricMatrix& s);

/// Flips `v` so its largest-magnitude component (lowest index on ties) is
/// positive. No-op for the zero vector.
void apply_sign_convention(std::vector<double>& v);

struct LawProvenance {
    std::string instance_id;
    std::string feature_id;
    std::string class_label;
};

/// A unit eigenvector of the smallest eigenvalue of one series' Gram
/// matrix, with the provenance needed to group it in a law bank.
struct LinearLaw {
    std::vector<double> coefficients;
    double eigenvalue = 0.0;
    /// Set when the minimum eigenvalue is repeated or the embedding had
    /// fewer rows than columns (rank-deficient by construction).
    bool degenerate = false;
    std::string instance_id;
    std::string feature_id;
    std::string class_label;
};

LinearLaw linear_law(const TimeSeries& series, const EmbeddingConfig& config,
                     const LawProvenance& provenance);

} // namespace linlaw
