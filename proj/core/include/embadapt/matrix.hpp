#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace embadapt {

/// Dense row-major matrix; one sample per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// A single modality's embeddings (n rows, d_j columns).
using EmbeddingMatrix = Matrix;

/// Binary labels, each 0 or 1.
using Labels = std::vector<int>;

/// Copies the listed rows of `m`, in the order given.
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows);

Labels gather_labels(std::span<const int> labels, std::span<const std::size_t> rows);

bool all_finite(const Matrix& m);

/// Same shape and identical bit patterns (so NaN == NaN, -0 != +0).
bool bitwise_equal(const Matrix& a, const Matrix& b);
bool bitwise_equal(const Vector& a, const Vector& b);

}  // namespace embadapt
