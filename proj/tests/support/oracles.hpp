#pragma once

// Independent reference computations used only by tests. Nothing here may
// call into the code path it is used to check.

#include "embadapt/matrix.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace embadapt::oracle {

using Index = ::Eigen::Index;

/// Central difference (f(x+h) - f(x-h)) / 2h for every entry of `params`,
/// restoring each entry afterwards.
std::vector<double> central_differences(std::span<double> params, const std::function<double()>& f, double h = 1e-5);

/// |analytic - numeric| <= rel * max(|analytic|, |numeric|) + abs_floor.
bool gradients_match(double analytic, double numeric, double rel = 1e-4, double abs_floor = 1e-8);

struct EigenPairs {
    std::vector<double> values;               // descending
    std::vector<std::vector<double>> vectors; // vectors[c] pairs with values[c]
};

/// Cyclic Jacobi rotations on a dense symmetric matrix (row-major, d x d).
EigenPairs jacobi_eigen(std::vector<double> a, std::size_t d);

/// Sample covariance (n - 1 normalization) with naive loops.
std::vector<double> covariance(const Matrix& x);

/// P(score_pos > score_neg) + 0.5 P(tie) over every positive/negative pair.
double brute_force_auc(std::span<const int> y, std::span<const double> scores);

/// 1-nearest-neighbour labels (squared Euclidean, first index on ties).
std::vector<int> one_nn_predict(const Matrix& train, std::span<const int> train_labels, const Matrix& test);

Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng, double scale = 1.0);

}  // namespace embadapt::oracle
