#pragma once

#include <span>

namespace embadapt {

/// Counts with label 1 as the positive class.
struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

Confusion confusion(std::span<const int> y_true, std::span<const int> y_pred);

/// 2TP / (2TP + FP + FN); 0 when the denominator is 0.
double f1_score(std::span<const int> y_true, std::span<const int> y_pred);

double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

/// Area under the ROC curve as the Mann-Whitney statistic with average ranks
/// for tied scores. Throws std::invalid_argument unless both classes occur.
double roc_auc(std::span<const int> y_true, std::span<const double> scores);

}  // namespace embadapt
