#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace embadapt {

/// k disjoint test sets covering [0, n); each index list is sorted ascending.
struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::vector<std::size_t>> test;

    /// Complement of test[fold], sorted ascending.
    std::vector<std::size_t> train(std::size_t fold) const;
    std::size_t sample_count() const;
};

/// Stratified k-fold split. Each class is shuffled with a seeded generator and
/// dealt round-robin across folds, continuing the rotation from class to class
/// so fold sizes also differ by at most one. Every fold receives floor or ceil
/// of (class size / k) members of each class.
///
/// Throws std::invalid_argument when k < 2 or a class has fewer than k members.
FoldPlan stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed);

}  // namespace embadapt
