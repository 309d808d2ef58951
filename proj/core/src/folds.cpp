#include "embadapt/folds.hpp"

#include "embadapt/seeding.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace embadapt {

std::vector<std::size_t> FoldPlan::train(std::size_t fold) const {
    const auto& held_out = test.at(fold);
    std::vector<std::size_t> out;
    out.reserve(sample_count() - held_out.size());
    std::size_t t = 0;
    for (std::size_t i = 0; i < sample_count(); ++i) {
        if (t < held_out.size() && held_out[t] == i) {
            ++t;
            continue;
        }
        out.push_back(i);
    }
    return out;
}

std::size_t FoldPlan::sample_count() const {
    std::size_t n = 0;
    for (const auto& t : test) n += t.size();
    return n;
}

FoldPlan stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_kfold: k must be at least 2");
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw std::invalid_argument("stratified_kfold: label outside {0,1}");
        by_class[labels[i]].push_back(i);
    }
    for (const auto& members : by_class) {
        if (members.size() < k) {
            throw std::invalid_argument("stratified_kfold: a class has " + std::to_string(members.size()) + " members, fewer than k=" +
                                        std::to_string(k));
        }
    }

    Rng rng(derive_seed(seed, {seed_tag::folds}));
    FoldPlan plan;
    plan.k = k;
    plan.test.resize(k);
    std::size_t next_fold = 0;
    for (auto& members : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t idx : members) {
            plan.test[next_fold].push_back(idx);
            next_fold = (next_fold + 1) % k;
        }
    }
    for (auto& t : plan.test) std::sort(t.begin(), t.end());
    return plan;
}

}  // namespace embadapt
