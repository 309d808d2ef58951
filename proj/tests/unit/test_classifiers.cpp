#include "embadapt/classifiers.hpp"
#include "embadapt/errors.hpp"
#include "embadapt/metrics.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

namespace embadapt {
namespace {

struct Blobs {
    Matrix x;
    std::vector<int> y;
};

Blobs blobs(std::size_t n, double gap, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Blobs b{oracle::random_matrix(static_cast<Eigen::Index>(n), 4, rng), std::vector<int>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        b.y[i] = static_cast<int>(i % 2);
        b.x.row(static_cast<Eigen::Index>(i)).array() += b.y[i] ? gap : -gap;
    }
    return b;
}

// Label is the sign agreement of the first two coordinates.
Blobs xor_cloud(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Blobs b{oracle::random_matrix(static_cast<Eigen::Index>(n), 3, rng), std::vector<int>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        b.y[i] = (b.x(r, 0) > 0) == (b.x(r, 1) > 0) ? 1 : 0;
    }
    return b;
}

TEST(ClassifierNames, RoundTrip) {
    for (auto kind : all_classifier_kinds()) EXPECT_EQ(parse_classifier_kind(to_string(kind)), kind);
    EXPECT_EQ(parse_classifier_kind("random_forest"), ClassifierKind::random_forest);
    EXPECT_THROW(parse_classifier_kind("xgboost"), std::invalid_argument);
    EXPECT_EQ(all_classifier_kinds().size(), 5u);
}

TEST(LogisticRegression, SeparableLine) {
    Matrix x(4, 1);
    x << -1, -1, 1, 1;
    const std::vector<int> y{0, 0, 1, 1};
    LogisticRegression lr;
    lr.fit(x, y);
    EXPECT_EQ(f1_score(y, lr.predict(x)), 1.0);
    EXPECT_GT(lr.weights()(0), 0.0);
}

TEST(DecisionTree, XorFourPointsAtDepthTwo) {
    Matrix x(4, 2);
    x << 0, 0, 0, 1, 1, 0, 1, 1;
    const std::vector<int> y{0, 1, 1, 0};
    DecisionTree tree(TreeOptions{2, 1, 0});
    tree.fit(x, y);
    EXPECT_EQ(accuracy(y, tree.predict(x)), 1.0);
    EXPECT_EQ(tree.depth(), 2u);
    EXPECT_EQ(tree.node_count(), 7u);
    // Lowest feature and threshold win the zero-gain root tie.
    EXPECT_EQ(tree.nodes()[0].feature, 0);
    EXPECT_EQ(tree.nodes()[0].threshold, 0.5);
}

TEST(DecisionTree, RespectsDepthAndLeafLimits) {
    const auto data = xor_cloud(300, 1);
    DecisionTree stump(TreeOptions{1, 1, 0});
    stump.fit(data.x, data.y);
    EXPECT_LE(stump.depth(), 1u);
    DecisionTree coarse(TreeOptions{kUnlimitedDepth, 40, 0});
    coarse.fit(data.x, data.y);
    const Vector s = coarse.predict_score(data.x);
    for (const auto& node : coarse.nodes()) {
        if (node.feature >= 0) continue;
        EXPECT_GE(node.positive_fraction, 0.0);
        EXPECT_LE(node.positive_fraction, 1.0);
    }
    // Every leaf holds at least 40 rows, so at most 300 / 40 leaves.
    std::size_t leaves = 0;
    for (const auto& node : coarse.nodes()) leaves += node.feature < 0;
    EXPECT_LE(leaves, 7u);
}

TEST(RandomForest, SingleFullTreeWithoutBootstrapEqualsCart) {
    const auto data = xor_cloud(200, 2);
    RandomForestOptions options;
    options.n_trees = 1;
    options.bootstrap = false;
    options.tree = TreeOptions{kUnlimitedDepth, 1, 3};
    RandomForest forest(options, 5);
    forest.fit(data.x, data.y);
    DecisionTree tree(TreeOptions{kUnlimitedDepth, 1, 0}, 5);
    tree.fit(data.x, data.y);
    const auto probe = xor_cloud(100, 3);
    EXPECT_TRUE(forest.predict_score(probe.x) == tree.predict_score(probe.x));
    EXPECT_EQ(forest.predict(probe.x), tree.predict(probe.x));
}

TEST(RandomForest, LearnsXor) {
    const auto train = xor_cloud(600, 4);
    const auto test = xor_cloud(300, 5);
    RandomForest forest({}, 1);
    forest.fit(train.x, train.y);
    EXPECT_EQ(forest.trees().size(), 100u);
    EXPECT_GT(accuracy(test.y, forest.predict(test.x)), 0.85);
}

TEST(LinearSvm, SeparatesBlobsWithSignThreshold) {
    const auto train = blobs(200, 1.5, 6);
    LinearSvm svm({}, 3);
    svm.fit(train.x, train.y);
    const Vector s = svm.predict_score(train.x);
    const auto pred = svm.predict(train.x);
    for (Eigen::Index i = 0; i < s.size(); ++i) EXPECT_EQ(pred[static_cast<std::size_t>(i)], s(i) > 0.0 ? 1 : 0);
    EXPECT_GT(accuracy(train.y, pred), 0.97);
}

TEST(Mlp, LearnsXorAndStopsEarly) {
    const auto train = xor_cloud(600, 7);
    const auto test = xor_cloud(300, 8);
    MlpClassifier mlp({}, 4);
    mlp.fit(train.x, train.y);
    EXPECT_GT(accuracy(test.y, mlp.predict(test.x)), 0.85);
    EXPECT_GE(mlp.epochs_run(), 1u);
    EXPECT_LE(mlp.epochs_run(), 200u);
}

TEST(Classifiers, AllKindsFitSeparableBlobsDeterministically) {
    const auto train = blobs(200, 1.5, 9);
    const auto test = blobs(100, 1.5, 10);
    for (auto kind : all_classifier_kinds()) {
        auto a = make_classifier(kind, 11);
        auto b = make_classifier(kind, 11);
        a->fit(train.x, train.y);
        b->fit(train.x, train.y);
        EXPECT_EQ(a->kind(), kind);
        EXPECT_EQ(a->input_dim(), 4u);
        const Vector sa = a->predict_score(test.x);
        EXPECT_TRUE(sa == b->predict_score(test.x)) << to_string(kind);
        EXPECT_GT(accuracy(test.y, a->predict(test.x)), 0.9) << to_string(kind);
        EXPECT_GT(roc_auc(test.y, std::span<const double>(sa.data(), static_cast<std::size_t>(sa.size()))), 0.95)
            << to_string(kind);
    }
}

TEST(Classifiers, Errors) {
    const auto data = blobs(20, 1.0, 12);
    for (auto kind : all_classifier_kinds()) {
        auto clf = make_classifier(kind, 0);
        EXPECT_THROW(clf->predict(data.x), std::logic_error) << to_string(kind);
        EXPECT_THROW(clf->fit(data.x, std::vector<int>(20, 1)), DataError) << to_string(kind);
        EXPECT_THROW(clf->fit(data.x, std::vector<int>(3, 1)), ShapeError) << to_string(kind);
        clf->fit(data.x, data.y);
        EXPECT_THROW(clf->predict(Matrix::Zero(2, 3)), ShapeError) << to_string(kind);
    }
}

TEST(Standardizer, ZeroVarianceColumnsAreOnlyCentered) {
    Matrix x(3, 2);
    x << 1, 5, 2, 5, 3, 5;
    Standardizer s;
    s.fit(x);
    const Matrix z = s.transform(x);
    EXPECT_NEAR(z.col(0).mean(), 0.0, 1e-15);
    EXPECT_NEAR(z.col(0).squaredNorm() / 3.0, 1.0, 1e-12);  // population variance
    EXPECT_EQ(z.col(1).cwiseAbs().maxCoeff(), 0.0);
}

}  // namespace
}  // namespace embadapt
