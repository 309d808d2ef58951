#pragma once

#include "embadapt/dense_net.hpp"
#include "embadapt/matrix.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace embadapt {

enum class ClassifierKind { logistic_regression, cart, random_forest, linear_svm, mlp };

std::string_view to_string(ClassifierKind kind);
/// Accepts the names printed by to_string ("logreg", "cart", "rf", "linsvm", "mlp")
/// and the long enum spellings.
ClassifierKind parse_classifier_kind(std::string_view text);
const std::vector<ClassifierKind>& all_classifier_kinds();

/// Column-wise z-scoring fitted on training data; zero-variance columns are
/// only centered.
struct Standardizer {
    Vector mean;
    Vector scale;

    void fit(const Matrix& x);
    Matrix transform(const Matrix& x) const;
};

/// Binary classifier with fixed (never tuned) hyperparameters.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual ClassifierKind kind() const = 0;

    /// Throws DataError unless both classes occur, ShapeError on length mismatch.
    void fit(const Matrix& x, std::span<const int> y);

    /// One real score per row, increasing with confidence in class 1.
    /// Probabilities for logistic regression, trees, forests and the MLP;
    /// the signed margin for the linear SVM.
    Vector predict_score(const Matrix& x) const;

    /// Hard labels: score > 0.5 (score > 0 for the SVM).
    std::vector<int> predict(const Matrix& x) const;

    std::size_t input_dim() const noexcept { return input_dim_; }

protected:
    virtual void do_fit(const Matrix& x, std::span<const int> y) = 0;
    virtual Vector do_score(const Matrix& x) const = 0;
    virtual double threshold() const { return 0.5; }
    void set_input_dim(std::size_t d) noexcept { input_dim_ = d; }

private:
    std::size_t input_dim_ = 0;
};

/// Full-batch gradient descent on mean log loss + (l2 / 2) |w|^2, standardized inputs.
struct LogisticRegressionOptions {
    std::size_t epochs = 500;
    double learning_rate = 0.1;
    double l2 = 1e-4;
};

class LogisticRegression final : public Classifier {
public:
    explicit LogisticRegression(LogisticRegressionOptions options = {}) : options_(options) {}
    ClassifierKind kind() const override { return ClassifierKind::logistic_regression; }
    const Vector& weights() const noexcept { return w_; }
    double bias() const noexcept { return b_; }

protected:
    void do_fit(const Matrix& x, std::span<const int> y) override;
    Vector do_score(const Matrix& x) const override;

private:
    LogisticRegressionOptions options_;
    Standardizer scaler_;
    Vector w_;
    double b_ = 0.0;
};

inline constexpr std::size_t kUnlimitedDepth = std::numeric_limits<std::size_t>::max();

/// Gini-impurity CART. Ties between splits resolve to the lowest feature
/// index and then the lowest threshold; zero-gain splits of impure nodes are
/// taken. max_features = 0 means every feature is considered at every node.
struct TreeOptions {
    std::size_t max_depth = 10;
    std::size_t min_samples_leaf = 2;
    std::size_t max_features = 0;
};

class DecisionTree final : public Classifier {
public:
    explicit DecisionTree(TreeOptions options = {}, std::uint64_t seed = 0) : options_(options), seed_(seed) {}
    ClassifierKind kind() const override { return ClassifierKind::cart; }

    /// Fit on a multiset of rows (bootstrap); `rows` may repeat indices.
    void fit_rows(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows);

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t depth() const;

    struct Node {
        int feature = -1;        // -1 for leaves
        double threshold = 0.0;  // go left when x[feature] <= threshold
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        double positive_fraction = 0.0;
    };
    const std::vector<Node>& nodes() const noexcept { return nodes_; }

protected:
    void do_fit(const Matrix& x, std::span<const int> y) override;
    Vector do_score(const Matrix& x) const override;

private:
    TreeOptions options_;
    std::uint64_t seed_;
    std::vector<Node> nodes_;
};

/// Bagged CART ensemble; score is the mean of per-tree leaf fractions.
struct RandomForestOptions {
    std::size_t n_trees = 100;
    bool bootstrap = true;
    /// max_features = 0 here means floor(sqrt(d)).
    TreeOptions tree{kUnlimitedDepth, 1, 0};
};

class RandomForest final : public Classifier {
public:
    explicit RandomForest(RandomForestOptions options = {}, std::uint64_t seed = 0) : options_(options), seed_(seed) {}
    ClassifierKind kind() const override { return ClassifierKind::random_forest; }
    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

protected:
    void do_fit(const Matrix& x, std::span<const int> y) override;
    Vector do_score(const Matrix& x) const override;

private:
    RandomForestOptions options_;
    std::uint64_t seed_;
    std::vector<DecisionTree> trees_;
};

/// Pegasos subgradient solver for the hinge-loss linear SVM on standardized
/// inputs, with the bias folded in as a constant feature. Regularization
/// lambda = 1 / (C n). The returned weights average the final epoch's iterates.
struct LinearSvmOptions {
    double c = 1.0;
    std::size_t epochs = 50;
};

class LinearSvm final : public Classifier {
public:
    explicit LinearSvm(LinearSvmOptions options = {}, std::uint64_t seed = 0) : options_(options), seed_(seed) {}
    ClassifierKind kind() const override { return ClassifierKind::linear_svm; }

protected:
    void do_fit(const Matrix& x, std::span<const int> y) override;
    Vector do_score(const Matrix& x) const override;
    double threshold() const override { return 0.0; }

private:
    LinearSvmOptions options_;
    std::uint64_t seed_;
    Standardizer scaler_;
    Vector w_;
    double b_ = 0.0;
};

/// One ReLU hidden layer, sigmoid output, minibatch Adam on log loss with
/// L2 penalty. Stops early once the epoch loss fails to improve by `tol` for
/// `n_iter_no_change` consecutive epochs.
struct MlpOptions {
    std::size_t hidden = 100;
    std::size_t max_epochs = 200;
    double learning_rate = 1e-3;
    std::size_t batch_size = 200;
    double l2 = 1e-4;
    double tol = 1e-4;
    std::size_t n_iter_no_change = 10;
};

class MlpClassifier final : public Classifier {
public:
    explicit MlpClassifier(MlpOptions options = {}, std::uint64_t seed = 0);
    ClassifierKind kind() const override { return ClassifierKind::mlp; }
    std::size_t epochs_run() const noexcept { return epochs_run_; }

protected:
    void do_fit(const Matrix& x, std::span<const int> y) override;
    Vector do_score(const Matrix& x) const override;

private:
    MlpOptions options_;
    std::uint64_t seed_;
    Standardizer scaler_;
    DenseNet net_;
    std::size_t epochs_run_ = 0;
};

/// Classifier of the given kind with its default options.
std::unique_ptr<Classifier> make_classifier(ClassifierKind kind, std::uint64_t seed);

}  // namespace embadapt
