#include "embadapt/classifiers.hpp"

#include "embadapt/adam.hpp"
#include "embadapt/contrastive.hpp"
#include "embadapt/errors.hpp"
#include "embadapt/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace embadapt {

std::string_view to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::logistic_regression: return "logreg";
        case ClassifierKind::cart: return "cart";
        case ClassifierKind::random_forest: return "rf";
        case ClassifierKind::linear_svm: return "linsvm";
        case ClassifierKind::mlp: return "mlp";
    }
    return "unknown";
}

ClassifierKind parse_classifier_kind(std::string_view text) {
    if (text == "logreg" || text == "logistic_regression") return ClassifierKind::logistic_regression;
    if (text == "cart") return ClassifierKind::cart;
    if (text == "rf" || text == "random_forest") return ClassifierKind::random_forest;
    if (text == "linsvm" || text == "linear_svm") return ClassifierKind::linear_svm;
    if (text == "mlp") return ClassifierKind::mlp;
    throw std::invalid_argument("unknown classifier '" + std::string(text) + "'");
}

const std::vector<ClassifierKind>& all_classifier_kinds() {
    static const std::vector<ClassifierKind> kinds{ClassifierKind::logistic_regression, ClassifierKind::cart,
                                                   ClassifierKind::random_forest, ClassifierKind::linear_svm, ClassifierKind::mlp};
    return kinds;
}

void Standardizer::fit(const Matrix& x) {
    mean = x.colwise().mean().transpose();
    scale.resize(x.cols());
    const double denom = static_cast<double>(std::max<Eigen::Index>(x.rows(), 1));
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
        const double var = (x.col(k).array() - mean(k)).square().sum() / denom;
        scale(k) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
}

Matrix Standardizer::transform(const Matrix& x) const {
    return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

void Classifier::fit(const Matrix& x, std::span<const int> y) {
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw ShapeError("fit: rows and labels differ in length");
    if (x.cols() < 1) throw ShapeError("fit: no features");
    const auto pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    if (pos == 0 || pos == y.size()) throw DataError("fit: labels contain a single class");
    input_dim_ = static_cast<std::size_t>(x.cols());
    do_fit(x, y);
}

Vector Classifier::predict_score(const Matrix& x) const {
    if (input_dim_ == 0) throw std::logic_error("predict: classifier is not fitted");
    if (static_cast<std::size_t>(x.cols()) != input_dim_) {
        throw ShapeError("predict: input has " + std::to_string(x.cols()) + " columns, expected " + std::to_string(input_dim_));
    }
    return do_score(x);
}

std::vector<int> Classifier::predict(const Matrix& x) const {
    const Vector s = predict_score(x);
    std::vector<int> out(static_cast<std::size_t>(s.size()));
    for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s(i) > threshold() ? 1 : 0;
    return out;
}

namespace {

Vector labels_as_vector(std::span<const int> y) {
    Vector v(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) v(static_cast<Eigen::Index>(i)) = y[i];
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Logistic regression

void LogisticRegression::do_fit(const Matrix& x, std::span<const int> y) {
    scaler_.fit(x);
    const Matrix z = scaler_.transform(x);
    const Vector target = labels_as_vector(y);
    const double n = static_cast<double>(z.rows());
    w_ = Vector::Zero(z.cols());
    b_ = 0.0;
    for (std::size_t epoch = 0; epoch < options_.epochs; ++epoch) {
        Vector p = (z * w_).array() + b_;
        for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = sigmoid(p(i));
        const Vector residual = p - target;
        const Vector grad_w = z.transpose() * residual / n + options_.l2 * w_;
        const double grad_b = residual.sum() / n;
        w_ -= options_.learning_rate * grad_w;
        b_ -= options_.learning_rate * grad_b;
    }
    if (!w_.allFinite() || !std::isfinite(b_)) throw DivergenceError("logistic regression diverged");
}

Vector LogisticRegression::do_score(const Matrix& x) const {
    Vector s = (scaler_.transform(x) * w_).array() + b_;
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = sigmoid(s(i));
    return s;
}

// ---------------------------------------------------------------------------
// CART

namespace {

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const int> y, const TreeOptions& options, std::uint64_t seed,
                std::vector<DecisionTree::Node>& nodes)
        : x_(x), y_(y), options_(options), rng_(seed), nodes_(nodes) {
        const auto d = static_cast<std::size_t>(x.cols());
        features_.resize(d);
        std::iota(features_.begin(), features_.end(), std::size_t{0});
        sample_features_ = options.max_features != 0 && options.max_features < d;
    }

    std::uint32_t build(std::vector<std::size_t>& rows, std::size_t depth) {
        const auto index = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        std::size_t pos = 0;
        for (std::size_t r : rows) pos += static_cast<std::size_t>(y_[r]);
        const std::size_t m = rows.size();
        nodes_[index].positive_fraction = static_cast<double>(pos) / static_cast<double>(m);

        const std::size_t min_leaf = std::max<std::size_t>(options_.min_samples_leaf, 1);
        if (pos == 0 || pos == m || depth >= options_.max_depth || m < 2 * min_leaf) return index;

        const Split split = best_split(rows, min_leaf);
        if (split.feature < 0) return index;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        left.reserve(split.left_count);
        right.reserve(m - split.left_count);
        for (std::size_t r : rows) {
            (x_(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const std::uint32_t l = build(left, depth + 1);
        const std::uint32_t r = build(right, depth + 1);
        nodes_[index].feature = split.feature;
        nodes_[index].threshold = split.threshold;
        nodes_[index].left = l;
        nodes_[index].right = r;
        return index;
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double score = std::numeric_limits<double>::infinity();
        std::size_t left_count = 0;
    };

    std::span<const std::size_t> candidate_features() {
        if (!sample_features_) return features_;
        // Partial Fisher-Yates draw, then ascending order so ties favour low indices.
        for (std::size_t i = 0; i < options_.max_features; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, features_.size() - 1);
            std::swap(features_[i], features_[pick(rng_)]);
        }
        sampled_.assign(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(options_.max_features));
        std::sort(sampled_.begin(), sampled_.end());
        return sampled_;
    }

    Split best_split(const std::vector<std::size_t>& rows, std::size_t min_leaf) {
        Split best;
        const std::size_t m = rows.size();
        std::size_t total_pos = 0;
        for (std::size_t r : rows) total_pos += static_cast<std::size_t>(y_[r]);

        for (std::size_t f : candidate_features()) {
            values_.clear();
            for (std::size_t r : rows) values_.emplace_back(x_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)), y_[r]);
            std::sort(values_.begin(), values_.end());
            std::size_t left_pos = 0;
            for (std::size_t i = 0; i + 1 < m; ++i) {
                left_pos += static_cast<std::size_t>(values_[i].second);
                if (values_[i].first == values_[i + 1].first) continue;
                const std::size_t nl = i + 1;
                const std::size_t nr = m - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                const std::size_t right_pos = total_pos - left_pos;
                // Size-weighted Gini impurity of the children, up to a factor 2.
                const double score = static_cast<double>(left_pos) * static_cast<double>(nl - left_pos) / static_cast<double>(nl) +
                                     static_cast<double>(right_pos) * static_cast<double>(nr - right_pos) / static_cast<double>(nr);
                if (score < best.score) {
                    const double a = values_[i].first;
                    const double b = values_[i + 1].first;
                    double t = a + 0.5 * (b - a);
                    if (!(t < b)) t = a;
                    best = Split{static_cast<int>(f), t, score, nl};
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    std::span<const int> y_;
    TreeOptions options_;
    Rng rng_;
    std::vector<DecisionTree::Node>& nodes_;
    std::vector<std::size_t> features_;
    std::vector<std::size_t> sampled_;
    bool sample_features_ = false;
    std::vector<std::pair<double, int>> values_;
};

}  // namespace

void DecisionTree::fit_rows(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows) {
    if (rows.empty()) throw DataError("tree: no training rows");
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw ShapeError("fit: rows and labels differ in length");
    nodes_.clear();
    set_input_dim(static_cast<std::size_t>(x.cols()));
    std::vector<std::size_t> root(rows.begin(), rows.end());
    TreeBuilder builder(x, y, options_, seed_, nodes_);
    builder.build(root, 0);
}

void DecisionTree::do_fit(const Matrix& x, std::span<const int> y) {
    std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    fit_rows(x, y, rows);
}

Vector DecisionTree::do_score(const Matrix& x) const {
    Vector s(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        std::uint32_t node = 0;
        while (nodes_[node].feature >= 0) {
            const auto& n = nodes_[node];
            node = x(i, n.feature) <= n.threshold ? n.left : n.right;
        }
        s(i) = nodes_[node].positive_fraction;
    }
    return s;
}

std::size_t DecisionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::size_t deepest = 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [node, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        if (nodes_[node].feature >= 0) {
            stack.emplace_back(nodes_[node].left, d + 1);
            stack.emplace_back(nodes_[node].right, d + 1);
        }
    }
    return deepest;
}

// ---------------------------------------------------------------------------
// Random forest

void RandomForest::do_fit(const Matrix& x, std::span<const int> y) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto d = static_cast<std::size_t>(x.cols());
    TreeOptions tree_options = options_.tree;
    if (tree_options.max_features == 0) {
        tree_options.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
    }
    trees_.clear();
    trees_.reserve(options_.n_trees);
    std::vector<std::size_t> rows(n);
    for (std::size_t t = 0; t < options_.n_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(seed_, {seed_tag::tree, t});
        if (options_.bootstrap) {
            Rng rng(derive_seed(tree_seed, {0}));
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (auto& r : rows) r = pick(rng);
            std::sort(rows.begin(), rows.end());
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        DecisionTree tree(tree_options, tree_seed);
        tree.fit_rows(x, y, rows);
        trees_.push_back(std::move(tree));
    }
}

Vector RandomForest::do_score(const Matrix& x) const {
    Vector s = Vector::Zero(x.rows());
    for (const auto& tree : trees_) s += tree.predict_score(x);
    return s / static_cast<double>(trees_.size());
}

// ---------------------------------------------------------------------------
// Linear SVM

void LinearSvm::do_fit(const Matrix& x, std::span<const int> y) {
    scaler_.fit(x);
    const Matrix z = scaler_.transform(x);
    const auto n = static_cast<std::size_t>(z.rows());
    const Eigen::Index d = z.cols();
    const double lambda = 1.0 / (options_.c * static_cast<double>(n));
    const double radius = 1.0 / std::sqrt(lambda);

    Vector w = Vector::Zero(d + 1);  // last entry multiplies the constant feature
    Vector average = Vector::Zero(d + 1);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed_);
    std::uint64_t t = 0;
    for (std::size_t epoch = 0; epoch < options_.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        const bool last = epoch + 1 == options_.epochs;
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const auto row = z.row(static_cast<Eigen::Index>(i));
            const double sign = y[i] == 1 ? 1.0 : -1.0;
            const double margin = sign * (row.dot(w.head(d)) + w(d));
            w *= 1.0 - eta * lambda;
            if (margin < 1.0) {
                w.head(d) += (eta * sign) * row.transpose();
                w(d) += eta * sign;
            }
            const double norm = w.norm();
            if (norm > radius) w *= radius / norm;
            if (last) average += w;
        }
    }
    average /= static_cast<double>(n);
    if (!average.allFinite()) throw DivergenceError("linear SVM diverged");
    w_ = average.head(d);
    b_ = average(d);
}

Vector LinearSvm::do_score(const Matrix& x) const {
    return (scaler_.transform(x) * w_).array() + b_;
}

// ---------------------------------------------------------------------------
// MLP

MlpClassifier::MlpClassifier(MlpOptions options, std::uint64_t seed) : options_(options), seed_(seed), net_({1, 1}) {}

void MlpClassifier::do_fit(const Matrix& x, std::span<const int> y) {
    scaler_.fit(x);
    const Matrix z = scaler_.transform(x);
    const auto n = static_cast<std::size_t>(z.rows());
    net_ = DenseNet::glorot_uniform({static_cast<std::size_t>(z.cols()), options_.hidden, 1}, derive_seed(seed_, {0}));
    AdamState optimizer(net_);
    const std::size_t batch = std::clamp<std::size_t>(options_.batch_size, 1, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed_, {1}));
    ForwardCache cache;
    double best = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;
    epochs_run_ = 0;
    for (std::size_t epoch = 0; epoch < options_.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(n, start + batch);
            const std::span<const std::size_t> rows(order.data() + start, stop - start);
            const auto b = static_cast<double>(rows.size());
            const Matrix xb = gather_rows(z, rows);
            const Matrix logits = net_.forward(xb, cache);
            Matrix grad(logits.rows(), 1);
            double loss = 0.0;
            for (Eigen::Index i = 0; i < logits.rows(); ++i) {
                const double s = logits(i, 0);
                const int label = y[rows[static_cast<std::size_t>(i)]];
                loss += softplus(s) - (label == 1 ? s : 0.0);
                grad(i, 0) = (sigmoid(s) - label) / b;
            }
            double penalty = 0.0;
            for (const auto& layer : net_.layers()) penalty += layer.weight.squaredNorm();
            loss = loss / b + 0.5 * options_.l2 * penalty / b;

            ParamGradients grads = net_.backward(cache, grad);
            for (std::size_t l = 0; l < grads.weight.size(); ++l) grads.weight[l] += (options_.l2 / b) * net_.layers()[l].weight;
            optimizer.step(net_, grads, options_.learning_rate);
            epoch_loss += loss * b;
        }
        epoch_loss /= static_cast<double>(n);
        ++epochs_run_;
        if (!std::isfinite(epoch_loss)) throw DivergenceError("MLP diverged");
        if (epoch_loss > best - options_.tol) {
            if (++stale >= options_.n_iter_no_change) break;
        } else {
            stale = 0;
        }
        best = std::min(best, epoch_loss);
    }
}

Vector MlpClassifier::do_score(const Matrix& x) const {
    const Matrix logits = net_.forward(scaler_.transform(x));
    Vector s(logits.rows());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) s(i) = sigmoid(logits(i, 0));
    return s;
}

std::unique_ptr<Classifier> make_classifier(ClassifierKind kind, std::uint64_t seed) {
    switch (kind) {
        case ClassifierKind::logistic_regression: return std::make_unique<LogisticRegression>();
        case ClassifierKind::cart: return std::make_unique<DecisionTree>(TreeOptions{}, seed);
        case ClassifierKind::random_forest: return std::make_unique<RandomForest>(RandomForestOptions{}, seed);
        case ClassifierKind::linear_svm: return std::make_unique<LinearSvm>(LinearSvmOptions{}, seed);
        case ClassifierKind::mlp: return std::make_unique<MlpClassifier>(MlpOptions{}, seed);
    }
    throw std::invalid_argument("make_classifier: unknown kind");
}

}  // namespace embadapt
