#pragma once

#include "embadapt/classifiers.hpp"
#include "embadapt/config.hpp"
#include "embadapt/dataset.hpp"
#include "embadapt/folds.hpp"
#include "embadapt/pipeline_io.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace embadapt {

/// One compared pipeline: raw concatenated embeddings, or a contrastive /
/// PCA projection in single or per-modality layout.
enum class Arm { unprojected, contrastive_single, contrastive_permod, pca_single, pca_permod };

std::string_view to_string(Arm arm);
Arm parse_arm(std::string_view text);
const std::vector<Arm>& all_arms();

struct FoldMetrics {
    double f1 = 0.0;
    double auc = 0.0;
    double accuracy = 0.0;
};

struct CellFailure {
    std::size_t fold = 0;
    std::string reason;
};

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;  // sample (n - 1) standard deviation
};

/// Results of one (arm, classifier) pair across all folds.
struct ReportCell {
    Arm arm = Arm::unprojected;
    ClassifierKind classifier = ClassifierKind::logistic_regression;
    std::vector<std::optional<FoldMetrics>> folds;  // exactly k entries; empty on failure
    std::vector<CellFailure> failures;

    bool complete() const noexcept { return failures.empty(); }
    /// Summary over completed folds; nullopt when none completed.
    std::optional<MetricSummary> summary(double FoldMetrics::*metric) const;
};

struct EvalReport {
    std::vector<ReportCell> cells;  // arms outer, classifiers inner, in requested order
    std::size_t k = 0;
    std::uint64_t seed = 0;
    TrainConfig config;
    std::string dataset_fingerprint;

    const ReportCell* find(Arm arm, ClassifierKind classifier) const;
    bool all_succeeded() const;
};

struct ComparisonOptions {
    std::vector<Arm> arms = all_arms();
    std::vector<ClassifierKind> classifiers = all_classifier_kinds();
    /// Contrastive hyperparameters; projection_size is also the PCA width.
    /// The seed field is ignored: each fold's projection seed derives from `seed`.
    TrainConfig config;
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

/// Seeds are functions of (seed, arm, fold[, classifier]) only, so cells do
/// not depend on which other arms or classifiers run.
std::uint64_t projection_seed(std::uint64_t seed, Arm arm, std::size_t fold);
std::uint64_t classifier_seed(std::uint64_t seed, Arm arm, std::size_t fold, ClassifierKind classifier);

/// Fits the arm's projection on `train` alone. Returns nullopt for the
/// unprojected arm.
std::optional<AnyPipeline> fit_arm_projection(Arm arm, const MultimodalDataset& train, const TrainConfig& config,
                                              std::uint64_t seed);

/// Applies a fitted arm projection (or concatenates, for the unprojected arm).
EmbeddingMatrix arm_features(const std::optional<AnyPipeline>& projection, const MultimodalDataset& ds);

/// Stratified k-fold comparison. For every fold the projections (contrastive
/// heads and PCA) are fitted on the training split only; the test split is
/// only transformed and scored. Failures (divergence, invalid shapes) are
/// recorded per cell and fold rather than thrown.
EvalReport run_comparison(const MultimodalDataset& ds, const ComparisonOptions& options);

/// Sections separated by a blank line:
///   arm,classifier,fold,f1,auc,accuracy
///   summary / arm,classifier,metric,mean,std
///   failures / arm,classifier,fold,reason   (only when something failed)
void write_report_csv(const EvalReport& report, std::ostream& out);

}  // namespace embadapt
