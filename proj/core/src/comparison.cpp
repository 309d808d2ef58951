#include "embadapt/comparison.hpp"

#include "embadapt/errors.hpp"
#include "embadapt/metrics.hpp"
#include "embadapt/parallel.hpp"
#include "embadapt/seeding.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace embadapt {

std::string_view to_string(Arm arm) {
    switch (arm) {
        case Arm::unprojected: return "unprojected";
        case Arm::contrastive_single: return "contrastive_single";
        case Arm::contrastive_permod: return "contrastive_permod";
        case Arm::pca_single: return "pca_single";
        case Arm::pca_permod: return "pca_permod";
    }
    return "unknown";
}

Arm parse_arm(std::string_view text) {
    for (Arm a : all_arms()) {
        if (to_string(a) == text) return a;
    }
    throw std::invalid_argument("unknown arm '" + std::string(text) + "'");
}

const std::vector<Arm>& all_arms() {
    static const std::vector<Arm> arms{Arm::unprojected, Arm::contrastive_single, Arm::contrastive_permod, Arm::pca_single,
                                       Arm::pca_permod};
    return arms;
}

std::optional<MetricSummary> ReportCell::summary(double FoldMetrics::*metric) const {
    std::vector<double> values;
    for (const auto& f : folds) {
        if (f) values.push_back((*f).*metric);
    }
    if (values.empty()) return std::nullopt;
    MetricSummary s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

const ReportCell* EvalReport::find(Arm arm, ClassifierKind classifier) const {
    for (const auto& c : cells) {
        if (c.arm == arm && c.classifier == classifier) return &c;
    }
    return nullptr;
}

bool EvalReport::all_succeeded() const {
    for (const auto& c : cells) {
        if (!c.complete()) return false;
    }
    return true;
}

std::uint64_t projection_seed(std::uint64_t seed, Arm arm, std::size_t fold) {
    return derive_seed(seed, {seed_tag::projection, static_cast<std::uint64_t>(arm), fold});
}

std::uint64_t classifier_seed(std::uint64_t seed, Arm arm, std::size_t fold, ClassifierKind classifier) {
    return derive_seed(seed, {seed_tag::classifier, static_cast<std::uint64_t>(arm), fold, static_cast<std::uint64_t>(classifier)});
}

std::optional<AnyPipeline> fit_arm_projection(Arm arm, const MultimodalDataset& train, const TrainConfig& config,
                                              std::uint64_t seed) {
    TrainConfig c = config;
    c.seed = seed;
    switch (arm) {
        case Arm::unprojected: return std::nullopt;
        case Arm::contrastive_single: return AnyPipeline{adapt(train, ProjectionMode::single, c).pipeline};
        case Arm::contrastive_permod: return AnyPipeline{adapt(train, ProjectionMode::per_modality, c).pipeline};
        case Arm::pca_single: return AnyPipeline{fit_pca_pipeline(train, ProjectionMode::single, c.projection_size)};
        case Arm::pca_permod: return AnyPipeline{fit_pca_pipeline(train, ProjectionMode::per_modality, c.projection_size)};
    }
    throw std::invalid_argument("fit_arm_projection: unknown arm");
}

EmbeddingMatrix arm_features(const std::optional<AnyPipeline>& projection, const MultimodalDataset& ds) {
    return projection ? apply(*projection, ds) : concat_modalities(ds);
}

namespace {

struct FoldFeatures {
    EmbeddingMatrix train;
    EmbeddingMatrix test;
    std::string failure;  // non-empty when the projection could not be fitted
};

}  // namespace

EvalReport run_comparison(const MultimodalDataset& ds, const ComparisonOptions& options) {
    options.config.validate();
    if (options.folds < 2) throw std::invalid_argument("run_comparison: need at least 2 folds");
    if (options.arms.empty() || options.classifiers.empty()) throw std::invalid_argument("run_comparison: nothing to compare");

    const std::size_t k = options.folds;
    const FoldPlan plan = stratified_kfold(ds.labels(), k, options.seed);
    const std::size_t n_arms = options.arms.size();
    const std::size_t n_clf = options.classifiers.size();

    std::vector<MultimodalDataset> train_sets;
    std::vector<MultimodalDataset> test_sets;
    std::vector<Labels> train_labels;
    for (std::size_t f = 0; f < k; ++f) {
        const auto train_rows = plan.train(f);
        train_sets.push_back(ds.subset(train_rows));
        test_sets.push_back(ds.subset(plan.test[f]));
    }

    // Stage 1: one projection per (arm, fold).
    std::vector<FoldFeatures> features(n_arms * k);
    parallel_for(n_arms * k, options.threads, [&](std::size_t task) {
        const std::size_t a = task / k;
        const std::size_t f = task % k;
        const Arm arm = options.arms[a];
        FoldFeatures& out = features[task];
        try {
            const auto projection = fit_arm_projection(arm, train_sets[f], options.config, projection_seed(options.seed, arm, f));
            out.train = arm_features(projection, train_sets[f]);
            out.test = arm_features(projection, test_sets[f]);
            if (!out.train.allFinite() || !out.test.allFinite()) throw DivergenceError("projection produced non-finite features");
        } catch (const std::exception& e) {
            out.failure = e.what();
            out.train.resize(0, 0);
            out.test.resize(0, 0);
        }
    });

    // Stage 2: one classifier fit per (arm, fold, classifier).
    struct CellOutcome {
        std::optional<FoldMetrics> metrics;
        std::string failure;
    };
    std::vector<CellOutcome> outcomes(n_arms * k * n_clf);
    parallel_for(outcomes.size(), options.threads, [&](std::size_t task) {
        const std::size_t a = task / (k * n_clf);
        const std::size_t f = (task / n_clf) % k;
        const std::size_t c = task % n_clf;
        const FoldFeatures& feats = features[a * k + f];
        CellOutcome& out = outcomes[task];
        if (!feats.failure.empty()) {
            out.failure = "projection failed: " + feats.failure;
            return;
        }
        try {
            const ClassifierKind kind = options.classifiers[c];
            auto model = make_classifier(kind, classifier_seed(options.seed, options.arms[a], f, kind));
            model->fit(feats.train, train_sets[f].labels());
            const Vector scores = model->predict_score(feats.test);
            if (!scores.allFinite()) throw DivergenceError("classifier produced non-finite scores");
            const std::vector<int> predicted = model->predict(feats.test);
            const Labels& truth = test_sets[f].labels();
            out.metrics = FoldMetrics{f1_score(truth, predicted),
                                      roc_auc(truth, std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size()))),
                                      accuracy(truth, predicted)};
        } catch (const std::exception& e) {
            out.failure = e.what();
        }
    });

    EvalReport report;
    report.k = k;
    report.seed = options.seed;
    report.config = options.config;
    report.dataset_fingerprint = fingerprint(ds);
    for (std::size_t a = 0; a < n_arms; ++a) {
        for (std::size_t c = 0; c < n_clf; ++c) {
            ReportCell cell;
            cell.arm = options.arms[a];
            cell.classifier = options.classifiers[c];
            for (std::size_t f = 0; f < k; ++f) {
                CellOutcome& o = outcomes[(a * k + f) * n_clf + c];
                cell.folds.push_back(o.metrics);
                if (!o.metrics) cell.failures.push_back({f, o.failure});
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
    out << "arm,classifier,fold,f1,auc,accuracy\n";
    for (const auto& cell : report.cells) {
        for (std::size_t f = 0; f < cell.folds.size(); ++f) {
            if (!cell.folds[f]) continue;
            const FoldMetrics& m = *cell.folds[f];
            out << to_string(cell.arm) << ',' << to_string(cell.classifier) << ',' << f << ',' << format_double(m.f1) << ','
                << format_double(m.auc) << ',' << format_double(m.accuracy) << '\n';
        }
    }
    out << "\nsummary\narm,classifier,metric,mean,std\n";
    const std::pair<const char*, double FoldMetrics::*> metrics[] = {
        {"f1", &FoldMetrics::f1}, {"auc", &FoldMetrics::auc}, {"accuracy", &FoldMetrics::accuracy}};
    for (const auto& cell : report.cells) {
        for (const auto& [name, member] : metrics) {
            out << to_string(cell.arm) << ',' << to_string(cell.classifier) << ',' << name << ',';
            const auto s = cell.summary(member);
            if (cell.complete() && s) {
                out << format_double(s->mean) << ',' << format_double(s->std) << '\n';
            } else {
                out << "failed,failed\n";
            }
        }
    }
    if (!report.all_succeeded()) {
        out << "\nfailures\narm,classifier,fold,reason\n";
        for (const auto& cell : report.cells) {
            for (const auto& failure : cell.failures) {
                std::string reason = failure.reason;
                for (char& ch : reason) {
                    if (ch == ',' || ch == '\n' || ch == '\r') ch = ' ';
                }
                out << to_string(cell.arm) << ',' << to_string(cell.classifier) << ',' << failure.fold << ',' << reason << '\n';
            }
        }
    }
}

}  // namespace embadapt
