#include "embadapt/comparison.hpp"
#include "embadapt/synthetic.hpp"

#include "leakage.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace embadapt {
namespace {

MultimodalDataset synth(Nonlinearity shape, std::size_t n = 200) {
    SynthSpec spec;
    spec.n_samples = n;
    spec.dims = {24, 16};
    spec.signal_dims = {8, 8};
    spec.nonlinearity = shape;
    spec.seed = 31;
    return generate_synthetic(spec);
}

ComparisonOptions quick_options() {
    ComparisonOptions o;
    o.config.projection_size = 6;
    o.config.batch_size = 32;
    o.config.epochs = 2;
    o.classifiers = {ClassifierKind::logistic_regression, ClassifierKind::cart};
    o.folds = 3;
    o.seed = 17;
    return o;
}

std::string csv(const EvalReport& r) {
    std::ostringstream out;
    write_report_csv(r, out);
    return out.str();
}

TEST(ArmNames, RoundTrip) {
    for (Arm a : all_arms()) EXPECT_EQ(parse_arm(to_string(a)), a);
    EXPECT_THROW(parse_arm("finetune"), std::invalid_argument);
}

TEST(Comparison, UnprojectedLogisticOnSeparableData) {
    const auto ds = synth(Nonlinearity::none, 300);
    ComparisonOptions o;
    o.arms = {Arm::unprojected};
    o.classifiers = {ClassifierKind::logistic_regression};
    const auto report = run_comparison(ds, o);
    ASSERT_EQ(report.cells.size(), 1u);
    const auto f1 = report.cells[0].summary(&FoldMetrics::f1);
    ASSERT_TRUE(f1);
    EXPECT_GE(f1->mean, 0.95);
    EXPECT_LE(f1->mean, 1.0);
}

TEST(Comparison, DefaultsCoverEveryArmAndClassifier) {
    const ComparisonOptions o;
    EXPECT_EQ(o.arms.size(), 5u);
    EXPECT_EQ(o.classifiers.size(), 5u);
    EXPECT_EQ(o.folds, 5u);
}

TEST(Comparison, ReportShapeAndAggregation) {
    const auto ds = synth(Nonlinearity::xor_rotate);
    const auto report = run_comparison(ds, quick_options());
    ASSERT_EQ(report.cells.size(), 10u);
    EXPECT_TRUE(report.all_succeeded());
    EXPECT_EQ(report.k, 3u);
    EXPECT_EQ(report.dataset_fingerprint, fingerprint(ds));
    EXPECT_EQ(report.cells[0].arm, Arm::unprojected);
    EXPECT_EQ(report.cells[1].classifier, ClassifierKind::cart);
    for (const auto& cell : report.cells) {
        ASSERT_EQ(cell.folds.size(), 3u);
        for (auto metric : {&FoldMetrics::f1, &FoldMetrics::auc, &FoldMetrics::accuracy}) {
            double sum = 0.0;
            for (const auto& f : cell.folds) sum += (*f).*metric;
            const double mean = sum / 3.0;
            double ss = 0.0;
            for (const auto& f : cell.folds) ss += ((*f).*metric - mean) * ((*f).*metric - mean);
            const auto s = cell.summary(metric);
            EXPECT_NEAR(s->mean, mean, 1e-12);
            EXPECT_NEAR(s->std, std::sqrt(ss / 2.0), 1e-12);
        }
    }
    EXPECT_NE(report.find(Arm::pca_permod, ClassifierKind::cart), nullptr);
    EXPECT_EQ(report.find(Arm::pca_permod, ClassifierKind::mlp), nullptr);
}

TEST(Comparison, DeterministicAcrossRunsAndThreadCounts) {
    const auto ds = synth(Nonlinearity::xor_rotate);
    auto o = quick_options();
    const auto first = csv(run_comparison(ds, o));
    EXPECT_EQ(first, csv(run_comparison(ds, o)));
    o.threads = 4;
    EXPECT_EQ(first, csv(run_comparison(ds, o)));
}

TEST(Comparison, ArmsDoNotInfluenceEachOther) {
    const auto ds = synth(Nonlinearity::xor_rotate);
    auto o = quick_options();
    o.arms = {Arm::unprojected};
    const auto alone = run_comparison(ds, o);
    o.arms = {Arm::pca_permod, Arm::contrastive_single, Arm::unprojected};
    const auto together = run_comparison(ds, o);
    for (auto kind : o.classifiers) {
        const auto* a = alone.find(Arm::unprojected, kind);
        const auto* b = together.find(Arm::unprojected, kind);
        ASSERT_TRUE(a && b);
        for (std::size_t f = 0; f < 3; ++f) {
            EXPECT_EQ(a->folds[f]->f1, b->folds[f]->f1);
            EXPECT_EQ(a->folds[f]->auc, b->folds[f]->auc);
            EXPECT_EQ(a->folds[f]->accuracy, b->folds[f]->accuracy);
        }
    }
}

TEST(Comparison, FailuresAreRecordedNotThrown) {
    const auto ds = synth(Nonlinearity::xor_rotate);
    auto o = quick_options();
    o.arms = {Arm::unprojected, Arm::pca_permod};
    o.config.projection_size = 20;  // exceeds the 16-dim modality
    const auto report = run_comparison(ds, o);
    EXPECT_FALSE(report.all_succeeded());
    EXPECT_TRUE(report.find(Arm::unprojected, ClassifierKind::cart)->complete());
    const auto* failed = report.find(Arm::pca_permod, ClassifierKind::cart);
    ASSERT_EQ(failed->failures.size(), 3u);
    EXPECT_FALSE(failed->summary(&FoldMetrics::f1).has_value());
    const auto text = csv(report);
    EXPECT_NE(text.find("pca_permod,cart,f1,failed,failed"), std::string::npos);
    EXPECT_NE(text.find("\nfailures\narm,classifier,fold,reason\n"), std::string::npos);
}

TEST(Comparison, CsvLayout) {
    const auto ds = synth(Nonlinearity::xor_rotate);
    auto o = quick_options();
    o.arms = {Arm::pca_single};
    o.classifiers = {ClassifierKind::cart};
    const auto text = csv(run_comparison(ds, o));
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    ASSERT_EQ(lines.size(), 1u + 3u + 1u + 2u + 3u);
    EXPECT_EQ(lines[0], "arm,classifier,fold,f1,auc,accuracy");
    EXPECT_EQ(lines[1].rfind("pca_single,cart,0,", 0), 0u);
    EXPECT_EQ(lines[4], "");
    EXPECT_EQ(lines[5], "summary");
    EXPECT_EQ(lines[6], "arm,classifier,metric,mean,std");
    EXPECT_EQ(lines[7].rfind("pca_single,cart,f1,", 0), 0u);
    EXPECT_EQ(text.find("failures"), std::string::npos);
}

TEST(Comparison, RejectsBadOptions) {
    const auto ds = synth(Nonlinearity::none);
    auto o = quick_options();
    o.folds = 1;
    EXPECT_THROW(run_comparison(ds, o), std::invalid_argument);
    o = quick_options();
    o.arms.clear();
    EXPECT_THROW(run_comparison(ds, o), std::invalid_argument);
}

TEST(Comparison, NoLeakageForEveryProjectedArm) {
    const auto ds = synth(Nonlinearity::xor_rotate, 90);
    const auto o = quick_options();
    const auto audit = oracle::audit_leakage(ds, all_arms(), o.config, 3, o.seed);
    EXPECT_EQ(audit.checked, 15u);
    for (const auto& m : audit.mismatches) ADD_FAILURE() << m;
}

TEST(Comparison, SeedsDependOnlyOnCellCoordinates) {
    EXPECT_EQ(projection_seed(1, Arm::pca_single, 2), projection_seed(1, Arm::pca_single, 2));
    EXPECT_NE(projection_seed(1, Arm::pca_single, 2), projection_seed(1, Arm::pca_single, 3));
    EXPECT_NE(projection_seed(1, Arm::pca_single, 2), projection_seed(1, Arm::pca_permod, 2));
    EXPECT_NE(classifier_seed(1, Arm::unprojected, 0, ClassifierKind::cart),
              classifier_seed(1, Arm::unprojected, 0, ClassifierKind::mlp));
}

}  // namespace
}  // namespace embadapt
