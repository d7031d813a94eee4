#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "olpsynth/analyzer.hpp"
#include "olpsynth/error.hpp"

using namespace olpsynth;

namespace {

std::vector<ArithmeticMode> uniform(const NetworkModel& m, ArithmeticMode mode) {
    return std::vector<ArithmeticMode>(m.size(), mode);
}

std::size_t count_mode(const ModeAssignment& a, ArithmeticMode mode) {
    std::size_t n = 0;
    for (const auto& l : a.layers)
        if (l.candidate && l.mode == mode) ++n;
    return n;
}

}  // namespace

TEST(Accuracy, SelfLabeledBaselineIsPerfect) {
    const auto model = parse_network_description(fixtures::kHarmlessNet);
    const auto params = random_parameters(model, 1);
    const auto ds = fixtures::self_labeled(model, params, 30, 500);
    EXPECT_DOUBLE_EQ(evaluate_accuracy(model, params, uniform(model, ArithmeticMode::Precise), ds), 1.0);
    EXPECT_DOUBLE_EQ(evaluate_accuracy(model, params, uniform(model, ArithmeticMode::Imprecise), ds, {4, 3}), 1.0);
}

TEST(Accuracy, DenormalPoisonFlipsOneRecord) {
    const auto model = parse_network_description(fixtures::kPoisonNet);
    const auto ds = fixtures::poison_dataset();
    const auto params = fixtures::poison_params();
    EXPECT_DOUBLE_EQ(evaluate_accuracy(model, params, uniform(model, ArithmeticMode::Precise), ds), 1.0);
    EXPECT_NEAR(evaluate_accuracy(model, params, uniform(model, ArithmeticMode::Imprecise), ds), 0.9, 1e-12);
    EXPECT_NEAR(evaluate_accuracy(model, params, uniform(model, ArithmeticMode::Relaxed), ds), 0.9, 1e-12);
    // With a normal scale nothing flips, so the loss is caused by the flush.
    const auto normal = fixtures::poison_params(1.0f);
    EXPECT_DOUBLE_EQ(evaluate_accuracy(model, normal, uniform(model, ArithmeticMode::Imprecise), ds), 1.0);
}

TEST(Accuracy, RejectsBadDatasets) {
    const auto model = parse_network_description(fixtures::kPoisonNet);
    const auto params = fixtures::poison_params();
    const auto modes = uniform(model, ArithmeticMode::Precise);
    LabeledDataset empty;
    empty.shape = {2, 1, 1};
    EXPECT_THROW(evaluate_accuracy(model, params, modes, empty), Error);
    auto wrong_shape = fixtures::poison_dataset();
    wrong_shape.shape = {3, 1, 1};
    EXPECT_THROW(evaluate_accuracy(model, params, modes, wrong_shape), ShapeError);
    auto bad_label = fixtures::poison_dataset();
    bad_label.records[0].label = 7;
    EXPECT_THROW(evaluate_accuracy(model, params, modes, bad_label), Error);
}

TEST(SelectModes, HarmlessNetGoesFullyImprecise) {
    const auto model = parse_network_description(fixtures::kHarmlessNet);
    const auto params = random_parameters(model, 2);
    const auto ds = fixtures::self_labeled(model, params, 20, 700);
    const auto a = select_modes(model, params, ds, 0.0);
    EXPECT_EQ(a.modes.size(), model.size());
    EXPECT_EQ(count_mode(a, ArithmeticMode::Imprecise), model.size() - 1);
    EXPECT_FALSE(a.layers[0].candidate);
    EXPECT_DOUBLE_EQ(a.achieved_accuracy, 1.0);
    const auto plan = plan_for(model, a, 4, 1);
    for (const auto& l : plan.layers) {
        if (l.kind == LayerKind::Conv || l.kind == LayerKind::FullyConnected) {
            EXPECT_TRUE(l.vectorized());
        }
    }
}

TEST(SelectModes, KeepsPoisonedLayerPrecise) {
    const auto model = parse_network_description(fixtures::kPoisonNet);
    const auto a = select_modes(model, fixtures::poison_params(), fixtures::poison_dataset(), 0.0);
    EXPECT_EQ(a.layers[1].mode, ArithmeticMode::Imprecise);
    EXPECT_EQ(a.layers[2].mode, ArithmeticMode::Precise);
    EXPECT_NEAR(a.layers[2].solo_degradation, 0.1, 1e-12);
    EXPECT_DOUBLE_EQ(a.layers[1].solo_degradation, 0.0);
    EXPECT_DOUBLE_EQ(a.achieved_accuracy, 1.0);
    const auto report = format_report(a);
    EXPECT_NE(report.find("layer c2 mode=precise"), std::string::npos);
    EXPECT_NE(report.find("layer c1 mode=imprecise"), std::string::npos);
}

TEST(SelectModes, LargeToleranceAllowsEverything) {
    const auto model = parse_network_description(fixtures::kPoisonNet);
    const auto a = select_modes(model, fixtures::poison_params(), fixtures::poison_dataset(), 1.0);
    EXPECT_EQ(count_mode(a, ArithmeticMode::Imprecise), 2u);
    EXPECT_NEAR(a.achieved_accuracy, 0.9, 1e-12);
}

TEST(SelectModes, BudgetHoldsAndImpreciseSetGrowsWithTolerance) {
    // Denormal traps of different weight: 1, 2 and 3 of 20 records carry
    // their class signal through a denormal produced by a, b and c. A layer
    // that flushes also loses the denormal it receives, so the solo losses
    // are 1, 3 and 5 records.
    const auto model = parse_network_description(R"(input 4 1 1
conv a pred=input N=4 M=4 K=1 S=1 P=0
conv b pred=a N=4 M=4 K=1 S=1 P=0
conv c pred=b N=4 M=4 K=1 S=1 P=0
)");
    auto diag = [](float s1, float s2, float s3) {
        return std::vector<float>{1, 0, 0, 0, 0, s1, 0, 0, 0, 0, s2, 0, 0, 0, 0, s3};
    };
    const float d = fixtures::kPoisonScale;
    const ParameterSet params({}, {{"a", diag(d, 1, 1), std::vector<float>(4, 0.0f)},
                                   {"b", diag(1e30f, d, 1), std::vector<float>(4, 0.0f)},
                                   {"c", diag(1, 1e30f, d), std::vector<float>(4, 0.0f)}});
    LabeledDataset ds;
    ds.shape = {4, 1, 1};
    auto rec = [&](std::vector<float> v, std::uint32_t label) {
        ds.records.push_back({Tensor(ds.shape, Layout::row_major(), std::move(v)), label});
    };
    for (int i = 0; i < 14; ++i) rec({1, 0, 0, 0}, 0);
    rec({0, 1, 0, 0}, 1);
    for (int i = 0; i < 2; ++i) rec({0, 0, 1, 0}, 2);
    for (int i = 0; i < 3; ++i) rec({0, 0, 0, 1}, 3);

    std::size_t prev = 0;
    for (double tol : {0.0, 0.05, 0.1, 0.15, 0.3, 1.0}) {
        const auto a = select_modes(model, params, ds, tol);
        EXPECT_GE(a.achieved_accuracy, a.baseline_accuracy - tol - 1e-12) << "tol " << tol;
        const std::size_t n = count_mode(a, ArithmeticMode::Imprecise);
        EXPECT_GE(n, prev) << "tol " << tol;
        prev = n;
        if (tol == 0.05) {
            EXPECT_EQ(a.layers[1].mode, ArithmeticMode::Imprecise);
            EXPECT_EQ(a.layers[2].mode, ArithmeticMode::Precise);
        }
    }
    EXPECT_EQ(prev, 3u);
}

TEST(SelectModes, EmptyDatasetIsAnError) {
    const auto model = parse_network_description(fixtures::kPoisonNet);
    LabeledDataset empty;
    empty.shape = {2, 1, 1};
    EXPECT_THROW(select_modes(model, fixtures::poison_params(), empty, 0.0), Error);
}
