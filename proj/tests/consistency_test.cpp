#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace tsalign;

namespace {

ValueMatrix column(std::vector<std::optional<double>> v)
{
    ValueMatrix out;
    for (auto x : v) out.push_back({x});
    return out;
}

} // namespace

TEST(FitModel, ConstantSeriesIsFixedPoint)
{
    ValueMatrix values;
    for (int i = 0; i < 30; ++i) values.push_back({Cell{5.0}, Cell{-2.0}});
    const auto model = fit_model(values, 2);
    EXPECT_FALSE(model.any_fallback());
    EXPECT_NEAR(model.coeff.cwiseAbs().maxCoeff(), 0.0, 1e-6);
    EXPECT_NEAR(model.intercept[0], 5.0, 1e-6);
    EXPECT_NEAR(model.intercept[1], -2.0, 1e-6);
    const auto rep = consistency_delta(values, model);
    EXPECT_NEAR(rep.delta, 0.0, 1e-12);
    // Both series are constant, so their normalizers are degenerate.
    EXPECT_TRUE(rep.degenerate[0]);
    EXPECT_TRUE(rep.degenerate[1]);
}

TEST(FitModel, RecoversDoublingProcess)
{
    std::vector<std::optional<double>> v;
    double x = 1.0;
    for (int i = 0; i < 12; ++i, x *= 2.0) v.push_back(x);
    const auto model = fit_model(column(v), 1);
    ASSERT_FALSE(model.fallback[0]);
    EXPECT_NEAR(model.coeff(0, 0), 2.0, 1e-6);
    EXPECT_NEAR(model.intercept[0], 0.0, 1e-6);
}

TEST(FitModel, AllMissingFallsBackToMean)
{
    ValueMatrix values(10, std::vector<Cell>(2));
    const auto model = fit_model(values, 2);
    EXPECT_TRUE(model.any_fallback());
    const auto rep = consistency_delta(values, model);
    EXPECT_TRUE(rep.all_missing);
    EXPECT_EQ(rep.delta, 0.0);
}

TEST(FitModel, TooFewRowsFallsBack)
{
    const auto model = fit_model(column({1.0, 2.0}), 1);
    EXPECT_TRUE(model.fallback[0]);
    EXPECT_DOUBLE_EQ(model.intercept[0], 1.5);
}

TEST(ConsistencyDelta, HandEvaluatedExample)
{
    // Values {0, 10}, predictions {1, 10}: F = 2, mu = 20, L = 1 / 20.
    const auto rep = consistency_from_predictions(column({0.0, 10.0}), {{1.0}, {10.0}}, 1);
    EXPECT_DOUBLE_EQ(rep.normalizers[0], 20.0);
    EXPECT_DOUBLE_EQ(rep.delta, 0.05);
}

TEST(ConsistencyDelta, ExactPredictionGivesZero)
{
    const auto values = column({1.0, 3.0, std::nullopt, 4.0});
    const auto rep = consistency_from_predictions(values, {{1.0}, {3.0}, {99.0}, {4.0}}, 1);
    EXPECT_EQ(rep.delta, 0.0);
    EXPECT_EQ(rep.abs_errors[2][0], 0.0);  // missing cell contributes nothing
}

TEST(ConsistencyDelta, MeanOverSeries)
{
    ValueMatrix values{{Cell{0.0}, Cell{0.0}}, {Cell{10.0}, Cell{0.0}}};
    const auto rep = consistency_from_predictions(values, {{1.0, 0.0}, {10.0, 0.0}}, 2);
    EXPECT_DOUBLE_EQ(rep.losses[0], 0.05);
    EXPECT_EQ(rep.losses[1], 0.0);
    EXPECT_TRUE(rep.degenerate[1]);
    EXPECT_DOUBLE_EQ(rep.delta, 0.025);
}

TEST(ModelConstraint, Threshold)
{
    ConsistencyReport rep;
    ConstraintConfig cfg;
    rep.delta = 0.05;
    cfg.delta = 0.1;
    EXPECT_TRUE(satisfies_model_constraint(rep, cfg));
    rep.delta = 0.2;
    EXPECT_FALSE(satisfies_model_constraint(rep, cfg));
    cfg.delta = std::numeric_limits<double>::infinity();
    rep.delta = 1e300;
    EXPECT_TRUE(satisfies_model_constraint(rep, cfg));
}

TEST(ConsistencyDelta, NonNegativeOnRandomAlignments)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t m = 2 + trial % 3, rows = 1 + trial % 40;
        ValueMatrix values(rows, std::vector<Cell>(m));
        for (auto& row : values)
            for (auto& c : row)
                if (unit(rng) > 0.3) c = gauss(rng);
        const auto rep = Ar1Predictor{}.evaluate(values, m);
        ASSERT_GE(rep.delta, 0.0);
        ASSERT_TRUE(std::isfinite(rep.delta));
    }
}

TEST(ConsistencyDelta, MeanPredictorIsRowOrderInvariant)
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // No row is fully observed, so neither equation can be fitted.
    ValueMatrix sparse;
    for (int i = 0; i < 6; ++i) {
        sparse.push_back({Cell{gauss(rng)}, std::nullopt});
        sparse.push_back({std::nullopt, Cell{gauss(rng)}});
    }
    const auto model = fit_model(sparse, 2);
    ASSERT_TRUE(model.fallback[0] && model.fallback[1]);
    const auto base = consistency_delta(sparse, model).delta;
    auto shuffled = sparse;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto refit = fit_model(shuffled, 2);
    ASSERT_TRUE(refit.any_fallback());
    EXPECT_NEAR(consistency_delta(shuffled, refit).delta, base, 1e-12);
}

TEST(ConsistencyDelta, AffineScalingInvariantUnderMeanPredictor)
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ValueMatrix values;
    for (int i = 0; i < 3; ++i) values.push_back({Cell{gauss(rng)}});
    const auto base = consistency_delta(values, fit_model(values, 1));
    ASSERT_TRUE(fit_model(values, 1).fallback[0]);
    for (double a : {-3.0, 0.5, 7.0}) {
        ValueMatrix scaled = values;
        for (auto& row : scaled) row[0] = a * *row[0] + 11.0;
        EXPECT_NEAR(consistency_delta(scaled, fit_model(scaled, 1)).losses[0], base.losses[0], 1e-12);
    }
}
