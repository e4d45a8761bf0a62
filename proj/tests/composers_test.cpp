#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_support.hpp"

using namespace tsalign;
using namespace tsalign::testing;

namespace {

const WeightParams caption_weights{3, 2, 1, 1};

ConstraintConfig config(double theta, std::size_t beta, double delta = std::numeric_limits<double>::infinity())
{
    ConstraintConfig cfg;
    cfg.theta = theta;
    cfg.beta = beta;
    cfg.delta = delta;
    return cfg;
}

CandidateSet manual_candidates(const SeriesTable& t, std::vector<std::vector<std::size_t>> rows, std::size_t beta)
{
    CandidateSet rc;
    rc.series_count = t.series_count();
    rc.row_count = t.row_count();
    rc.config.beta = beta;
    for (auto& r : rows) rc.tuples.push_back(AlignedTuple{r});
    std::sort(rc.tuples.begin(), rc.tuples.end());
    return rc;
}

} // namespace

TEST(ComposeExact, NonConflictingCandidatesAllSelected)
{
    const auto t = example_table();
    const auto cfg = config(2, 0);
    const auto rc = generate_candidates(t, cfg);
    const auto a = compose_exact(rc, cfg, t, caption_weights);
    EXPECT_EQ(a.size(), 3u);
    EXPECT_DOUBLE_EQ(a.total_weight, 9.0);
    EXPECT_FALSE(a.exhausted);
}

TEST(ComposeExact, PicksHeavierOfConflictingPair)
{
    auto t = make_table({{0, 1}, {0, 1}}, {{1, 1}, {1, NA}});
    // (0,0) weighs 4, (0,1) weighs (0+1)/(2+1) = 1/3 and shares row 0 of series 0.
    const auto rc = manual_candidates(t, {{0, 0}, {0, 1}}, 1);
    const auto a = compose_exact(rc, config(10, 1), t, caption_weights);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a.tuples[0], (AlignedTuple{{0, 0}}));
    EXPECT_DOUBLE_EQ(a.total_weight, 4.0);
}

TEST(ComposeExact, EmptyCandidates)
{
    const auto t = example_table();
    const auto rc = generate_candidates(t, config(0, 0));
    const auto a = compose_exact(rc, config(0, 0), t, caption_weights);
    EXPECT_EQ(a.size(), 0u);
    EXPECT_EQ(a.total_weight, 0.0);
}

TEST(ComposeExact, GuardRejectsLargeCandidateSets)
{
    std::mt19937_64 rng(1);
    auto t = random_table(rng, RandomTableSpec{2, 30, 0.0, 0.0});
    const auto cfg = config(100, 2);
    const auto rc = generate_candidates(t, cfg);
    ASSERT_GT(rc.size(), exact_candidate_limit);
    EXPECT_THROW(compose_exact(rc, cfg, t, caption_weights), size_error);
}

TEST(ComposeExact, MatchesIndependentSetOracle)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 150; ++trial) {
        auto inst = random_instance(rng, 1, 12);
        const auto a = compose_exact(inst.rc, inst.cfg, inst.table, inst.w);
        ASSERT_NEAR(a.total_weight, brute_force_mwis(inst.rc, inst.table, inst.w), 1e-9);
        ASSERT_TRUE(is_valid_packing(a, inst.rc));
    }
}

TEST(ComposeExact, RespectsModelConstraint)
{
    std::mt19937_64 rng(32);
    int constrained = 0;
    for (int trial = 0; trial < 80; ++trial) {
        auto inst = random_instance(rng, 4, 10);
        const auto free = compose_exact(inst.rc, inst.cfg, inst.table, inst.w);
        if (free.report.delta == 0.0) continue;
        auto cfg = inst.cfg;
        cfg.delta = free.report.delta / 2.0;
        const auto tight = compose_exact(inst.rc, cfg, inst.table, inst.w);
        ASSERT_LE(tight.report.delta, cfg.delta);
        ASSERT_LE(tight.total_weight, free.total_weight + 1e-12);
        ++constrained;
    }
    EXPECT_GT(constrained, 10);
}

TEST(ComposeGreedy, EachNonConflictingTupleIsItsOwnGroup)
{
    const auto t = example_table();
    const auto cfg = config(2, 0);
    const auto rc = generate_candidates(t, cfg);
    const auto a = compose_greedy(rc, cfg, t, caption_weights, 0, 0);
    EXPECT_EQ(a.size(), 3u);
    EXPECT_DOUBLE_EQ(a.total_weight, 9.0);
}

TEST(ComposeGreedy, RandomTieBreakAlwaysEmitsOne)
{
    auto t = make_table({{0, 1, 2}, {0, 1, 2}}, {{1, 1, 1}, {1, 1, 1}});
    const auto rc = manual_candidates(t, {{1, 0}, {1, 2}}, 1);
    std::set<AlignedTuple> seen;
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
        const auto a = compose_greedy(rc, config(10, 1), t, caption_weights, seed, 0);
        ASSERT_EQ(a.size(), 1u);
        seen.insert(a.tuples[0]);
    }
    EXPECT_EQ(seen.size(), 2u);
}

TEST(ComposeGreedy, FlushesTrailingGroup)
{
    auto t = make_table({{0, 1, 2}, {0, 1, 2}}, {{1, 1, 1}, {1, 1, 1}});
    const auto rc = manual_candidates(t, {{0, 0}, {2, 1}, {2, 2}}, 1);
    const auto a = compose_greedy(rc, config(10, 1), t, caption_weights, 0, 0);
    EXPECT_EQ(a.tuples, (std::vector<AlignedTuple>{AlignedTuple{{0, 0}}, AlignedTuple{{2, 2}}}));
}

TEST(ComposeGreedy, ExhaustsWhenDeltaUnreachable)
{
    std::mt19937_64 rng(2);
    auto t = random_table(rng, RandomTableSpec{3, 40, 0.1, 0.1});
    auto cfg = config(1.0, 1, 0.0);
    const auto rc = generate_candidates(t, cfg);
    const auto a = compose_greedy(rc, cfg, t, caption_weights, 0, 4);
    EXPECT_TRUE(a.exhausted);
    EXPECT_LE(a.retries_used, 4u);
    EXPECT_TRUE(is_valid_packing(a, rc));
}

TEST(ComposeExpectation, NoIntraGroupConflictsMatchesGreedy)
{
    const auto t = example_table();
    const auto cfg = config(2, 0);
    const auto rc = generate_candidates(t, cfg);
    const auto g = compose_greedy(rc, cfg, t, caption_weights, 3, 0);
    const auto e = compose_expectation(rc, cfg, t, caption_weights, 3, 0);
    EXPECT_EQ(g.tuples, e.tuples);
}

TEST(ComposeExpectation, BonusPrefersCandidateThatLeavesRoom)
{
    // (0,0) and (0,1) conflict; picking (0,1) blocks (1,1), picking (0,0) keeps it available.
    auto t = make_table({{0, 1, 2}, {0, 1, 2}}, {{1, 1, 1}, {1, 1, 1}});
    const auto rc = manual_candidates(t, {{0, 0}, {0, 1}, {1, 1}}, 1);
    const WeightParams w{3, 0, 1, 1};  // k2 = 0: every candidate weighs 4
    const auto e = compose_expectation(rc, config(10, 1), t, w, 0, 0);
    EXPECT_EQ(e.tuples, (std::vector<AlignedTuple>{AlignedTuple{{0, 0}}, AlignedTuple{{1, 1}}}));
}

TEST(ComposeExpectation, PrunedBonusMatchesFullScan)
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        auto inst = random_instance(rng, 1, 40);
        for (std::size_t g = 0; g < inst.rc.size(); ++g) {
            std::vector<std::size_t> group{g};
            for (std::size_t h = g + 1; h < inst.rc.size() && group.size() < 3; ++h)
                if (std::all_of(group.begin(), group.end(), [&](auto x) { return conflicts(inst.rc[x], inst.rc[h]); }))
                    group.push_back(h);
            std::vector<double> wts;
            for (const auto& r : inst.rc) wts.push_back(weight(r, inst.table, inst.w));
            for (std::size_t member : group)
                ASSERT_EQ(expectation_bonus(inst.rc, wts, member, group, true),
                          expectation_bonus(inst.rc, wts, member, group, false));
        }
    }
}

TEST(ComposeSetPacking, SingleCandidate)
{
    const auto t = example_table();
    const auto rc = manual_candidates(t, {{1, 1}}, 0);
    const auto a = compose_setpacking(rc, config(2, 0), t, caption_weights);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_FALSE(a.exhausted);
}

TEST(ComposeSetPacking, OptimalGreedyStartIsKept)
{
    std::mt19937_64 rng(43);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto inst = random_instance(rng, 1, 12);
        std::vector<AlignedTuple> start;
        for (const auto& r : inst.rc)
            if (std::none_of(start.begin(), start.end(), [&](const auto& s) { return conflicts(s, r); }))
                start.push_back(r);
        const double optimum = brute_force_mwis(inst.rc, inst.table, inst.w);
        if (std::abs(total_weight(start, inst.table, inst.w) - optimum) > 1e-9) continue;
        const auto a = compose_setpacking(inst.rc, inst.cfg, inst.table, inst.w);
        ASSERT_NEAR(a.total_weight, optimum, 1e-9);
        ++checked;
    }
    EXPECT_GT(checked, 50);
}

TEST(ComposeSetPacking, LocalSearchEscapesGreedyStart)
{
    // Greedy start keeps (0,0,0) and blocks three heavier disjoint tuples.
    auto t = make_table({{0, 1, 2, 3}, {0, 1, 2, 3}, {0, 1, 2, 3}}, {{1, NA, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}});
    WeightParams w{3, 0, 1, 1};
    const auto rc = manual_candidates(t, {{0, 0, 0}, {0, 1, 1}, {1, 0, 2}, {2, 2, 0}}, 3);
    const auto a = compose_setpacking(rc, config(100, 3), t, w);
    EXPECT_NEAR(a.total_weight, brute_force_mwis(rc, t, w), 1e-12);
    EXPECT_TRUE(is_valid_packing(a, rc));
}

TEST(Composers, ValidityAndDominanceOnRandomInstances)
{
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        auto inst = random_instance(rng, 0, 12);
        const auto exact = compose_exact(inst.rc, inst.cfg, inst.table, inst.w);
        for (auto s : {Strategy::setpack, Strategy::greedy, Strategy::expect}) {
            const auto a = compose(s, inst.rc, inst.cfg, inst.table, inst.w, trial);
            ASSERT_TRUE(is_valid_packing(a, inst.rc));
            ASSERT_LE(a.total_weight, exact.total_weight + 1e-9);
            ASSERT_NEAR(a.total_weight, total_weight(a.tuples, inst.table, inst.w), 1e-9);
            ASSERT_FALSE(a.exhausted);
        }
    }
}

TEST(Composers, DeterministicForFixedSeed)
{
    std::mt19937_64 rng(66);
    for (int trial = 0; trial < 50; ++trial) {
        auto inst = random_instance(rng, 5, 30, false);
        for (auto s : {Strategy::setpack, Strategy::greedy, Strategy::expect}) {
            const auto a = compose(s, inst.rc, inst.cfg, inst.table, inst.w, 9);
            const auto b = compose(s, inst.rc, inst.cfg, inst.table, inst.w, 9);
            ASSERT_EQ(a.tuples, b.tuples);
            ASSERT_EQ(a.total_weight, b.total_weight);
            ASSERT_EQ(a.report.delta, b.report.delta);
        }
    }
}

TEST(Composers, ForeignCandidateSetRejected)
{
    const auto t = example_table();
    std::mt19937_64 rng(3);
    auto other = random_table(rng, RandomTableSpec{3, 5, 0, 0});
    const auto rc = generate_candidates(other, config(5, 1));
    EXPECT_THROW(compose_greedy(rc, config(5, 1), t, caption_weights), structural_error);
}

TEST(Strategy, ParseRoundTrip)
{
    for (auto s : {Strategy::exact, Strategy::setpack, Strategy::greedy, Strategy::expect})
        EXPECT_EQ(parse_strategy(to_string(s)), s);
    EXPECT_THROW(parse_strategy("dtw"), config_error);
}
