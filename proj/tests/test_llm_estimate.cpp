#include "devcarbon/error.hpp"
#include "devcarbon/llm_estimate.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace devcarbon;

namespace {

const PowerProfile kProfile;

LlmSessionRecord session(int nqbh, int nhiq, double tc, double tpah) {
    LlmSessionRecord r;
    r.task_id = "t";
    r.nqbh = nqbh;
    r.nhiq = nhiq;
    r.tc_passed_pre_insight = tc;
    r.tpah = tpah;
    r.solved = tpah == 1.0;
    return r;
}

}  // namespace

TEST(QueryEnergy, PerQueryTotal) {
    EXPECT_NEAR(query_energy(1, kProfile).kwh(), 0.011, 1e-15);
    EXPECT_NEAR(query_energy(8, kProfile).kwh(), 0.088, 1e-15);
    EXPECT_NEAR(query_energy(5 + 4.0 / 3, kProfile).kwh(), 0.0696667, 1e-6);
    EXPECT_EQ(query_energy(0, kProfile).joules(), 0.0);
    EXPECT_THROW(query_energy(-1, kProfile), DomainError);
}

TEST(InsightTime, Formula) {
    EXPECT_NEAR(insight_time_s(2361, 0, true), 897.18, 1e-9);
    EXPECT_EQ(insight_time_s(444, 0, false), 0.0);
    EXPECT_EQ(insight_time_s(2000, 1, true), 0.0);
    EXPECT_THROW(insight_time_s(100, 1.5, true), DomainError);
}

TEST(AddFunctionalityTime, Formula) {
    EXPECT_NEAR(add_functionality_time_s(2487, 0, 945), 2487 * 0.168 + 2487 - 945, 1e-9);
    EXPECT_NEAR(add_functionality_time_s(2487, 0, 945), 1959.8, 0.1);
    EXPECT_EQ(add_functionality_time_s(2216, 1, 842), 0.0);
    EXPECT_NEAR(add_functionality_time_s(1783, 0.33, 678), 816.1, 0.5);
    EXPECT_THROW(add_functionality_time_s(100, -0.1, 0), DomainError);
}

TEST(AddFunctionalityTime, ClampedAtZero) {
    // Nearly solved after a long insight: the raw expression goes negative.
    EXPECT_EQ(add_functionality_time_s(1000, 0.99, 380), 0.0);
}

TEST(LlmBreakdown, ComposesComponents) {
    const auto b = llm_breakdown({5, 3, 0, 0}, 2361, kProfile);
    EXPECT_NEAR(b.qec.kwh(), 0.088, 1e-12);
    EXPECT_NEAR(b.t_insight_s, 897.18, 1e-9);
    EXPECT_NEAR(b.t_add_s, 2361 * 1.168 - 897.18, 1e-9);
    EXPECT_DOUBLE_EQ(b.human_energy.joules(), (b.t_insight_s + b.t_add_s) * 4.075);
    EXPECT_DOUBLE_EQ(b.ttec.joules(), (b.qec + b.human_energy).joules());
    EXPECT_NEAR(b.ttec.kwh(), 0.0911, 0.0001);
    EXPECT_EQ(format_grams(b.cf_grams, 2), "19.77");
}

TEST(LlmBreakdown, SolvedOnFirstQuery) {
    const auto b = llm_breakdown({1, 0, 0, 1}, 444, kProfile);
    EXPECT_NEAR(b.ttec.kwh(), 0.011, 1e-12);
    EXPECT_EQ(format_grams(b.cf_grams, 2), "2.39");
}

TEST(LlmBreakdown, ZeroQueryDegenerate) {
    const auto b = llm_breakdown({0, 0, 0, 1}, 1000, kProfile);
    EXPECT_EQ(b.ttec.joules(), 0.0);
    EXPECT_EQ(b.cf_grams, 0.0);
}

TEST(LlmBreakdown, MonotoneInQueries) {
    double prev = -1;
    for (double q = 1; q <= 8; q += 0.25) {
        const double cf = llm_breakdown({std::min(q, 5.0), std::max(0.0, q - 5), 0, 0.5}, 1500, kProfile).cf_grams;
        EXPECT_GE(cf, prev);
        prev = cf;
    }
}

TEST(LlmBreakdown, NonNegativeTimes) {
    for (double tc = 0; tc <= 1.0; tc += 0.1) {
        for (double tpah = 0; tpah <= 1.0; tpah += 0.1) {
            const auto b = llm_breakdown({5, 2, tc, tpah}, 1234, kProfile);
            EXPECT_GE(b.t_insight_s, 0);
            EXPECT_GE(b.t_add_s, 0);
        }
    }
}

// Averaging per-repetition results differs from evaluating the averaged
// metrics once, because add-functionality time is clamped.
TEST(LlmBreakdown, PerRepetitionThenAverage) {
    const std::vector<LlmSessionRecord> runs = {session(5, 3, 0, 0), session(5, 1, 0, 1), session(5, 1, 0, 1)};
    const double mts = 2018;
    const auto per_run = llm_breakdown_per_repetition(runs, mts, kProfile);

    double expected_add = 0, expected_cf = 0;
    for (const auto& r : runs) {
        const auto b = llm_breakdown(means_of(r), mts, kProfile);
        expected_add += b.t_add_s / 3;
        expected_cf += b.cf_grams / 3;
    }
    EXPECT_NEAR(per_run.t_add_s, expected_add, 1e-9);
    EXPECT_NEAR(per_run.cf_grams, expected_cf, 1e-12);

    const SessionMeans averaged{5, 5.0 / 3, 0, 2.0 / 3};
    const auto once = llm_breakdown(averaged, mts, kProfile);
    EXPECT_GT(std::abs(once.t_add_s - per_run.t_add_s), 100.0);
    EXPECT_NEAR(once.qec.kwh(), per_run.qec.kwh(), 1e-12);
}

TEST(LlmBreakdown, PerRepetitionNeedsSessions) {
    EXPECT_THROW(llm_breakdown_per_repetition({}, 100, kProfile), DataError);
}

TEST(LlmBreakdown, QueriesDominate) {
    const double mts[] = {444, 2216, 2361, 2018, 2487, 805, 1437, 1803, 2146, 748, 1300, 1783};
    const double nq[] = {1, 5, 5, 5, 5, 4, 5, 5, 5, 5.0 / 3, 5, 5};
    const double nh[] = {0, 4.0 / 3, 3, 5.0 / 3, 3, 0, 2, 3, 3, 0, 1, 7.0 / 3};
    const double tp[] = {1, 1, 0, .69, 0, 1, 1, .73, .69, 1, 1, .33};
    for (int i = 0; i < 12; ++i) {
        const auto b = llm_breakdown({nq[i], nh[i], 0, tp[i]}, mts[i], kProfile);
        EXPECT_GE(b.qec.joules() / b.ttec.joules(), 0.95) << i;
    }
}

TEST(Means, FromRecordAndSummary) {
    const auto m = means_of(session(5, 2, 0.25, 0.5));
    EXPECT_EQ(m.total_queries(), 7);
    EXPECT_TRUE(m.insight_used());
    RepetitionSummary s;
    s.mean_nqbh = 3;
    s.mean_nhiq = 0;
    s.mean_tpah = 1;
    EXPECT_FALSE(means_of(s).insight_used());
}
