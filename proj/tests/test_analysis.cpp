#include "devcarbon/analysis.hpp"
#include "devcarbon/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace devcarbon;

namespace {

const std::vector<double> kTableRatios = {19.92, 25.53, 30.89, 29.52, 29.30, 43.81,
                                          43.29, 39.45, 33.25, 19.66, 41.02, 36.98};

// Two-sided Student t tail by direct quadrature of the density, after
// substituting x = tan(theta) to map the infinite tail onto a finite range.
double t_tail_by_quadrature(double t, double df) {
    const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * std::numbers::pi);
    auto g = [&](double theta) {
        const double x = std::tan(theta);
        const double sec2 = 1 + x * x;
        return c * std::pow(1 + x * x / df, -(df + 1) / 2) * sec2;
    };
    const double a = std::atan(std::abs(t));
    const double b = std::numbers::pi / 2;
    const int n = 20000;
    const double h = (b - a) / n;
    double sum = g(a) + (df >= 1 ? 0.0 : g(b));
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4 : 2) * g(a + i * h);
    // The endpoint at pi/2 is the limit of g, which is 0 for df > 1 and c for df = 1.
    if (df == 1) sum += c;
    return 2 * sum * h / 3;
}

std::vector<double> random_vector(test::Rng& rng, std::size_t n, bool ties) {
    std::vector<double> v(n);
    for (auto& x : v) x = ties ? std::round(test::uniform(rng, 0, 6)) : test::uniform(rng, -100, 100);
    return v;
}

bool constant(const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; }); }

}  // namespace

TEST(RatioStats, TableRow) {
    const auto m = mean_and_sample_std(kTableRatios);
    EXPECT_NEAR(m.mean, 32.72, 0.005);
    EXPECT_NEAR(m.std_sample, 8.41, 0.005);
}

TEST(RatioStats, ClosedForms) {
    std::vector<ReportRow> same = {make_row("a", 1, 1, 5), make_row("b", 2, 2, 10), make_row("c", 3, 0.5, 2.5)};
    EXPECT_DOUBLE_EQ(ratio_stats(same).std_sample, 0.0);
    std::vector<ReportRow> pair = {make_row("a", 1, 1, 7), make_row("b", 2, 1, 9)};
    EXPECT_DOUBLE_EQ(ratio_stats(pair).mean, 8.0);
    EXPECT_DOUBLE_EQ(ratio_stats(pair).std_sample, std::sqrt(2.0));
}

TEST(RatioStats, Errors) {
    EXPECT_THROW(make_row("z", 1, 0, 3), DomainError);
    std::vector<ReportRow> one = {make_row("a", 1, 1, 7)};
    EXPECT_THROW(ratio_stats(one), DomainError);
    std::vector<ReportRow> bad = {make_row("a", 1, 1, 7), {"b", 1, 0, 3, 0, 3}};
    EXPECT_THROW(ratio_stats(bad), DomainError);
}

TEST(Ranks, AverageOfTiedPositions) {
    EXPECT_EQ(average_ranks(std::vector<double>{1, 2, 2, 3}), (std::vector<double>{1, 2.5, 2.5, 4}));
    EXPECT_EQ(average_ranks(std::vector<double>{5, 5, 5}), (std::vector<double>{2, 2, 2}));
    EXPECT_EQ(average_ranks(std::vector<double>{3, 1, 2}), (std::vector<double>{3, 1, 2}));
}

TEST(Pearson, PerfectLines) {
    std::vector<double> x = {1, 2, 3, 4, 5, 6};
    std::vector<double> y, z;
    for (double v : x) {
        y.push_back(2 * v + 1);
        z.push_back(-v);
    }
    EXPECT_NEAR(pearson(x, y).coefficient, 1.0, 1e-15);
    EXPECT_NEAR(pearson(x, z).coefficient, -1.0, 1e-15);
    EXPECT_EQ(correlation_t_p_value(1.0, 6), 0.0);
}

TEST(Pearson, UndefinedCases) {
    std::vector<double> x = {1, 2, 3};
    std::vector<double> flat = {4, 4, 4};
    std::vector<double> shorter = {1, 2};
    EXPECT_THROW(pearson(x, flat), DomainError);
    EXPECT_THROW(pearson(shorter, shorter), DomainError);
    EXPECT_THROW(pearson(x, shorter), DomainError);
    EXPECT_THROW(spearman(x, flat), DomainError);
}

TEST(Pearson, AffineInvarianceAndSignFlip) {
    test::Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto x = random_vector(rng, 12, false);
        const auto y = random_vector(rng, 12, false);
        std::vector<double> ax, ny;
        for (double v : x) ax.push_back(3.5 * v - 20);
        for (double v : y) ny.push_back(-v);
        const double r = pearson_coefficient(x, y);
        EXPECT_NEAR(pearson_coefficient(ax, y), r, 1e-12);
        EXPECT_NEAR(pearson_coefficient(x, ny), -r, 1e-12);
        EXPECT_LE(std::abs(r), 1.0);
    }
}

TEST(Spearman, MonotoneFunctionGivesOne) {
    std::vector<double> x = {0.5, 1, 2, 3.5, 7, 9};
    std::vector<double> y;
    for (double v : x) y.push_back(std::exp(v) + v * v * v);
    EXPECT_NEAR(spearman(x, y).coefficient, 1.0, 1e-15);
}

TEST(Correlation, MatchesDirectDefinitionOnRandomVectors) {
    test::Rng rng(8);
    int checked = 0;
    for (int i = 0; i < 3000; ++i) {
        const std::size_t n = static_cast<std::size_t>(test::uniform_int(rng, 3, 20));
        const bool ties = test::uniform_int(rng, 0, 2) == 0;
        const auto x = random_vector(rng, n, ties);
        const auto y = random_vector(rng, n, ties);
        if (constant(x) || constant(y)) continue;
        ASSERT_NEAR(pearson_coefficient(x, y), oracle::pearson(x, y), 1e-12);
        ASSERT_NEAR(spearman(x, y).coefficient, oracle::spearman(x, y), 1e-12);
        ++checked;
    }
    EXPECT_GT(checked, 2500);
}

TEST(Correlation, SpearmanInvariantUnderMonotoneTransforms) {
    test::Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = static_cast<std::size_t>(test::uniform_int(rng, 3, 20));
        const auto x = random_vector(rng, n, i % 3 == 0);
        const auto y = random_vector(rng, n, i % 3 == 0);
        if (constant(x) || constant(y)) continue;
        std::vector<double> fx, gy;
        for (double v : x) fx.push_back(std::atan(v / 10) * 5 + 2);
        for (double v : y) gy.push_back(v * v * v + v);
        ASSERT_NEAR(spearman(fx, gy).coefficient, spearman(x, y).coefficient, 1e-12);
    }
}

TEST(IncompleteBeta, ClosedForms) {
    for (double x : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
        EXPECT_NEAR(regularized_incomplete_beta(1, 1, x), x, 1e-14);
        EXPECT_NEAR(regularized_incomplete_beta(3, 1, x), x * x * x, 1e-14);
        EXPECT_NEAR(regularized_incomplete_beta(1, 4, x), 1 - std::pow(1 - x, 4), 1e-14);
        EXPECT_NEAR(regularized_incomplete_beta(2.5, 7.25, x), 1 - regularized_incomplete_beta(7.25, 2.5, 1 - x), 1e-13);
    }
    EXPECT_THROW(regularized_incomplete_beta(0, 1, 0.5), DomainError);
}

TEST(StudentT, MatchesQuadrature) {
    for (double df : {1.0, 2.0, 5.0, 10.0, 30.0}) {
        for (double t : {0.0, 0.3, 1.0, 2.2, 4.5, 6.17}) {
            EXPECT_NEAR(student_t_two_sided_p(t, df), t_tail_by_quadrature(t, df), 1e-9) << "t=" << t << " df=" << df;
        }
    }
    // Cauchy closed form.
    EXPECT_NEAR(student_t_two_sided_p(1.0, 1), 0.5, 1e-14);
    EXPECT_EQ(student_t_two_sided_p(INFINITY, 4), 0.0);
    EXPECT_NEAR(student_t_two_sided_p(-2.0, 7), student_t_two_sided_p(2.0, 7), 1e-15);
}

TEST(StudentT, PValuesInUnitInterval) {
    test::Rng rng(21);
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = static_cast<std::size_t>(test::uniform_int(rng, 3, 20));
        const auto x = random_vector(rng, n, false);
        const auto y = random_vector(rng, n, false);
        const auto c = pearson(x, y);
        EXPECT_GT(c.p_value, 0.0);
        EXPECT_LE(c.p_value, 1.0);
    }
}

TEST(Permutation, ExactEnumeration) {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y = {2, 4, 6, 8, 10};
    // Only the identity and the full reversal reach |r| = 1.
    EXPECT_NEAR(pearson(x, y, PValueMethod::permutation).p_value, 2.0 / 120, 1e-15);
    EXPECT_NEAR(spearman(x, y, PValueMethod::permutation).p_value, 2.0 / 120, 1e-15);
}

TEST(Permutation, SampledModeIsSeeded) {
    test::Rng rng(4);
    const auto x = random_vector(rng, 12, false);
    auto y = x;
    for (auto& v : y) v += test::uniform(rng, -30, 30);
    PermutationOptions perm{10, 2000, 42};
    const double p1 = pearson(x, y, PValueMethod::permutation, perm).p_value;
    const double p2 = pearson(x, y, PValueMethod::permutation, perm).p_value;
    EXPECT_EQ(p1, p2);
    EXPECT_GT(p1, 0.0);
    perm.seed = 43;
    EXPECT_NEAR(pearson(x, y, PValueMethod::permutation, perm).p_value, p1, 0.05);
}

TEST(LeastSquares, Line) {
    std::vector<double> x = {0, 1, 2, 3};
    std::vector<double> y = {1, 3, 5, 7};
    const auto f = least_squares(x, y);
    EXPECT_NEAR(f.slope, 2, 1e-15);
    EXPECT_NEAR(f.intercept, 1, 1e-15);
    std::vector<double> flat = {2, 2};
    EXPECT_THROW(least_squares(flat, flat), DomainError);
}

TEST(Report, UndefinedStatisticsBecomeNotes) {
    auto report = build_report({make_row("a", 10, 1, 2), make_row("b", 20, 1, 4)});
    EXPECT_TRUE(report.ratio);
    EXPECT_FALSE(report.pearson);
    EXPECT_FALSE(report.spearman);
    EXPECT_TRUE(report.fit);
    EXPECT_EQ(report.notes.size(), 2u);
    const auto j = report_to_json(report);
    EXPECT_TRUE(j["pearson"].is_null());
    EXPECT_EQ(j["rows"].size(), 2u);
}

TEST(Scatter, CsvCardinality) {
    std::vector<ReportRow> rows;
    for (int i = 0; i < 12; ++i) rows.push_back(make_row("t" + std::to_string(i), 100.0 * i, 1, 2 + i));
    std::ostringstream out;
    write_scatter_csv(out, rows);
    const std::string s = out.str();
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 13);
    EXPECT_EQ(s.substr(0, s.find('\n')), "mts_s,difference_g");

    std::ostringstream empty;
    write_scatter_csv(empty, {});
    EXPECT_EQ(empty.str(), "mts_s,difference_g\n");
}

TEST(Scatter, JsonCarriesFitAndOverlay) {
    std::vector<ReportRow> rows = {make_row("a", 100, 1, 3), make_row("b", 200, 1, 5), make_row("c", 300, 1, 7)};
    const auto j = scatter_json(rows, 2.387, 8);
    EXPECT_EQ(j["points"].size(), 3u);
    EXPECT_NEAR(j["best_fit"]["slope"].get<double>(), 0.02, 1e-12);
    EXPECT_EQ(j["expected_pattern"]["fitted"], false);
    EXPECT_NEAR(j["expected_pattern"]["max_query_footprint_g"].get<double>(), 8 * 2.387, 1e-12);
    EXPECT_TRUE(scatter_json({}, 1.0)["best_fit"].is_null());
}
