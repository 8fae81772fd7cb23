#include "devcarbon/analysis.hpp"

#include "devcarbon/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace devcarbon {

namespace {

void require_pairs(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("correlation inputs differ in length");
    if (x.size() < 3) throw DomainError("correlation needs at least 3 points");
}

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iterations = 500;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return h;
}

template <typename Statistic>
double permutation_p_value(std::span<const double> x, std::span<const double> y, Statistic statistic,
                           const PermutationOptions& perm) {
    const double observed = std::abs(statistic(x, y));
    const double slack = 1e-12;
    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> shuffled(y.size());
    auto extreme = [&] {
        for (std::size_t i = 0; i < order.size(); ++i) shuffled[i] = y[order[i]];
        return std::abs(statistic(x, std::span<const double>(shuffled))) >= observed - slack;
    };

    if (y.size() <= perm.max_exact_n) {
        std::uint64_t hits = 0, total = 0;
        do {
            ++total;
            if (extreme()) ++hits;
        } while (std::next_permutation(order.begin(), order.end()));
        return static_cast<double>(hits) / static_cast<double>(total);
    }

    std::mt19937_64 rng(perm.seed);
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < perm.resamples; ++i) {
        std::shuffle(order.begin(), order.end(), rng);
        if (extreme()) ++hits;
    }
    return static_cast<double>(hits + 1) / static_cast<double>(perm.resamples + 1);
}

std::string number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <typename T, typename F>
nlohmann::json optional_json(const std::optional<T>& v, F&& f) {
    return v ? f(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string_view to_string(PValueMethod method) {
    return method == PValueMethod::permutation ? "permutation" : "t_approximation";
}

ReportRow make_row(std::string task_id, double mts_s, double cf_manual_g, double cf_llm_g) {
    if (!(cf_manual_g > 0.0)) throw DomainError("task " + task_id + ": manual carbon footprint must be positive");
    return {std::move(task_id), mts_s, cf_manual_g, cf_llm_g, cf_llm_g / cf_manual_g, cf_llm_g - cf_manual_g};
}

MeanStd mean_and_sample_std(std::span<const double> values) {
    if (values.size() < 2) throw DomainError("sample standard deviation needs at least 2 values");
    const double mu = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mu) * (v - mu);
    return {mu, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

MeanStd ratio_stats(std::span<const ReportRow> rows) {
    std::vector<double> ratios;
    for (const auto& r : rows) {
        if (!(r.cf_manual_g > 0.0)) throw DomainError("task " + r.task_id + ": manual carbon footprint must be positive");
        ratios.push_back(r.cf_llm_g / r.cf_manual_g);
    }
    return mean_and_sample_std(ratios);
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double pearson_coefficient(std::span<const double> x, std::span<const double> y) {
    require_pairs(x, y);
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw DomainError("correlation is undefined for a constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta needs positive shape parameters");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
    return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw DomainError("degrees of freedom must be positive");
    if (std::isnan(t)) throw DomainError("t statistic is NaN");
    if (std::isinf(t)) return 0.0;
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double correlation_t_p_value(double r, std::size_t n) {
    if (n < 3) throw DomainError("correlation needs at least 3 points");
    if (std::abs(r) >= 1.0) return 0.0;
    const double df = static_cast<double>(n - 2);
    return student_t_two_sided_p(r * std::sqrt(df / (1.0 - r * r)), df);
}

Correlation pearson(std::span<const double> x, std::span<const double> y, PValueMethod method,
                    const PermutationOptions& perm) {
    const double r = pearson_coefficient(x, y);
    if (method == PValueMethod::permutation) return {r, permutation_p_value(x, y, pearson_coefficient, perm)};
    return {r, correlation_t_p_value(r, x.size())};
}

Correlation spearman(std::span<const double> x, std::span<const double> y, PValueMethod method,
                     const PermutationOptions& perm) {
    require_pairs(x, y);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry, method, perm);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("least squares needs at least 2 paired points");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw DomainError("least squares is undefined for constant x");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

ComparisonReport build_report(std::vector<ReportRow> rows, PValueMethod method, const PermutationOptions& perm) {
    ComparisonReport report;
    report.rows = std::move(rows);
    report.p_method = method;

    std::vector<double> x, y;
    for (const auto& r : report.rows) {
        x.push_back(r.mts_s);
        y.push_back(r.difference_g);
    }
    auto attempt = [&](auto&& compute, const char* what) {
        try {
            compute();
        } catch (const DomainError& e) {
            report.notes.push_back(std::string(what) + ": " + e.what());
        }
    };
    attempt([&] { report.ratio = ratio_stats(report.rows); }, "ratio statistics");
    attempt([&] { report.pearson = pearson(x, y, method, perm); }, "pearson");
    attempt([&] { report.spearman = spearman(x, y, method, perm); }, "spearman");
    attempt([&] { report.fit = least_squares(x, y); }, "best-fit line");
    return report;
}

nlohmann::json report_to_json(const ComparisonReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"task_id", r.task_id},
                        {"mts_s", r.mts_s},
                        {"cf_manual_g", r.cf_manual_g},
                        {"cf_llm_g", r.cf_llm_g},
                        {"ratio", r.ratio},
                        {"difference_g", r.difference_g}});
    }
    auto corr = [](const Correlation& c) { return nlohmann::json{{"coefficient", c.coefficient}, {"p_value", c.p_value}}; };
    return {{"rows", rows},
            {"ratio", optional_json(report.ratio,
                                    [](const MeanStd& m) {
                                        return nlohmann::json{{"mean", m.mean}, {"std_sample", m.std_sample}};
                                    })},
            {"pearson", optional_json(report.pearson, corr)},
            {"spearman", optional_json(report.spearman, corr)},
            {"best_fit", optional_json(report.fit,
                                       [](const LinearFit& f) {
                                           return nlohmann::json{{"slope", f.slope}, {"intercept", f.intercept}};
                                       })},
            {"p_method", to_string(report.p_method)},
            {"notes", report.notes}};
}

void write_scatter_csv(std::ostream& out, std::span<const ReportRow> rows) {
    out << "mts_s,difference_g\n";
    for (const auto& r : rows) out << number(r.mts_s) << ',' << number(r.difference_g) << '\n';
}

nlohmann::json scatter_json(std::span<const ReportRow> rows, double g_per_query, int max_queries) {
    nlohmann::json points = nlohmann::json::array();
    std::vector<double> x, y;
    for (const auto& r : rows) {
        points.push_back({{"task_id", r.task_id}, {"mts_s", r.mts_s}, {"difference_g", r.difference_g}});
        x.push_back(r.mts_s);
        y.push_back(r.difference_g);
    }
    nlohmann::json fit = nullptr;
    try {
        const auto f = least_squares(x, y);
        fit = {{"slope", f.slope}, {"intercept", f.intercept}};
    } catch (const DomainError&) {
    }
    // Not fitted: the protocol's query limits bound the LLM footprint, which
    // is why the expected shape saturates at both ends.
    nlohmann::json overlay = {{"shape", "tanh"},
                              {"fitted", false},
                              {"min_queries", 1},
                              {"max_queries", max_queries},
                              {"min_query_footprint_g", 1 * g_per_query},
                              {"max_query_footprint_g", max_queries * g_per_query}};
    return {{"points", points}, {"best_fit", fit}, {"expected_pattern", overlay}};
}

}  // namespace devcarbon
