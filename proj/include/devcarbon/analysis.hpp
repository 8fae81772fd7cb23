#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace devcarbon {

struct ReportRow {
    std::string task_id;
    double mts_s = 0.0;
    double cf_manual_g = 0.0;
    double cf_llm_g = 0.0;
    double ratio = 0.0;         // cf_llm / cf_manual
    double difference_g = 0.0;  // cf_llm - cf_manual
};

/// Throws DomainError when the manual footprint is not positive.
ReportRow make_row(std::string task_id, double mts_s, double cf_manual_g, double cf_llm_g);

struct MeanStd {
    double mean = 0.0;
    double std_sample = 0.0;  // n - 1 denominator
};

struct Correlation {
    double coefficient = 0.0;
    double p_value = 1.0;  // two-sided
};

enum class PValueMethod { t_approximation, permutation };

/// Permutation testing enumerates all n! orderings up to max_exact_n and
/// otherwise draws `resamples` seeded shuffles.
struct PermutationOptions {
    std::size_t max_exact_n = 10;
    std::size_t resamples = 100000;
    std::uint64_t seed = 0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Statistics that are undefined for the given rows (too few points, zero
/// variance) stay empty and are explained in `notes`.
struct ComparisonReport {
    std::vector<ReportRow> rows;
    std::optional<MeanStd> ratio;
    std::optional<Correlation> pearson;
    std::optional<Correlation> spearman;
    std::optional<LinearFit> fit;  // difference_g against mts_s
    PValueMethod p_method = PValueMethod::t_approximation;
    std::vector<std::string> notes;
};

MeanStd mean_and_sample_std(std::span<const double> values);

/// Mean and sample standard deviation of the rows' ratios; needs >= 2 rows.
MeanStd ratio_stats(std::span<const ReportRow> rows);

/// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Product-moment coefficient. Throws DomainError for mismatched lengths,
/// n < 3, or zero variance in either input.
double pearson_coefficient(std::span<const double> x, std::span<const double> y);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail probability of Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// p-value of a correlation coefficient from t = r sqrt((n-2)/(1-r^2)).
double correlation_t_p_value(double r, std::size_t n);

Correlation pearson(std::span<const double> x, std::span<const double> y,
                    PValueMethod method = PValueMethod::t_approximation, const PermutationOptions& perm = {});

/// Pearson over average ranks.
Correlation spearman(std::span<const double> x, std::span<const double> y,
                     PValueMethod method = PValueMethod::t_approximation, const PermutationOptions& perm = {});

/// Ordinary least squares y = slope * x + intercept. Needs >= 2 points and
/// non-constant x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

ComparisonReport build_report(std::vector<ReportRow> rows, PValueMethod method = PValueMethod::t_approximation,
                              const PermutationOptions& perm = {});

nlohmann::json report_to_json(const ComparisonReport& report);

/// `mts_s,difference_g` header plus one line per row.
void write_scatter_csv(std::ostream& out, std::span<const ReportRow> rows);

/// Points, the least-squares line, and the bounded-curve overlay hint.
/// `g_per_query` converts the 1- and `max_queries`-query protocol limits to grams.
nlohmann::json scatter_json(std::span<const ReportRow> rows, double g_per_query, int max_queries = 8);

std::string_view to_string(PValueMethod method);

}  // namespace devcarbon
