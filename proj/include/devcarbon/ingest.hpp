#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace devcarbon {

enum class Verdict { accepted, rejected };

struct SubmissionRecord {
    std::string participant_id;
    std::string task_index;
    double relative_time_s = 0.0;  // seconds since contest start
    Verdict verdict = Verdict::rejected;
    double runtime_ms = 0.0;
    double memory_bytes = 0.0;
    std::string language;
    // Codeforces participant type; only CONTESTANT and OUT_OF_COMPETITION
    // submissions enter the aggregates.
    std::string participant_type = "CONTESTANT";
};

struct TaskInfo {
    std::string index;
    std::string name;
};

/// One contest as persisted on disk, before any filtering.
struct ContestFixture {
    std::int64_t contest_id = 0;
    std::vector<TaskInfo> tasks;  // contest order
    std::vector<SubmissionRecord> submissions;

    std::vector<std::string> task_order() const;
};

struct SolvedTask {
    std::string task_index;
    double time_s = 0.0;  // first accepted relative time
};

/// First-accepted times of one participant, in contest task order.
struct ParticipantTimeline {
    std::string participant_id;
    std::vector<SolvedTask> solved;
};

struct TaskAggregates {
    std::int64_t contest_id = 0;
    std::string task_index;
    int solver_count = 0;
    double mts_s = 0.0;
    double mean_runtime_s = 0.0;
    double mean_submission_count = 0.0;
    double mean_mem_fraction = 0.0;

    /// "1983A" style identifier.
    std::string task_id() const;
};

struct ExcludedTask {
    std::string task_index;
    int solver_count = 0;
    std::string reason;
};

struct AggregationOptions {
    int min_solvers = 1000;
    // "all" disables the filter; "python" also matches PyPy tags; anything
    // else is a case-insensitive substring of the language tag.
    std::string language = "python";
    double ram_capacity_bytes = 16.0 * 1024 * 1024 * 1024;
};

struct AggregationResult {
    std::vector<TaskAggregates> included;
    std::vector<ExcludedTask> excluded;
    std::vector<std::string> warnings;
};

struct OutlierFilterResult {
    std::vector<double> kept;
    bool applied = false;  // false when fewer than 3 points were given
};

bool language_matches(std::string_view language_tag, std::string_view filter);

/// Builds first-accepted timelines from the accepted submissions in `records`.
/// Tasks missing from `task_order` raise DataError.
std::vector<ParticipantTimeline> build_timelines(std::span<const SubmissionRecord> records,
                                                 std::span<const std::string> task_order);

/// True when the solved tasks form a prefix of `task_order` and their
/// first-accepted times strictly increase along it.
bool is_sequential(const ParticipantTimeline& timeline, std::span<const std::string> task_order);

std::vector<ParticipantTimeline> filter_sequential(std::span<const ParticipantTimeline> timelines,
                                                   std::span<const std::string> task_order);

/// Telescoped time per solved task; the first task is measured from 0.
std::vector<double> per_task_times(const ParticipantTimeline& timeline);

/// Single pass: drops points outside [mean - 2s, mean + 2s] using the sample
/// standard deviation. Fewer than 3 points are returned unchanged.
OutlierFilterResult filter_outliers(std::span<const double> durations);

AggregationResult compute_aggregates(const ContestFixture& fixture, const AggregationOptions& options);

void to_json(nlohmann::json& j, const SubmissionRecord& r);
void from_json(const nlohmann::json& j, SubmissionRecord& r);
void to_json(nlohmann::json& j, const ContestFixture& f);
void from_json(const nlohmann::json& j, ContestFixture& f);
void to_json(nlohmann::json& j, const TaskAggregates& a);
void from_json(const nlohmann::json& j, TaskAggregates& a);
void to_json(nlohmann::json& j, const ExcludedTask& e);
void to_json(nlohmann::json& j, const AggregationResult& r);

}  // namespace devcarbon
