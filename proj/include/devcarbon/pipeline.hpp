#pragma once

#include "devcarbon/analysis.hpp"
#include "devcarbon/ingest.hpp"
#include "devcarbon/llm_estimate.hpp"
#include "devcarbon/manual.hpp"
#include "devcarbon/settings.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace devcarbon {

/// Task-level inputs read from a fixture file. A fixture is either a contest
/// dump ({contest_id, tasks, submissions}) that still needs aggregating, or a
/// precomputed document with an "aggregates" array and optionally
/// "llm_means" (session means keyed by task id).
struct TaskInputs {
    std::vector<TaskAggregates> aggregates;
    std::map<std::string, SessionMeans> llm_means;
    std::vector<ExcludedTask> excluded;
    std::vector<std::string> warnings;

    const TaskAggregates* find(std::string_view task_id) const;
};

TaskInputs parse_task_inputs(std::string_view json_text, const AggregationOptions& options);
TaskInputs load_task_inputs(const std::filesystem::path& path, const AggregationOptions& options);

struct ManualRow {
    TaskAggregates task;
    ManualBreakdown breakdown;
};

struct LlmRow {
    std::string task_id;
    SessionMeans means;
    LlmBreakdown breakdown;
};

std::vector<ManualRow> run_manual(std::span<const TaskAggregates> tasks, const Settings& settings);

/// Aggregate-first evaluation on session means.
std::vector<LlmRow> run_llm_from_means(std::span<const TaskAggregates> tasks,
                                       const std::map<std::string, SessionMeans>& means, const Settings& settings);

/// Per-repetition evaluation, averaged, on recorded session logs.
std::vector<LlmRow> run_llm_from_sessions(std::span<const TaskAggregates> tasks,
                                          std::span<const RepetitionSummary> sessions, const Settings& settings);

/// Every *.json session log directly inside `dir`, in file-name order.
std::vector<RepetitionSummary> load_session_logs(const std::filesystem::path& dir);

// CSV outputs. Columns follow the published table row order; numbers are
// written in shortest round-trip form.
std::string render_manual_csv(std::span<const ManualRow> rows);
std::string render_llm_csv(std::span<const LlmRow> rows);

/// Human-readable tables using report rounding.
std::string render_manual_table(std::span<const ManualRow> rows);
std::string render_llm_table(std::span<const LlmRow> rows);

struct FootprintEntry {
    std::string task_id;
    double mts_s = 0.0;  // only meaningful for manual CSVs
    double cf_g = 0.0;
};

/// Reads task_id, cf_g (and mts_s when present) from a stage CSV.
std::vector<FootprintEntry> parse_footprint_csv(std::string_view text, std::string_view origin);

/// Joins manual and LLM rows on task id (manual order) and builds the report.
/// Tasks present on only one side raise DataError.
ComparisonReport compare_footprints(std::span<const FootprintEntry> manual, std::span<const FootprintEntry> llm,
                                    PValueMethod method = PValueMethod::t_approximation,
                                    const PermutationOptions& perm = {});

std::string format_number(double v);

}  // namespace devcarbon
