#include "devcarbon/ingest.hpp"

#include "devcarbon/error.hpp"
#include "text_util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

namespace devcarbon {

namespace {

bool counts_for_aggregates(const SubmissionRecord& r) {
    return r.participant_type == "CONTESTANT" || r.participant_type == "OUT_OF_COMPETITION";
}

std::map<std::string, std::size_t, std::less<>> positions(std::span<const std::string> task_order) {
    std::map<std::string, std::size_t, std::less<>> pos;
    for (std::size_t i = 0; i < task_order.size(); ++i) pos.emplace(task_order[i], i);
    return pos;
}

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Per (participant, task) summary of what happened up to first acceptance.
struct Attempts {
    std::optional<std::size_t> first_accepted;  // index into the sorted records
    int submissions_until_accepted = 0;
};

}  // namespace

std::vector<std::string> ContestFixture::task_order() const {
    std::vector<std::string> order;
    order.reserve(tasks.size());
    for (const auto& t : tasks) order.push_back(t.index);
    return order;
}

std::string TaskAggregates::task_id() const { return std::to_string(contest_id) + task_index; }

bool language_matches(std::string_view language_tag, std::string_view filter) {
    const std::string f = detail::to_lower(detail::trim(filter));
    if (f.empty() || f == "all") return true;
    const std::string tag = detail::to_lower(language_tag);
    if (f == "python") {
        return tag.find("python") != std::string::npos || tag.find("pypy") != std::string::npos;
    }
    return tag.find(f) != std::string::npos;
}

std::vector<ParticipantTimeline> build_timelines(std::span<const SubmissionRecord> records,
                                                 std::span<const std::string> task_order) {
    const auto pos = positions(task_order);
    std::map<std::string, std::map<std::size_t, double>> first;
    for (const auto& r : records) {
        auto it = pos.find(r.task_index);
        if (it == pos.end()) throw DataError("submission references unknown task '" + r.task_index + "'");
        if (r.verdict != Verdict::accepted) continue;
        auto& slot = first[r.participant_id];
        auto [entry, inserted] = slot.emplace(it->second, r.relative_time_s);
        if (!inserted) entry->second = std::min(entry->second, r.relative_time_s);
    }

    std::vector<ParticipantTimeline> out;
    out.reserve(first.size());
    for (auto& [participant, by_task] : first) {
        ParticipantTimeline t{participant, {}};
        for (auto [index, time] : by_task) t.solved.push_back({task_order[index], time});
        out.push_back(std::move(t));
    }
    return out;
}

bool is_sequential(const ParticipantTimeline& timeline, std::span<const std::string> task_order) {
    if (timeline.solved.size() > task_order.size()) return false;
    for (std::size_t i = 0; i < timeline.solved.size(); ++i) {
        if (timeline.solved[i].task_index != task_order[i]) return false;
        if (i > 0 && !(timeline.solved[i].time_s > timeline.solved[i - 1].time_s)) return false;
    }
    return true;
}

std::vector<ParticipantTimeline> filter_sequential(std::span<const ParticipantTimeline> timelines,
                                                   std::span<const std::string> task_order) {
    std::vector<ParticipantTimeline> kept;
    for (const auto& t : timelines) {
        if (is_sequential(t, task_order)) kept.push_back(t);
    }
    return kept;
}

std::vector<double> per_task_times(const ParticipantTimeline& timeline) {
    std::vector<double> times;
    times.reserve(timeline.solved.size());
    double previous = 0.0;
    for (const auto& s : timeline.solved) {
        times.push_back(s.time_s - previous);
        previous = s.time_s;
    }
    return times;
}

OutlierFilterResult filter_outliers(std::span<const double> durations) {
    OutlierFilterResult result;
    if (durations.size() < 3) {
        result.kept.assign(durations.begin(), durations.end());
        return result;
    }
    const double mu = mean_of(durations);
    double ss = 0.0;
    double scale = 0.0;
    for (double d : durations) {
        ss += (d - mu) * (d - mu);
        scale = std::max(scale, std::abs(d));
    }
    const double sigma = std::sqrt(ss / static_cast<double>(durations.size() - 1));
    // Rounding slack so that all-equal inputs (sigma = 0) survive.
    const double bound = 2.0 * sigma + 8.0 * std::numeric_limits<double>::epsilon() * scale;
    for (double d : durations) {
        if (std::abs(d - mu) <= bound) result.kept.push_back(d);
    }
    result.applied = true;
    return result;
}

AggregationResult compute_aggregates(const ContestFixture& fixture, const AggregationOptions& options) {
    if (fixture.tasks.empty()) throw DataError("fixture lists no tasks");
    if (!(options.ram_capacity_bytes > 0.0)) throw ConfigError("RAM capacity must be positive");

    const auto order = fixture.task_order();
    const auto pos = positions(order);

    std::vector<SubmissionRecord> records;
    for (const auto& r : fixture.submissions) {
        if (r.relative_time_s < 0 || r.runtime_ms < 0 || r.memory_bytes < 0) {
            throw DataError("submission by '" + r.participant_id + "' has a negative time or resource value");
        }
        if (!pos.contains(r.task_index)) throw DataError("submission references unknown task '" + r.task_index + "'");
        if (counts_for_aggregates(r)) records.push_back(r);
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const auto& a, const auto& b) { return a.relative_time_s < b.relative_time_s; });

    // (participant, task position) -> attempts up to first acceptance
    std::map<std::pair<std::string, std::size_t>, Attempts> attempts;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        auto& a = attempts[{r.participant_id, pos.find(r.task_index)->second}];
        if (a.first_accepted) continue;
        ++a.submissions_until_accepted;
        if (r.verdict == Verdict::accepted) a.first_accepted = i;
    }

    const auto timelines = filter_sequential(build_timelines(records, order), order);

    struct PerTask {
        int solvers = 0;
        std::vector<double> durations;
        std::vector<double> runtimes_s;
        std::vector<double> submissions;
        std::vector<double> mem_fractions;
    };
    std::vector<PerTask> per_task(order.size());

    for (const auto& [key, a] : attempts) {
        if (!a.first_accepted) continue;
        auto& slot = per_task[key.second];
        ++slot.solvers;
        const auto& accepted = records[*a.first_accepted];
        if (!language_matches(accepted.language, options.language)) continue;
        slot.runtimes_s.push_back(accepted.runtime_ms / 1000.0);
        slot.submissions.push_back(a.submissions_until_accepted);
        const double fraction = accepted.memory_bytes / options.ram_capacity_bytes;
        if (fraction > 1.0) throw DataError("accepted submission uses more memory than the configured RAM capacity");
        slot.mem_fractions.push_back(fraction);
    }

    for (const auto& t : timelines) {
        const auto times = per_task_times(t);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto& key = std::make_pair(t.participant_id, i);
            const auto& accepted = records[*attempts.at(key).first_accepted];
            if (language_matches(accepted.language, options.language)) per_task[i].durations.push_back(times[i]);
        }
    }

    AggregationResult result;
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto& slot = per_task[i];
        auto exclude = [&](std::string reason) {
            result.excluded.push_back({order[i], slot.solvers, std::move(reason)});
        };
        if (slot.solvers < options.min_solvers) {
            exclude("solved by " + std::to_string(slot.solvers) + " participants, fewer than " +
                    std::to_string(options.min_solvers));
            continue;
        }
        if (slot.runtimes_s.empty()) {
            exclude("no accepted submissions in language '" + options.language + "'");
            continue;
        }
        auto filtered = filter_outliers(slot.durations);
        if (!filtered.applied) {
            result.warnings.push_back("task " + order[i] + ": fewer than 3 sequential durations, outlier filter skipped");
        }
        if (filtered.kept.empty()) {
            exclude("no sequential solvers to attribute time to");
            continue;
        }
        TaskAggregates agg;
        agg.contest_id = fixture.contest_id;
        agg.task_index = order[i];
        agg.solver_count = slot.solvers;
        agg.mts_s = mean_of(filtered.kept);
        agg.mean_runtime_s = mean_of(slot.runtimes_s);
        agg.mean_submission_count = mean_of(slot.submissions);
        agg.mean_mem_fraction = mean_of(slot.mem_fractions);
        if (!(agg.mts_s > 0.0)) {
            exclude("mean time spent is not positive");
            continue;
        }
        result.included.push_back(agg);
    }
    return result;
}

void to_json(nlohmann::json& j, const SubmissionRecord& r) {
    j = nlohmann::json{{"participant_id", r.participant_id},
                       {"task_index", r.task_index},
                       {"relative_time_s", r.relative_time_s},
                       {"verdict", r.verdict == Verdict::accepted ? "accepted" : "rejected"},
                       {"runtime_ms", r.runtime_ms},
                       {"memory_bytes", r.memory_bytes},
                       {"language", r.language},
                       {"participant_type", r.participant_type}};
}

void from_json(const nlohmann::json& j, SubmissionRecord& r) {
    j.at("participant_id").get_to(r.participant_id);
    j.at("task_index").get_to(r.task_index);
    j.at("relative_time_s").get_to(r.relative_time_s);
    const auto verdict = j.at("verdict").get<std::string>();
    if (verdict == "accepted") {
        r.verdict = Verdict::accepted;
    } else if (verdict == "rejected") {
        r.verdict = Verdict::rejected;
    } else {
        throw DataError("unknown verdict '" + verdict + "'");
    }
    j.at("runtime_ms").get_to(r.runtime_ms);
    j.at("memory_bytes").get_to(r.memory_bytes);
    r.language = j.value("language", std::string{});
    r.participant_type = j.value("participant_type", std::string{"CONTESTANT"});
}

void to_json(nlohmann::json& j, const ContestFixture& f) {
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto& t : f.tasks) tasks.push_back({{"index", t.index}, {"name", t.name}});
    j = nlohmann::json{{"contest_id", f.contest_id}, {"tasks", tasks}, {"submissions", f.submissions}};
}

void from_json(const nlohmann::json& j, ContestFixture& f) {
    j.at("contest_id").get_to(f.contest_id);
    f.tasks.clear();
    for (const auto& t : j.at("tasks")) f.tasks.push_back({t.at("index").get<std::string>(), t.value("name", "")});
    j.at("submissions").get_to(f.submissions);
}

void to_json(nlohmann::json& j, const TaskAggregates& a) {
    j = nlohmann::json{{"contest_id", a.contest_id},
                       {"task_index", a.task_index},
                       {"solver_count", a.solver_count},
                       {"mts_s", a.mts_s},
                       {"mean_runtime_s", a.mean_runtime_s},
                       {"mean_submission_count", a.mean_submission_count},
                       {"mean_mem_fraction", a.mean_mem_fraction}};
}

void from_json(const nlohmann::json& j, TaskAggregates& a) {
    j.at("contest_id").get_to(a.contest_id);
    j.at("task_index").get_to(a.task_index);
    a.solver_count = j.value("solver_count", 0);
    j.at("mts_s").get_to(a.mts_s);
    j.at("mean_runtime_s").get_to(a.mean_runtime_s);
    j.at("mean_submission_count").get_to(a.mean_submission_count);
    j.at("mean_mem_fraction").get_to(a.mean_mem_fraction);
    if (a.mts_s < 0 || a.mean_runtime_s < 0 || a.mean_submission_count < 0 || a.mean_mem_fraction < 0 ||
        a.mean_mem_fraction > 1) {
        throw DataError("aggregates for task " + a.task_id() + " are out of range");
    }
}

void to_json(nlohmann::json& j, const ExcludedTask& e) {
    j = nlohmann::json{{"task_index", e.task_index}, {"solver_count", e.solver_count}, {"reason", e.reason}};
}

void to_json(nlohmann::json& j, const AggregationResult& r) {
    j = nlohmann::json{{"aggregates", r.included}, {"excluded", r.excluded}, {"warnings", r.warnings}};
}

}  // namespace devcarbon
