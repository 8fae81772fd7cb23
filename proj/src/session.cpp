#include "devcarbon/session.hpp"

#include "devcarbon/io.hpp"
#include "text_util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace devcarbon {

namespace {

bool is_fence(std::string_view line) { return detail::trim(line).starts_with("```"); }

QueryKind query_kind_from(std::string_view s) {
    if (s == "initial") return QueryKind::initial;
    if (s == "repair") return QueryKind::repair;
    if (s == "insight") return QueryKind::insight;
    throw DataError("unknown query kind '" + std::string(s) + "'");
}

}  // namespace

void VerdictReport::validate() const {
    if (tests_total < 1 || tests_passed < 0 || tests_passed > tests_total) {
        throw DataError("verdict must satisfy 0 <= tests_passed <= tests_total and tests_total >= 1");
    }
}

std::string_view to_string(QueryKind kind) {
    switch (kind) {
    case QueryKind::initial: return "initial";
    case QueryKind::repair: return "repair";
    case QueryKind::insight: return "insight";
    }
    return "initial";
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
    try {
        return {read_text_file(dir / "initial.txt"), read_text_file(dir / "repair.txt"),
                read_text_file(dir / "insight.txt")};
    } catch (const DataError& e) {
        throw UsageError(std::string("prompt templates: ") + e.what());
    }
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        auto open = tmpl.find("{{", i);
        if (open == std::string_view::npos) break;
        auto close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) break;
        out.append(tmpl.substr(i, open - i));
        auto name = tmpl.substr(open + 2, close - open - 2);
        if (auto it = values.find(name); it != values.end()) {
            out += it->second;
        } else {
            out.append(tmpl.substr(open, close + 2 - open));
        }
        i = close + 2;
    }
    out.append(tmpl.substr(std::min(i, tmpl.size())));
    return out;
}

std::optional<std::string> extract_code(std::string_view response) {
    std::optional<std::string> last;
    std::optional<std::string> current;
    for (std::string_view line : detail::split_lines(response)) {
        if (is_fence(line)) {
            if (current) {
                last = std::move(current);
                current.reset();
            } else {
                current.emplace();
            }
            continue;
        }
        if (current) {
            current->append(line);
            current->push_back('\n');
        }
    }
    if (current) last = std::move(current);
    return last;
}

LlmSessionRecord run_session(const TaskPrompt& task, LlmClient& llm, Judge& judge, const PromptTemplates& templates,
                             const WorkflowConstants& constants) {
    if (detail::trim(task.statement).empty()) throw DataError("task " + task.task_id + ": statement is empty");
    constants.validate();

    LlmSessionRecord record;
    record.task_id = task.task_id;
    Conversation conversation;

    auto query = [&](QueryKind kind, std::string prompt) -> VerdictReport {
        conversation.push_back({Role::user, prompt});
        std::string response;
        try {
            response = llm.send(conversation);
        } catch (const Error& e) {
            throw SessionError(e.kind(), "task " + task.task_id + ": LLM query failed: " + e.what(), record);
        } catch (const std::exception& e) {
            throw SessionError(ErrorKind::remote, "task " + task.task_id + ": LLM query failed: " + e.what(), record);
        }
        conversation.push_back({Role::assistant, response});

        SessionRound round{kind, std::move(prompt), std::move(response), std::nullopt, {}};
        round.code = extract_code(round.response);
        if (round.code) {
            try {
                round.verdict = judge.evaluate(*round.code, task.task_id);
                round.verdict.validate();
            } catch (const Error& e) {
                throw SessionError(e.kind(), "task " + task.task_id + ": judge failed: " + e.what(), record);
            } catch (const std::exception& e) {
                throw SessionError(ErrorKind::data, "task " + task.task_id + ": judge failed: " + e.what(), record);
            }
        } else {
            round.verdict = {0, 1, "no fenced code block found in the response"};
        }
        record.rounds.push_back(round);
        if (kind == QueryKind::insight) {
            ++record.nhiq;
        } else {
            ++record.nqbh;
            record.tc_passed_pre_insight = std::max(record.tc_passed_pre_insight, round.verdict.pass_fraction());
        }
        record.tpah = round.verdict.pass_fraction();
        record.solved = round.verdict.all_passed();
        return round.verdict;
    };

    auto feedback = [](const VerdictReport& v) {
        return std::map<std::string, std::string, std::less<>>{{"error_trace", v.error_trace},
                                                                {"tests_passed", std::to_string(v.tests_passed)},
                                                                {"tests_total", std::to_string(v.tests_total)}};
    };

    VerdictReport last = query(QueryKind::initial, render_template(templates.initial, {{"statement", task.statement}}));
    while (!last.all_passed() && record.nqbh < constants.pre_insight_cap) {
        last = query(QueryKind::repair, render_template(templates.repair, feedback(last)));
    }
    if (last.all_passed()) return record;

    if (!task.insight) {
        throw SessionError(ErrorKind::usage, "task " + task.task_id + ": insight text is required for the insight phase",
                           record);
    }
    while (!last.all_passed() && record.nhiq < constants.insight_cap) {
        auto values = feedback(last);
        values.emplace("insight", *task.insight);
        last = query(QueryKind::insight, render_template(templates.insight, values));
    }
    return record;
}

RepetitionSummary summarize_sessions(std::string task_id, std::vector<LlmSessionRecord> sessions) {
    RepetitionSummary s;
    s.task_id = std::move(task_id);
    s.sessions = std::move(sessions);
    if (s.sessions.empty()) return s;
    for (const auto& r : s.sessions) {
        s.mean_nqbh += r.nqbh;
        s.mean_nhiq += r.nhiq;
        s.mean_tpah += r.tpah;
        s.mean_tc_passed_pre_insight += r.tc_passed_pre_insight;
    }
    const double n = static_cast<double>(s.sessions.size());
    s.mean_nqbh /= n;
    s.mean_nhiq /= n;
    s.mean_tpah /= n;
    s.mean_tc_passed_pre_insight /= n;
    return s;
}

RepetitionSummary run_repetitions(const TaskPrompt& task, LlmClient& llm, Judge& judge,
                                  const PromptTemplates& templates, const WorkflowConstants& constants,
                                  int repetitions) {
    if (repetitions < 1) throw UsageError("repetitions must be >= 1");
    std::vector<LlmSessionRecord> done;
    for (int i = 0; i < repetitions; ++i) {
        try {
            done.push_back(run_session(task, llm, judge, templates, constants));
        } catch (const SessionError& e) {
            throw SessionError(e.kind(), std::string(e.what()) + " (repetition " + std::to_string(i + 1) + ")",
                               e.partial(), done);
        }
    }
    return summarize_sessions(task.task_id, std::move(done));
}

void to_json(nlohmann::json& j, const VerdictReport& v) {
    j = nlohmann::json{{"tests_passed", v.tests_passed}, {"tests_total", v.tests_total}, {"error_trace", v.error_trace}};
}

void from_json(const nlohmann::json& j, VerdictReport& v) {
    j.at("tests_passed").get_to(v.tests_passed);
    j.at("tests_total").get_to(v.tests_total);
    v.error_trace = j.value("error_trace", "");
    v.validate();
}

void to_json(nlohmann::json& j, const SessionRound& r) {
    j = nlohmann::json{{"kind", to_string(r.kind)},
                       {"prompt", r.prompt},
                       {"response", r.response},
                       {"code", r.code ? nlohmann::json(*r.code) : nlohmann::json(nullptr)},
                       {"verdict", r.verdict}};
}

void from_json(const nlohmann::json& j, SessionRound& r) {
    r.kind = query_kind_from(j.at("kind").get<std::string>());
    j.at("prompt").get_to(r.prompt);
    j.at("response").get_to(r.response);
    if (j.contains("code") && !j["code"].is_null()) {
        r.code = j["code"].get<std::string>();
    } else {
        r.code.reset();
    }
    j.at("verdict").get_to(r.verdict);
}

void to_json(nlohmann::json& j, const LlmSessionRecord& r) {
    j = nlohmann::json{{"task_id", r.task_id},
                       {"rounds", r.rounds},
                       {"nqbh", r.nqbh},
                       {"nhiq", r.nhiq},
                       {"tc_passed_pre_insight", r.tc_passed_pre_insight},
                       {"tpah", r.tpah},
                       {"solved", r.solved}};
}

void from_json(const nlohmann::json& j, LlmSessionRecord& r) {
    j.at("task_id").get_to(r.task_id);
    j.at("rounds").get_to(r.rounds);
    j.at("nqbh").get_to(r.nqbh);
    j.at("nhiq").get_to(r.nhiq);
    j.at("tc_passed_pre_insight").get_to(r.tc_passed_pre_insight);
    j.at("tpah").get_to(r.tpah);
    j.at("solved").get_to(r.solved);
    if (r.nqbh < 1 || r.nhiq < 0 ||
        static_cast<int>(r.rounds.size()) != r.nqbh + r.nhiq || r.tpah < 0 || r.tpah > 1 ||
        r.tc_passed_pre_insight < 0 || r.tc_passed_pre_insight > 1) {
        throw DataError("session record for task " + r.task_id + " is inconsistent");
    }
}

void to_json(nlohmann::json& j, const RepetitionSummary& s) {
    j = nlohmann::json{{"task_id", s.task_id},
                       {"sessions", s.sessions},
                       {"means",
                        {{"nqbh", s.mean_nqbh},
                         {"nhiq", s.mean_nhiq},
                         {"tpah", s.mean_tpah},
                         {"tc_passed_pre_insight", s.mean_tc_passed_pre_insight}}}};
}

void from_json(const nlohmann::json& j, RepetitionSummary& s) {
    auto sessions = j.at("sessions").get<std::vector<LlmSessionRecord>>();
    s = summarize_sessions(j.at("task_id").get<std::string>(), std::move(sessions));
}

std::string render_session_log(const RepetitionSummary& summary) {
    return nlohmann::json(summary).dump(2) + "\n";
}

RepetitionSummary parse_session_log(std::string_view text) {
    try {
        return nlohmann::json::parse(text).get<RepetitionSummary>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("session log: ") + e.what());
    }
}

}  // namespace devcarbon
