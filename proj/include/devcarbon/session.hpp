#pragma once

#include "devcarbon/error.hpp"
#include "devcarbon/settings.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace devcarbon {

enum class Role { user, assistant };

struct ChatMessage {
    Role role = Role::user;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

using Conversation = std::vector<ChatMessage>;

/// Chat back-end. Holds no conversation state: every call carries the full
/// history. Transient failures surface as TransportError.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string send(const Conversation& conversation) = 0;
};

struct VerdictReport {
    int tests_passed = 0;
    int tests_total = 1;
    std::string error_trace;  // first failing case; empty when everything passes

    double pass_fraction() const noexcept { return static_cast<double>(tests_passed) / tests_total; }
    bool all_passed() const noexcept { return tests_passed == tests_total; }
    /// Throws DataError unless 0 <= passed <= total and total >= 1.
    void validate() const;

    friend bool operator==(const VerdictReport&, const VerdictReport&) = default;
};

class Judge {
public:
    virtual ~Judge() = default;
    virtual VerdictReport evaluate(std::string_view source_code, std::string_view task_id) = 0;
};

enum class QueryKind { initial, repair, insight };

std::string_view to_string(QueryKind kind);

struct SessionRound {
    QueryKind kind = QueryKind::initial;
    std::string prompt;    // the user message added for this query
    std::string response;  // raw model output
    std::optional<std::string> code;
    VerdictReport verdict;

    friend bool operator==(const SessionRound&, const SessionRound&) = default;
};

/// One run of the protocol for one task.
struct LlmSessionRecord {
    std::string task_id;
    std::vector<SessionRound> rounds;
    int nqbh = 0;  // queries before the insight phase
    int nhiq = 0;  // queries carrying the insight
    double tc_passed_pre_insight = 0.0;  // best pass fraction before the insight phase
    double tpah = 0.0;                   // pass fraction of the last verdict
    bool solved = false;

    int total_queries() const noexcept { return nqbh + nhiq; }

    friend bool operator==(const LlmSessionRecord&, const LlmSessionRecord&) = default;
};

struct TaskPrompt {
    std::string task_id;
    std::string statement;
    std::optional<std::string> insight;  // needed only if the insight phase is entered
};

/// The three prompt templates. Placeholders are {{statement}}, {{insight}},
/// {{error_trace}}, {{tests_passed}} and {{tests_total}}; substitution is a
/// single pass, so substituted text is never re-expanded.
struct PromptTemplates {
    std::string initial;
    std::string repair;
    std::string insight;

    /// Reads initial.txt, repair.txt and insight.txt from `dir`.
    static PromptTemplates load(const std::filesystem::path& dir);
};

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values);

/// Body of the last fenced (```) block in `response`; an unterminated final
/// fence runs to the end of the text.
std::optional<std::string> extract_code(std::string_view response);

/// Raised when a session cannot complete. Carries everything finished so far.
class SessionError : public Error {
public:
    SessionError(ErrorKind kind, const std::string& what, LlmSessionRecord partial,
                 std::vector<LlmSessionRecord> completed = {})
        : Error(kind, what), partial_(std::move(partial)), completed_(std::move(completed)) {}

    const LlmSessionRecord& partial() const noexcept { return partial_; }
    const std::vector<LlmSessionRecord>& completed() const noexcept { return completed_; }

private:
    LlmSessionRecord partial_;
    std::vector<LlmSessionRecord> completed_;
};

/// Runs the repair loop: one initial query plus up to pre_insight_cap - 1
/// repairs, then (if still unsolved) up to insight_cap queries that carry the
/// insight and the latest error trace. Stops on the first full pass.
LlmSessionRecord run_session(const TaskPrompt& task, LlmClient& llm, Judge& judge, const PromptTemplates& templates,
                             const WorkflowConstants& constants = {});

struct RepetitionSummary {
    std::string task_id;
    std::vector<LlmSessionRecord> sessions;
    double mean_nqbh = 0.0;
    double mean_nhiq = 0.0;
    double mean_tpah = 0.0;
    double mean_tc_passed_pre_insight = 0.0;

    double mean_total_queries() const noexcept { return mean_nqbh + mean_nhiq; }
};

RepetitionSummary summarize_sessions(std::string task_id, std::vector<LlmSessionRecord> sessions);

/// Runs `repetitions` independent sessions in sequence. A failing session
/// raises SessionError holding the completed sessions and the partial one.
RepetitionSummary run_repetitions(const TaskPrompt& task, LlmClient& llm, Judge& judge,
                                  const PromptTemplates& templates, const WorkflowConstants& constants,
                                  int repetitions);

void to_json(nlohmann::json& j, const VerdictReport& v);
void from_json(const nlohmann::json& j, VerdictReport& v);
void to_json(nlohmann::json& j, const SessionRound& r);
void from_json(const nlohmann::json& j, SessionRound& r);
void to_json(nlohmann::json& j, const LlmSessionRecord& r);
void from_json(const nlohmann::json& j, LlmSessionRecord& r);
void to_json(nlohmann::json& j, const RepetitionSummary& s);
void from_json(const nlohmann::json& j, RepetitionSummary& s);

/// Session log document as written to disk (2-space indented JSON, trailing newline).
std::string render_session_log(const RepetitionSummary& summary);
RepetitionSummary parse_session_log(std::string_view text);

}  // namespace devcarbon
