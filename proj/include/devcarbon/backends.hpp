#pragma once

#include "devcarbon/http.hpp"
#include "devcarbon/retry.hpp"
#include "devcarbon/session.hpp"
#include "devcarbon/settings.hpp"

#include <nlohmann/json_fwd.hpp>

#include <chrono>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>

namespace devcarbon {

std::string sha256_hex(std::string_view data);

/// Retries the wrapped client on TransportError, sleeping between attempts.
class RetryingLlmClient final : public LlmClient {
public:
    RetryingLlmClient(LlmClient& inner, RetryPolicy policy, Sleeper sleeper = real_sleeper());
    std::string send(const Conversation& conversation) override;

private:
    LlmClient& inner_;
    RetryPolicy policy_;
    Sleeper sleeper_;
};

/// OpenAI-compatible /chat/completions client.
class ChatCompletionClient final : public LlmClient {
public:
    ChatCompletionClient(HttpTransport& transport, LlmEndpoint endpoint, std::string api_key);
    std::string send(const Conversation& conversation) override;

    /// Request body for `conversation`; exposed for tests.
    std::string request_body(const Conversation& conversation) const;

private:
    HttpTransport& transport_;
    LlmEndpoint endpoint_;
    std::string api_key_;
};

/// Replays recorded responses in order. Each call must carry the recorded
/// prompt as its last user message, otherwise the replay has diverged and a
/// DataError is thrown.
class ReplayLlmClient final : public LlmClient {
public:
    explicit ReplayLlmClient(std::span<const LlmSessionRecord> sessions);
    std::string send(const Conversation& conversation) override;

    std::size_t remaining() const noexcept { return queue_.size(); }

private:
    std::deque<std::pair<std::string, std::string>> queue_;  // (prompt, response)
};

/// Maps (task id, SHA-256 of source) to a stored verdict.
class ReplayJudge final : public Judge {
public:
    ReplayJudge() = default;

    /// Collects every judged round of the given sessions.
    static ReplayJudge from_sessions(std::span<const LlmSessionRecord> sessions);
    /// {"verdicts": [{"task_id", "code_sha256", "tests_passed", "tests_total", "error_trace"}]}
    static ReplayJudge from_json(const nlohmann::json& doc);

    /// Conflicting duplicates raise DataError.
    void add(std::string_view task_id, std::string_view source_code, const VerdictReport& verdict);
    void add_hashed(std::string task_id, std::string code_sha256, const VerdictReport& verdict);

    VerdictReport evaluate(std::string_view source_code, std::string_view task_id) override;

    nlohmann::json to_json() const;
    std::size_t size() const noexcept { return verdicts_.size(); }

private:
    std::map<std::pair<std::string, std::string>, VerdictReport> verdicts_;
};

struct JudgeTestCase {
    std::string input;
    std::string expected_output;
};

/// Runs Python sources locally against stored test cases. Every case is run,
/// so the pass fraction is exact; the trace describes the first failure.
class LocalProcessJudge final : public Judge {
public:
    /// `tests` document: {"tasks": {"<task id>": [{"input": ..., "output": ...}]}}
    LocalProcessJudge(const nlohmann::json& tests, std::string interpreter = "python3",
                      std::chrono::seconds time_limit = std::chrono::seconds{10});

    VerdictReport evaluate(std::string_view source_code, std::string_view task_id) override;

private:
    std::map<std::string, std::vector<JudgeTestCase>, std::less<>> tests_;
    std::string interpreter_;
    std::chrono::seconds time_limit_;
};

/// Whitespace-insensitive token comparison used by LocalProcessJudge.
bool outputs_match(std::string_view expected, std::string_view actual);

}  // namespace devcarbon
