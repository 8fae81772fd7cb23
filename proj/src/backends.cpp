#include "devcarbon/backends.hpp"

#include "devcarbon/error.hpp"
#include "devcarbon/io.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <sys/wait.h>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace devcarbon {

namespace {

std::string role_name(Role r) { return r == Role::user ? "user" : "assistant"; }

std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out.push_back(c);
        }
    }
    return out + "'";
}

std::string excerpt(std::string_view s, std::size_t limit = 400) {
    if (s.size() <= limit) return std::string(s);
    return std::string(s.substr(0, limit)) + "...";
}

class TempDir {
public:
    TempDir() {
        auto pattern = (std::filesystem::temp_directory_path() / "devcarbon-judge-XXXXXX").string();
        if (!mkdtemp(pattern.data())) throw DataError("cannot create a temporary directory for the judge");
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw DataError("SHA-256 computation failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

RetryingLlmClient::RetryingLlmClient(LlmClient& inner, RetryPolicy policy, Sleeper sleeper)
    : inner_(inner), policy_(policy), sleeper_(std::move(sleeper)) {
    if (policy_.max_attempts < 1) throw ConfigError("retry attempts must be positive");
}

std::string RetryingLlmClient::send(const Conversation& conversation) {
    for (int attempt = 1;; ++attempt) {
        try {
            return inner_.send(conversation);
        } catch (const TransportError& e) {
            if (attempt >= policy_.max_attempts) {
                throw RemoteError("LLM request failed after " + std::to_string(attempt) + " attempts: " + e.what());
            }
            sleeper_(policy_.delay_after(attempt));
        }
    }
}

ChatCompletionClient::ChatCompletionClient(HttpTransport& transport, LlmEndpoint endpoint, std::string api_key)
    : transport_(transport), endpoint_(std::move(endpoint)), api_key_(std::move(api_key)) {
    if (api_key_.empty()) throw UsageError("LLM API key is empty; set " + endpoint_.api_key_env);
}

std::string ChatCompletionClient::request_body(const Conversation& conversation) const {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : conversation) messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    return nlohmann::json{{"model", endpoint_.model},
                          {"messages", messages},
                          {"temperature", endpoint_.temperature},
                          {"max_tokens", endpoint_.max_tokens}}
        .dump();
}

std::string ChatCompletionClient::send(const Conversation& conversation) {
    const std::vector<std::string> headers = {"Content-Type: application/json", "Authorization: Bearer " + api_key_};
    HttpResponse response = transport_.post(endpoint_.url, headers, request_body(conversation));
    if (response.status == 429 || response.status >= 500) {
        throw TransportError("chat completion returned HTTP " + std::to_string(response.status));
    }
    if (response.status != 200) {
        throw RemoteError("chat completion returned HTTP " + std::to_string(response.status) + ": " +
                          excerpt(response.body));
    }
    auto body = nlohmann::json::parse(response.body, nullptr, false);
    if (body.is_discarded()) throw RemoteError("chat completion returned malformed JSON");
    try {
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw RemoteError("chat completion response has no message content");
    }
}

ReplayLlmClient::ReplayLlmClient(std::span<const LlmSessionRecord> sessions) {
    for (const auto& s : sessions) {
        for (const auto& r : s.rounds) queue_.emplace_back(r.prompt, r.response);
    }
}

std::string ReplayLlmClient::send(const Conversation& conversation) {
    if (queue_.empty()) throw DataError("replay log exhausted: more queries than recorded");
    if (conversation.empty() || conversation.back().role != Role::user ||
        conversation.back().content != queue_.front().first) {
        throw DataError("replay diverged: prompt differs from the recorded one");
    }
    std::string response = std::move(queue_.front().second);
    queue_.pop_front();
    return response;
}

ReplayJudge ReplayJudge::from_sessions(std::span<const LlmSessionRecord> sessions) {
    ReplayJudge judge;
    for (const auto& s : sessions) {
        for (const auto& r : s.rounds) {
            if (r.code) judge.add(s.task_id, *r.code, r.verdict);
        }
    }
    return judge;
}

ReplayJudge ReplayJudge::from_json(const nlohmann::json& doc) {
    ReplayJudge judge;
    try {
        for (const auto& v : doc.at("verdicts")) {
            judge.add_hashed(v.at("task_id").get<std::string>(), v.at("code_sha256").get<std::string>(),
                             v.get<VerdictReport>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("replay judge file: ") + e.what());
    }
    return judge;
}

void ReplayJudge::add(std::string_view task_id, std::string_view source_code, const VerdictReport& verdict) {
    add_hashed(std::string(task_id), sha256_hex(source_code), verdict);
}

void ReplayJudge::add_hashed(std::string task_id, std::string code_sha256, const VerdictReport& verdict) {
    verdict.validate();
    auto key = std::make_pair(std::move(task_id), std::move(code_sha256));
    auto [it, inserted] = verdicts_.emplace(key, verdict);
    if (!inserted && !(it->second == verdict)) {
        throw DataError("replay judge: conflicting verdicts recorded for the same source of task " + key.first);
    }
}

VerdictReport ReplayJudge::evaluate(std::string_view source_code, std::string_view task_id) {
    auto it = verdicts_.find({std::string(task_id), sha256_hex(source_code)});
    if (it == verdicts_.end()) {
        throw DataError("replay judge: no recorded verdict for this source of task " + std::string(task_id));
    }
    return it->second;
}

nlohmann::json ReplayJudge::to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& [key, v] : verdicts_) {
        nlohmann::json entry = v;
        entry["task_id"] = key.first;
        entry["code_sha256"] = key.second;
        list.push_back(entry);
    }
    return {{"verdicts", list}};
}

bool outputs_match(std::string_view expected, std::string_view actual) { return tokens(expected) == tokens(actual); }

LocalProcessJudge::LocalProcessJudge(const nlohmann::json& tests, std::string interpreter,
                                     std::chrono::seconds time_limit)
    : interpreter_(std::move(interpreter)), time_limit_(time_limit) {
    try {
        for (const auto& [task, cases] : tests.at("tasks").items()) {
            auto& list = tests_[task];
            for (const auto& c : cases) {
                list.push_back({c.at("input").get<std::string>(), c.at("output").get<std::string>()});
            }
            if (list.empty()) throw DataError("local judge: task " + task + " has no test cases");
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("local judge tests: ") + e.what());
    }
}

VerdictReport LocalProcessJudge::evaluate(std::string_view source_code, std::string_view task_id) {
    auto it = tests_.find(task_id);
    if (it == tests_.end()) throw DataError("local judge: no tests for task " + std::string(task_id));
    const auto& cases = it->second;

    TempDir dir;
    const auto source = dir.path() / "solution.py";
    write_file_atomic(source, source_code);

    VerdictReport verdict{0, static_cast<int>(cases.size()), {}};
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto in = dir.path() / "input.txt";
        const auto out = dir.path() / "output.txt";
        const auto err = dir.path() / "stderr.txt";
        write_file_atomic(in, cases[i].input);
        std::ostringstream cmd;
        cmd << "timeout -k 1 " << time_limit_.count() << ' ' << shell_quote(interpreter_) << ' '
            << shell_quote(source.string()) << " < " << shell_quote(in.string()) << " > "
            << shell_quote(out.string()) << " 2> " << shell_quote(err.string());
        const int status = std::system(cmd.str().c_str());
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;

        std::string failure;
        const std::string test = "Test " + std::to_string(i + 1);
        if (code == 124 || code == 137) {
            failure = test + ": time limit exceeded";
        } else if (code != 0) {
            failure = test + ": runtime error (exit " + std::to_string(code) + ")\n" + excerpt(read_text_file(err));
        } else {
            const std::string actual = read_text_file(out);
            if (outputs_match(cases[i].expected_output, actual)) {
                ++verdict.tests_passed;
                continue;
            }
            failure = test + ": wrong answer\nInput:\n" + excerpt(cases[i].input) + "\nExpected:\n" +
                      excerpt(cases[i].expected_output) + "\nGot:\n" + excerpt(actual);
        }
        if (verdict.error_trace.empty()) verdict.error_trace = failure;
    }
    return verdict;
}

}  // namespace devcarbon
