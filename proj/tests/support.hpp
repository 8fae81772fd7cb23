#pragma once

#include "devcarbon/error.hpp"
#include "devcarbon/http.hpp"
#include "devcarbon/session.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace devcarbon::test {

inline std::filesystem::path data_dir() { return DEVCARBON_DATA_DIR; }

/// Fresh empty directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("devcarbon-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// LLM that answers every query with a program whose body names the query
/// number, and records every conversation it was sent.
class ScriptedLlm final : public LlmClient {
public:
    std::string send(const Conversation& conversation) override {
        sent.push_back(conversation);
        return "Here you go:\n```python\nprint(" + std::to_string(sent.size()) + ")\n```\n";
    }

    std::vector<Conversation> sent;
};

/// Judge driven by a list of pass counts, one per query, out of `total`.
/// Runs past the end of the list repeat the last entry.
class ScriptedJudge final : public Judge {
public:
    ScriptedJudge(std::vector<int> passed, int total) : passed_(std::move(passed)), total_(total) {}

    VerdictReport evaluate(std::string_view, std::string_view) override {
        const int p = passed_.empty() ? 0 : passed_[std::min(calls, passed_.size() - 1)];
        ++calls;
        VerdictReport v{p, total_, {}};
        if (p < total_) v.error_trace = "Test " + std::to_string(p + 1) + ": wrong answer (call " + std::to_string(calls) + ")";
        return v;
    }

    std::size_t calls = 0;

private:
    std::vector<int> passed_;
    int total_;
};

inline PromptTemplates test_templates() {
    return {"TASK:\n{{statement}}", "FIX {{tests_passed}}/{{tests_total}}:\n{{error_trace}}",
            "HINT:\n{{insight}}\nFIX {{tests_passed}}/{{tests_total}}:\n{{error_trace}}"};
}

/// Transport that returns queued responses and records requested URLs.
class FakeTransport final : public HttpTransport {
public:
    struct Step {
        long status = 200;
        std::string body;
        bool fail = false;  // throw TransportError instead of answering
    };

    HttpResponse get(const std::string& url) override { return next(url); }
    HttpResponse post(const std::string& url, const std::vector<std::string>& headers,
                      const std::string& body) override {
        posted_headers.push_back(headers);
        posted_bodies.push_back(body);
        return next(url);
    }

    std::deque<Step> steps;
    std::vector<std::string> urls;
    std::vector<std::vector<std::string>> posted_headers;
    std::vector<std::string> posted_bodies;

private:
    HttpResponse next(const std::string& url);
};

inline HttpResponse FakeTransport::next(const std::string& url) {
    urls.push_back(url);
    if (steps.empty()) throw std::logic_error("FakeTransport: unexpected request " + url);
    Step s = std::move(steps.front());
    steps.pop_front();
    if (s.fail) throw TransportError("connection reset");
    return {s.status, std::move(s.body)};
}

/// Sleeper that only records the requested delays.
struct RecordingSleeper {
    std::shared_ptr<std::vector<std::chrono::milliseconds>> delays =
        std::make_shared<std::vector<std::chrono::milliseconds>>();

    void operator()(std::chrono::milliseconds d) const { delays->push_back(d); }
};

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace devcarbon::test
