#pragma once

#include "devcarbon/energy.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace devcarbon {

/// Literature shares and protocol caps shared by both estimators and the
/// session runner. Defaults are the published values.
struct WorkflowConstants {
    double debug_time_share = 0.42;     // share of development time spent debugging
    double debug_run_share = 0.10;      // share of debugging time spent running code
    double understanding_share = 0.38;  // share of task time spent understanding it
    double read_share = 0.20;           // share of debugging time spent reading code
    double edit_share = 0.20;           // share of debugging time spent editing code
    int pre_insight_cap = 5;
    int insight_cap = 3;
    int repetitions = 3;

    void validate() const;

    double read_extend_share() const noexcept { return debug_time_share * (read_share + edit_share); }
};

/// Chat-completion back-end configuration. The key itself is read from the
/// environment variable named by api_key_env, never from the file.
struct LlmEndpoint {
    std::string url = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-4";
    double temperature = 1.0;
    int max_tokens = 2048;
    std::string api_key_env = "OPENAI_API_KEY";
    int max_attempts = 3;
    int backoff_ms = 2000;
    int timeout_s = 120;
};

struct Settings {
    PowerProfile profile;
    WorkflowConstants constants;
    LlmEndpoint llm;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and
/// malformed values throw ConfigError naming `origin` and the line number.
/// Setting `p_runtime_override_w = none` enables the memory-sensitive
/// runtime power form.
Settings parse_settings(std::string_view text, std::string_view origin = "<config>");

Settings load_settings(const std::filesystem::path& path);

/// Renders every key with its current value in parse_settings syntax.
std::string render_settings(const Settings& settings);

}  // namespace devcarbon
