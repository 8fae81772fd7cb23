#include "devcarbon/settings.hpp"

#include "devcarbon/error.hpp"
#include "text_util.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace devcarbon {

namespace {

using Setter = std::function<void(Settings&, std::string_view)>;

double parse_double(std::string_view value) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out)) {
        throw ConfigError("expected a number, got '" + std::string(value) + "'");
    }
    return out;
}

int parse_int(std::string_view value) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("expected an integer, got '" + std::string(value) + "'");
    }
    return out;
}

std::optional<double> parse_optional_double(std::string_view value) {
    if (value == "none") return std::nullopt;
    return parse_double(value);
}

template <typename Group, typename Field>
Setter field(Group Settings::*group, Field Group::*member) {
    return [group, member](Settings& s, std::string_view v) {
        auto& target = s.*group.*member;
        if constexpr (std::is_same_v<Field, double>) {
            target = parse_double(v);
        } else if constexpr (std::is_same_v<Field, int>) {
            target = parse_int(v);
        } else if constexpr (std::is_same_v<Field, std::optional<double>>) {
            target = parse_optional_double(v);
        } else {
            target = std::string(v);
        }
    };
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"p_laptop_w", field(&Settings::profile, &PowerProfile::p_laptop_w)},
        {"p_cpu_w", field(&Settings::profile, &PowerProfile::p_cpu_w)},
        {"p_ram_full_w", field(&Settings::profile, &PowerProfile::p_ram_full_w)},
        {"ram_capacity_gb", field(&Settings::profile, &PowerProfile::ram_capacity_gb)},
        {"p_runtime_override_w", field(&Settings::profile, &PowerProfile::p_runtime_override_w)},
        {"e_query_inference_kwh", field(&Settings::profile, &PowerProfile::e_query_inference_kwh)},
        {"e_query_training_kwh", field(&Settings::profile, &PowerProfile::e_query_training_kwh)},
        {"carbon_intensity_g_per_kwh", field(&Settings::profile, &PowerProfile::carbon_intensity_g_per_kwh)},
        {"debug_time_share", field(&Settings::constants, &WorkflowConstants::debug_time_share)},
        {"debug_run_share", field(&Settings::constants, &WorkflowConstants::debug_run_share)},
        {"understanding_share", field(&Settings::constants, &WorkflowConstants::understanding_share)},
        {"read_share", field(&Settings::constants, &WorkflowConstants::read_share)},
        {"edit_share", field(&Settings::constants, &WorkflowConstants::edit_share)},
        {"pre_insight_cap", field(&Settings::constants, &WorkflowConstants::pre_insight_cap)},
        {"insight_cap", field(&Settings::constants, &WorkflowConstants::insight_cap)},
        {"repetitions", field(&Settings::constants, &WorkflowConstants::repetitions)},
        {"llm.url", field(&Settings::llm, &LlmEndpoint::url)},
        {"llm.model", field(&Settings::llm, &LlmEndpoint::model)},
        {"llm.temperature", field(&Settings::llm, &LlmEndpoint::temperature)},
        {"llm.max_tokens", field(&Settings::llm, &LlmEndpoint::max_tokens)},
        {"llm.api_key_env", field(&Settings::llm, &LlmEndpoint::api_key_env)},
        {"llm.max_attempts", field(&Settings::llm, &LlmEndpoint::max_attempts)},
        {"llm.backoff_ms", field(&Settings::llm, &LlmEndpoint::backoff_ms)},
        {"llm.timeout_s", field(&Settings::llm, &LlmEndpoint::timeout_s)},
    };
    return table;
}

void require_fraction(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError(std::string("constants: ") + name + " must lie in [0, 1]");
    }
}

std::string render_optional(const std::optional<double>& v) {
    if (!v) return "none";
    std::ostringstream os;
    os.precision(15);
    os << *v;
    return os.str();
}

}  // namespace

void WorkflowConstants::validate() const {
    require_fraction(debug_time_share, "debug_time_share");
    require_fraction(debug_run_share, "debug_run_share");
    require_fraction(understanding_share, "understanding_share");
    require_fraction(read_share, "read_share");
    require_fraction(edit_share, "edit_share");
    require_fraction(read_share + edit_share, "read_share + edit_share");
    if (pre_insight_cap < 1) throw ConfigError("constants: pre_insight_cap must be >= 1");
    if (insight_cap < 1) throw ConfigError("constants: insight_cap must be >= 1");
    if (repetitions < 1) throw ConfigError("constants: repetitions must be >= 1");
}

Settings parse_settings(std::string_view text, std::string_view origin) {
    Settings settings;
    int line_no = 0;
    for (std::string_view line : detail::split_lines(text)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no) + ": "; };
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where() + "expected 'key = value'");
        auto key = detail::trim(line.substr(0, eq));
        auto value = detail::trim(line.substr(eq + 1));

        auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(where() + "unknown key '" + std::string(key) + "'");
        try {
            it->second(settings, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where() + std::string(key) + ": " + e.what());
        }
    }
    settings.profile.validate();
    settings.constants.validate();
    if (settings.llm.max_attempts < 1) throw ConfigError(std::string(origin) + ": llm.max_attempts must be >= 1");
    if (settings.llm.max_tokens < 1) throw ConfigError(std::string(origin) + ": llm.max_tokens must be >= 1");
    return settings;
}

Settings load_settings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open configuration file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_settings(buf.str(), path.string());
}

std::string render_settings(const Settings& s) {
    std::ostringstream os;
    os.precision(15);
    const auto& p = s.profile;
    const auto& c = s.constants;
    os << "p_laptop_w = " << p.p_laptop_w << '\n'
       << "p_cpu_w = " << render_optional(p.p_cpu_w) << '\n'
       << "p_ram_full_w = " << render_optional(p.p_ram_full_w) << '\n'
       << "ram_capacity_gb = " << p.ram_capacity_gb << '\n'
       << "p_runtime_override_w = " << render_optional(p.p_runtime_override_w) << '\n'
       << "e_query_inference_kwh = " << p.e_query_inference_kwh << '\n'
       << "e_query_training_kwh = " << p.e_query_training_kwh << '\n'
       << "carbon_intensity_g_per_kwh = " << p.carbon_intensity_g_per_kwh << '\n'
       << "debug_time_share = " << c.debug_time_share << '\n'
       << "debug_run_share = " << c.debug_run_share << '\n'
       << "understanding_share = " << c.understanding_share << '\n'
       << "read_share = " << c.read_share << '\n'
       << "edit_share = " << c.edit_share << '\n'
       << "pre_insight_cap = " << c.pre_insight_cap << '\n'
       << "insight_cap = " << c.insight_cap << '\n'
       << "repetitions = " << c.repetitions << '\n'
       << "llm.url = " << s.llm.url << '\n'
       << "llm.model = " << s.llm.model << '\n'
       << "llm.temperature = " << s.llm.temperature << '\n'
       << "llm.max_tokens = " << s.llm.max_tokens << '\n'
       << "llm.api_key_env = " << s.llm.api_key_env << '\n'
       << "llm.max_attempts = " << s.llm.max_attempts << '\n'
       << "llm.backoff_ms = " << s.llm.backoff_ms << '\n'
       << "llm.timeout_s = " << s.llm.timeout_s << '\n';
    return os.str();
}

}  // namespace devcarbon
