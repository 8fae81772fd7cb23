#include "devcarbon/pipeline.hpp"

#include "devcarbon/error.hpp"
#include "devcarbon/io.hpp"
#include "text_util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <iomanip>
#include <optional>
#include <sstream>

namespace devcarbon {

namespace {

SessionMeans means_from_json(const nlohmann::json& j) {
    SessionMeans m;
    m.nqbh = j.at("nqbh").get<double>();
    m.nhiq = j.value("nhiq", 0.0);
    m.tc_passed_pre_insight = j.value("tc_passed_pre_insight", 0.0);
    m.tpah = j.at("tpah").get<double>();
    if (m.nqbh < 1.0 || m.nhiq < 0.0) throw DataError("llm_means: query counts out of range");
    if (m.tpah < 0.0 || m.tpah > 1.0 || m.tc_passed_pre_insight < 0.0 || m.tc_passed_pre_insight > 1.0) {
        throw DataError("llm_means: pass fractions must lie in [0, 1]");
    }
    return m;
}

void absorb(TaskInputs& inputs, AggregationResult result) {
    for (auto& a : result.included) inputs.aggregates.push_back(std::move(a));
    for (auto& e : result.excluded) inputs.excluded.push_back(std::move(e));
    for (auto& w : result.warnings) inputs.warnings.push_back(std::move(w));
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        out.emplace_back(detail::trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_double(const std::string& s, std::string_view origin, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError(std::string(origin) + ":" + std::to_string(line) + ": not a number: '" + s + "'");
    }
    return v;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

std::string fixed(double v, int decimals) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(decimals) << v;
    return os.str();
}

}  // namespace

const TaskAggregates* TaskInputs::find(std::string_view task_id) const {
    for (const auto& a : aggregates) {
        if (a.task_id() == task_id) return &a;
    }
    return nullptr;
}

TaskInputs parse_task_inputs(std::string_view json_text, const AggregationOptions& options) {
    auto doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw DataError("fixture is not a JSON object");

    TaskInputs inputs;
    try {
        if (doc.contains("aggregates")) {
            for (const auto& a : doc.at("aggregates")) inputs.aggregates.push_back(a.get<TaskAggregates>());
            if (doc.contains("llm_means")) {
                for (const auto& [id, m] : doc.at("llm_means").items()) inputs.llm_means[id] = means_from_json(m);
            }
        } else if (doc.contains("contests")) {
            for (const auto& c : doc.at("contests")) absorb(inputs, compute_aggregates(c.get<ContestFixture>(), options));
        } else if (doc.contains("submissions")) {
            absorb(inputs, compute_aggregates(doc.get<ContestFixture>(), options));
        } else {
            throw DataError("fixture has neither \"aggregates\" nor \"submissions\"");
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("fixture: ") + e.what());
    }

    for (std::size_t i = 0; i < inputs.aggregates.size(); ++i) {
        const auto& a = inputs.aggregates[i];
        if (a.mts_s <= 0.0) throw DataError("fixture: task " + a.task_id() + " has non-positive mts_s");
        for (std::size_t j = 0; j < i; ++j) {
            if (inputs.aggregates[j].task_id() == a.task_id()) {
                throw DataError("fixture: task " + a.task_id() + " appears twice");
            }
        }
    }
    return inputs;
}

TaskInputs load_task_inputs(const std::filesystem::path& path, const AggregationOptions& options) {
    try {
        return parse_task_inputs(read_text_file(path), options);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::vector<ManualRow> run_manual(std::span<const TaskAggregates> tasks, const Settings& settings) {
    std::vector<ManualRow> rows;
    rows.reserve(tasks.size());
    for (const auto& t : tasks) rows.push_back({t, manual_breakdown(t, settings.profile, settings.constants)});
    return rows;
}

std::vector<LlmRow> run_llm_from_means(std::span<const TaskAggregates> tasks,
                                       const std::map<std::string, SessionMeans>& means, const Settings& settings) {
    std::vector<LlmRow> rows;
    for (const auto& t : tasks) {
        auto it = means.find(t.task_id());
        if (it == means.end()) throw DataError("no LLM session means for task " + t.task_id());
        rows.push_back({t.task_id(), it->second, llm_breakdown(it->second, t.mts_s, settings.profile, settings.constants)});
    }
    return rows;
}

std::vector<LlmRow> run_llm_from_sessions(std::span<const TaskAggregates> tasks,
                                          std::span<const RepetitionSummary> sessions, const Settings& settings) {
    std::vector<LlmRow> rows;
    for (const auto& t : tasks) {
        const std::string id = t.task_id();
        auto it = std::find_if(sessions.begin(), sessions.end(), [&](const auto& s) { return s.task_id == id; });
        if (it == sessions.end()) continue;
        if (std::find_if(std::next(it), sessions.end(), [&](const auto& s) { return s.task_id == id; }) !=
            sessions.end()) {
            throw DataError("more than one session log for task " + id);
        }
        if (it->sessions.empty()) throw DataError("session log for task " + id + " holds no sessions");
        rows.push_back({id, means_of(*it),
                        llm_breakdown_per_repetition(it->sessions, t.mts_s, settings.profile, settings.constants)});
    }
    for (const auto& s : sessions) {
        if (std::none_of(tasks.begin(), tasks.end(), [&](const auto& t) { return t.task_id() == s.task_id; })) {
            throw DataError("session log for task " + s.task_id + " has no matching fixture task");
        }
    }
    return rows;
}

std::vector<RepetitionSummary> load_session_logs(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_regular_file(dir)) {
        files.push_back(dir);
    } else {
        std::error_code ec;
        for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
        }
        if (ec) throw DataError("cannot list session directory " + dir.string() + ": " + ec.message());
        std::sort(files.begin(), files.end());
    }
    std::vector<RepetitionSummary> out;
    for (const auto& f : files) {
        // Partial logs from interrupted runs are not estimates.
        if (f.filename().string().ends_with(".partial.json")) continue;
        try {
            out.push_back(parse_session_log(read_text_file(f)));
        } catch (const DataError& e) {
            throw DataError(f.string() + ": " + e.what());
        }
    }
    return out;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string render_manual_csv(std::span<const ManualRow> rows) {
    std::string out = "task_id,contest_id,task_index,mts_s,cec_kwh,tec_kwh,dec_kwh,ttec_kwh,cf_g\n";
    for (const auto& r : rows) {
        const auto& b = r.breakdown;
        out += r.task.task_id() + ',' + std::to_string(r.task.contest_id) + ',' + r.task.task_index + ',' +
               format_number(r.task.mts_s) + ',' + format_number(b.cec.kwh()) + ',' + format_number(b.tec.kwh()) +
               ',' + format_number(b.dec.kwh()) + ',' + format_number(b.ttec.kwh()) + ',' +
               format_number(b.cf_grams) + '\n';
    }
    return out;
}

std::string render_llm_csv(std::span<const LlmRow> rows) {
    std::string out = "task_id,nqbh,nhiq,tpah,qec_kwh,ethi_s,etaf_s,ttec_kwh,cf_g\n";
    for (const auto& r : rows) {
        const auto& b = r.breakdown;
        out += r.task_id + ',' + format_number(r.means.nqbh) + ',' + format_number(r.means.nhiq) + ',' +
               format_number(r.means.tpah) + ',' + format_number(b.qec.kwh()) + ',' + format_number(b.t_insight_s) +
               ',' + format_number(b.t_add_s) + ',' + format_number(b.ttec.kwh()) + ',' + format_number(b.cf_grams) +
               '\n';
    }
    return out;
}

std::string render_manual_table(std::span<const ManualRow> rows) {
    std::ostringstream os;
    os << pad("task", 7) << pad("MTS s", 9) << pad("CEC kWh", 11) << pad("TEC kWh", 11) << pad("DEC kWh", 11)
       << pad("TTEC kWh", 11) << pad("CF g", 9) << '\n';
    for (const auto& r : rows) {
        const auto& b = r.breakdown;
        os << pad(r.task.task_id(), 7) << pad(fixed(r.task.mts_s, 0), 9) << pad(format_kwh(b.cec.kwh()), 11)
           << pad(format_kwh(b.tec.kwh()), 11) << pad(format_kwh(b.dec.kwh()), 11) << pad(format_kwh(b.ttec.kwh()), 11)
           << pad(format_grams(b.cf_grams), 9) << '\n';
    }
    return os.str();
}

std::string render_llm_table(std::span<const LlmRow> rows) {
    std::ostringstream os;
    os << pad("task", 7) << pad("NQBH", 6) << pad("NHIQ", 6) << pad("TPAH", 7) << pad("QEC kWh", 9)
       << pad("ETHI s", 8) << pad("ETAF s", 8) << pad("TTEC kWh", 10) << pad("CF g", 8) << '\n';
    for (const auto& r : rows) {
        const auto& b = r.breakdown;
        os << pad(r.task_id, 7) << pad(fixed(r.means.nqbh, 1), 6) << pad(fixed(r.means.nhiq, 1), 6)
           << pad(fixed(r.means.tpah * 100.0, 0) + "%", 7) << pad(fixed(b.qec.kwh(), 3), 9)
           << pad(fixed(b.t_insight_s, 0), 8) << pad(fixed(b.t_add_s, 0), 8) << pad(fixed(b.ttec.kwh(), 3), 10)
           << pad(fixed(b.cf_grams, 2), 8) << '\n';
    }
    return os.str();
}

std::vector<FootprintEntry> parse_footprint_csv(std::string_view text, std::string_view origin) {
    auto lines = detail::split_lines(text);
    while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw DataError(std::string(origin) + ": empty CSV");

    const auto header = split_csv_line(lines[0]);
    auto column = [&](std::string_view name) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto id_col = column("task_id");
    const auto cf_col = column("cf_g");
    const auto mts_col = column("mts_s");
    if (!id_col || !cf_col) throw DataError(std::string(origin) + ": CSV needs task_id and cf_g columns");

    std::vector<FootprintEntry> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto cells = split_csv_line(lines[i]);
        if (cells.size() != header.size()) {
            throw DataError(std::string(origin) + ":" + std::to_string(i + 1) + ": expected " +
                            std::to_string(header.size()) + " fields");
        }
        FootprintEntry e;
        e.task_id = cells[*id_col];
        e.cf_g = parse_double(cells[*cf_col], origin, i + 1);
        if (mts_col) e.mts_s = parse_double(cells[*mts_col], origin, i + 1);
        out.push_back(std::move(e));
    }
    return out;
}

ComparisonReport compare_footprints(std::span<const FootprintEntry> manual, std::span<const FootprintEntry> llm,
                                    PValueMethod method, const PermutationOptions& perm) {
    std::vector<ReportRow> rows;
    for (const auto& m : manual) {
        auto it = std::find_if(llm.begin(), llm.end(), [&](const auto& l) { return l.task_id == m.task_id; });
        if (it == llm.end()) throw DataError("task " + m.task_id + " has no LLM footprint");
        rows.push_back(make_row(m.task_id, m.mts_s, m.cf_g, it->cf_g));
    }
    for (const auto& l : llm) {
        if (std::none_of(manual.begin(), manual.end(), [&](const auto& m) { return m.task_id == l.task_id; })) {
            throw DataError("task " + l.task_id + " has no manual footprint");
        }
    }
    return build_report(std::move(rows), method, perm);
}

}  // namespace devcarbon
