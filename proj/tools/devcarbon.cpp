// devcarbon: energy and carbon estimates for manual vs LLM-assisted solving
// of programming-contest tasks.

#include "devcarbon/backends.hpp"
#include "devcarbon/codeforces.hpp"
#include "devcarbon/error.hpp"
#include "devcarbon/io.hpp"
#include "devcarbon/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#ifndef DEVCARBON_DATA_DIR
#define DEVCARBON_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace devcarbon;

namespace {

Settings settings_from(const std::string& profile) {
    Settings s = profile.empty() ? Settings{} : load_settings(profile);
    s.profile.validate();
    s.constants.validate();
    return s;
}

void require_input(std::string_view stage, std::string_view flag, const std::string& path) {
    if (path.empty()) throw UsageError(std::string(stage) + ": " + std::string(flag) + " is required");
    if (!fs::exists(path)) {
        throw UsageError(std::string(stage) + ": " + std::string(flag) + " " + path + " does not exist");
    }
}

void print_warnings(const TaskInputs& inputs) {
    for (const auto& e : inputs.excluded) {
        std::cerr << "excluded task " << e.task_index << " (" << e.solver_count << " solvers): " << e.reason << '\n';
    }
    for (const auto& w : inputs.warnings) std::cerr << "warning: " << w << '\n';
}

// ---- ingest ----------------------------------------------------------------

struct IngestArgs {
    std::int64_t contest = 0;
    std::string out;
    std::string input;
    std::string aggregates;
    std::string profile;
    int min_solvers = 1000;
    std::string language = "python";
    int page_size = 10000;
    int interval_ms = 2000;
    std::string base_url = CodeforcesOptions{}.base_url;
};

int run_ingest(const IngestArgs& a) {
    const Settings settings = settings_from(a.profile);
    if (a.min_solvers < 0) throw UsageError("ingest: --min-solvers must be non-negative");
    if (a.page_size < 1) throw UsageError("ingest: --page-size must be positive");

    ContestFixture fixture;
    if (!a.input.empty()) {
        require_input("ingest", "--input", a.input);
        try {
            fixture = nlohmann::json::parse(read_text_file(a.input)).get<ContestFixture>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError(a.input + ": " + e.what());
        }
    } else {
        if (a.contest <= 0) throw UsageError("ingest: --contest or --input is required");
        CodeforcesOptions options;
        options.base_url = a.base_url;
        options.page_size = a.page_size;
        options.min_request_interval = std::chrono::milliseconds{a.interval_ms};
        auto transport = make_curl_transport();
        CodeforcesClient client(*transport, options);
        fixture = client.fetch_contest(a.contest);
    }
    if (!a.out.empty()) write_file_atomic(a.out, nlohmann::json(fixture).dump(1) + "\n");

    AggregationOptions opts;
    opts.min_solvers = a.min_solvers;
    opts.language = a.language;
    opts.ram_capacity_bytes = settings.profile.ram_capacity_bytes();
    AggregationResult result = compute_aggregates(fixture, opts);
    if (!a.aggregates.empty()) write_file_atomic(a.aggregates, nlohmann::json(result).dump(2) + "\n");

    std::cout << "contest " << fixture.contest_id << ": " << fixture.submissions.size() << " submissions, "
              << result.included.size() << " tasks kept, " << result.excluded.size() << " excluded\n";
    for (const auto& t : result.included) {
        std::cout << "  " << t.task_id() << "  solvers " << t.solver_count << "  MTS " << format_number(t.mts_s)
                  << " s\n";
    }
    for (const auto& e : result.excluded) std::cerr << "excluded task " << e.task_index << ": " << e.reason << '\n';
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

// ---- manual ----------------------------------------------------------------

struct StageArgs {
    std::string fixture;
    std::string profile;
    std::string out;
    std::string sessions;
    std::string language = "python";
    int min_solvers = 1000;
};

TaskInputs inputs_for(std::string_view stage, const StageArgs& a, const Settings& settings) {
    require_input(stage, "--fixture", a.fixture);
    AggregationOptions opts;
    opts.min_solvers = a.min_solvers;
    opts.language = a.language;
    opts.ram_capacity_bytes = settings.profile.ram_capacity_bytes();
    TaskInputs inputs = load_task_inputs(a.fixture, opts);
    print_warnings(inputs);
    if (inputs.aggregates.empty()) throw DataError(std::string(stage) + ": fixture yields no tasks");
    return inputs;
}

int run_manual_stage(const StageArgs& a) {
    if (a.out.empty()) throw UsageError("manual: --out is required");
    const Settings settings = settings_from(a.profile);
    const TaskInputs inputs = inputs_for("manual", a, settings);
    const auto rows = run_manual(inputs.aggregates, settings);
    write_file_atomic(a.out, render_manual_csv(rows));
    std::cout << render_manual_table(rows);
    return 0;
}

// ---- llm-estimate ----------------------------------------------------------

std::vector<LlmRow> llm_rows(std::string_view stage, const StageArgs& a, const TaskInputs& inputs,
                             const Settings& settings) {
    if (!a.sessions.empty()) {
        require_input(stage, "--sessions", a.sessions);
        const auto logs = load_session_logs(a.sessions);
        if (logs.empty()) throw UsageError(std::string(stage) + ": no session logs in " + a.sessions);
        return run_llm_from_sessions(inputs.aggregates, logs, settings);
    }
    if (inputs.llm_means.empty()) {
        throw UsageError(std::string(stage) + ": --sessions is required unless the fixture carries llm_means");
    }
    return run_llm_from_means(inputs.aggregates, inputs.llm_means, settings);
}

int run_llm_estimate_stage(const StageArgs& a) {
    if (a.out.empty()) throw UsageError("llm-estimate: --out is required");
    const Settings settings = settings_from(a.profile);
    const TaskInputs inputs = inputs_for("llm-estimate", a, settings);
    const auto rows = llm_rows("llm-estimate", a, inputs, settings);
    write_file_atomic(a.out, render_llm_csv(rows));
    std::cout << render_llm_table(rows);
    return 0;
}

// ---- compare ---------------------------------------------------------------

struct CompareArgs {
    std::string manual;
    std::string llm;
    std::string out;
    std::string scatter;
    std::string scatter_json;
    std::string profile;
    std::string p_method = "t";
    std::uint64_t seed = 0;
    std::size_t resamples = 100000;
};

PValueMethod parse_method(const std::string& s) {
    if (s == "t") return PValueMethod::t_approximation;
    if (s == "permutation") return PValueMethod::permutation;
    throw UsageError("--p-method must be 't' or 'permutation'");
}

std::string summary_text(const ComparisonReport& r) {
    std::ostringstream os;
    os << "tasks: " << r.rows.size() << '\n';
    if (r.ratio) os << "ratio mean " << format_grams(r.ratio->mean, 2) << ", sample std " << format_grams(r.ratio->std_sample, 2) << '\n';
    if (r.pearson) {
        os << "pearson r " << format_grams(r.pearson->coefficient, 3) << ", p " << r.pearson->p_value << '\n';
    }
    if (r.spearman) {
        os << "spearman rho " << format_grams(r.spearman->coefficient, 3) << ", p " << r.spearman->p_value << '\n';
    }
    for (const auto& n : r.notes) os << "note: " << n << '\n';
    return os.str();
}

void write_report(const ComparisonReport& report, const Settings& settings, const std::string& out,
                  const std::string& scatter, const std::string& scatter_json_path) {
    write_file_atomic(out, report_to_json(report).dump(2) + "\n");
    if (!scatter.empty()) {
        std::ostringstream csv;
        write_scatter_csv(csv, report.rows);
        write_file_atomic(scatter, csv.str());
    }
    if (!scatter_json_path.empty()) {
        const double g_per_query = settings.profile.per_query_kwh() * settings.profile.carbon_intensity_g_per_kwh;
        const int max_queries = settings.constants.pre_insight_cap + settings.constants.insight_cap;
        write_file_atomic(scatter_json_path, scatter_json(report.rows, g_per_query, max_queries).dump(2) + "\n");
    }
}

int run_compare(const CompareArgs& a) {
    require_input("compare", "--manual", a.manual);
    require_input("compare", "--llm", a.llm);
    if (a.out.empty()) throw UsageError("compare: --out is required");
    const Settings settings = settings_from(a.profile);
    const auto manual = parse_footprint_csv(read_text_file(a.manual), a.manual);
    const auto llm = parse_footprint_csv(read_text_file(a.llm), a.llm);
    PermutationOptions perm;
    perm.seed = a.seed;
    perm.resamples = a.resamples;
    const auto report = compare_footprints(manual, llm, parse_method(a.p_method), perm);
    write_report(report, settings, a.out, a.scatter, a.scatter_json);
    std::cout << summary_text(report);
    return 0;
}

// ---- pipeline --------------------------------------------------------------

struct PipelineArgs {
    StageArgs stage;
    std::string out_dir;
    std::string p_method = "t";
    std::uint64_t seed = 0;
    std::size_t resamples = 100000;
    bool resume = false;
};

int run_pipeline(const PipelineArgs& a) {
    if (a.out_dir.empty()) throw UsageError("pipeline: --out-dir is required");
    const Settings settings = settings_from(a.stage.profile);
    const fs::path dir = a.out_dir;
    const fs::path manual_csv = dir / "manual.csv";
    const fs::path llm_csv = dir / "llm.csv";

    std::optional<TaskInputs> inputs;
    auto load = [&]() -> const TaskInputs& {
        if (!inputs) inputs = inputs_for("pipeline", a.stage, settings);
        return *inputs;
    };

    if (!(a.resume && fs::exists(manual_csv))) {
        const auto rows = run_manual(load().aggregates, settings);
        write_file_atomic(manual_csv, render_manual_csv(rows));
        std::cout << "manual\n" << render_manual_table(rows) << '\n';
    }
    if (!(a.resume && fs::exists(llm_csv))) {
        const auto rows = llm_rows("pipeline", a.stage, load(), settings);
        write_file_atomic(llm_csv, render_llm_csv(rows));
        std::cout << "llm-assisted\n" << render_llm_table(rows) << '\n';
    }

    const auto manual = parse_footprint_csv(read_text_file(manual_csv), manual_csv.string());
    const auto llm = parse_footprint_csv(read_text_file(llm_csv), llm_csv.string());
    PermutationOptions perm;
    perm.seed = a.seed;
    perm.resamples = a.resamples;
    const auto report = compare_footprints(manual, llm, parse_method(a.p_method), perm);
    write_report(report, settings, (dir / "report.json").string(), (dir / "scatter.csv").string(),
                 (dir / "scatter.json").string());
    std::cout << summary_text(report);
    return 0;
}

// ---- llm-run ---------------------------------------------------------------

struct LlmRunArgs {
    StageArgs stage;
    std::string task;
    std::string statement;
    std::string insight;
    int reps = 0;
    std::string replay;
    std::string judge;
    std::string judge_mode = "replay";
    std::string prompts = std::string(DEVCARBON_DATA_DIR) + "/prompts";
    std::string python = "python3";
    int time_limit_s = 10;
};

fs::path partial_path(const fs::path& out) {
    fs::path p = out;
    p.replace_extension(".partial.json");
    return p;
}

int run_llm_stage(const LlmRunArgs& a) {
    const Settings settings = settings_from(a.stage.profile);
    if (a.task.empty()) throw UsageError("llm-run: --task is required");
    if (a.stage.out.empty()) throw UsageError("llm-run: --out is required");
    const TaskInputs inputs = inputs_for("llm-run", a.stage, settings);
    if (!inputs.find(a.task)) throw UsageError("llm-run: task " + a.task + " is not in the fixture");

    require_input("llm-run", "--statement", a.statement);
    TaskPrompt prompt{a.task, read_text_file(a.statement), std::nullopt};
    if (!a.insight.empty()) {
        require_input("llm-run", "--insight", a.insight);
        prompt.insight = read_text_file(a.insight);
    }
    const auto templates = PromptTemplates::load(a.prompts);
    const int reps = a.reps > 0 ? a.reps : settings.constants.repetitions;

    std::vector<LlmSessionRecord> recorded;
    std::unique_ptr<LlmClient> llm;
    std::unique_ptr<LlmClient> inner;
    std::unique_ptr<HttpTransport> transport;
    if (!a.replay.empty()) {
        require_input("llm-run", "--replay", a.replay);
        RepetitionSummary log = parse_session_log(read_text_file(a.replay));
        if (log.task_id != a.task) {
            throw DataError("llm-run: replay log is for task " + log.task_id + ", not " + a.task);
        }
        recorded = std::move(log.sessions);
        llm = std::make_unique<ReplayLlmClient>(recorded);
    } else {
        const char* key = std::getenv(settings.llm.api_key_env.c_str());
        if (!key || !*key) throw UsageError("llm-run: set " + settings.llm.api_key_env + " or pass --replay");
        transport = make_curl_transport(std::chrono::seconds{settings.llm.timeout_s});
        inner = std::make_unique<ChatCompletionClient>(*transport, settings.llm, key);
        RetryPolicy policy;
        policy.max_attempts = settings.llm.max_attempts;
        policy.initial_backoff = std::chrono::milliseconds{settings.llm.backoff_ms};
        llm = std::make_unique<RetryingLlmClient>(*inner, policy);
    }

    std::unique_ptr<Judge> judge;
    if (a.judge_mode == "replay") {
        if (!a.judge.empty()) {
            require_input("llm-run", "--judge", a.judge);
            judge = std::make_unique<ReplayJudge>(ReplayJudge::from_json(nlohmann::json::parse(read_text_file(a.judge))));
        } else if (!recorded.empty()) {
            judge = std::make_unique<ReplayJudge>(ReplayJudge::from_sessions(recorded));
        } else {
            throw UsageError("llm-run: --judge is required without --replay");
        }
    } else if (a.judge_mode == "local") {
        require_input("llm-run", "--judge", a.judge);
        judge = std::make_unique<LocalProcessJudge>(nlohmann::json::parse(read_text_file(a.judge)), a.python,
                                                    std::chrono::seconds{a.time_limit_s});
    } else {
        throw UsageError("llm-run: --judge-mode must be 'replay' or 'local'");
    }

    try {
        const auto summary = run_repetitions(prompt, *llm, *judge, templates, settings.constants, reps);
        write_file_atomic(a.stage.out, render_session_log(summary));
        std::cout << "task " << summary.task_id << ": " << summary.sessions.size() << " sessions, mean NQBH "
                  << format_grams(summary.mean_nqbh, 2) << ", mean NHIQ " << format_grams(summary.mean_nhiq, 2)
                  << ", mean TPAH " << format_grams(summary.mean_tpah, 2) << '\n';
    } catch (const SessionError& e) {
        auto sessions = e.completed();
        sessions.push_back(e.partial());
        RepetitionSummary partial;
        partial.task_id = a.task;
        partial.sessions = std::move(sessions);
        const auto path = partial_path(a.stage.out);
        write_file_atomic(path, nlohmann::json(partial).dump(2) + "\n");
        std::cerr << "partial sessions written to " << path.string() << '\n';
        throw;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy and carbon footprint of manual vs LLM-assisted solving of programming-contest tasks."};
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Fetch a contest and compute per-task aggregates");
    ingest_cmd->add_option("--contest", ingest.contest, "Codeforces contest id");
    ingest_cmd->add_option("--out", ingest.out, "Write the raw contest fixture here");
    ingest_cmd->add_option("--input", ingest.input, "Aggregate an existing raw fixture instead of fetching");
    ingest_cmd->add_option("--aggregates", ingest.aggregates, "Write the aggregation result here");
    ingest_cmd->add_option("--profile", ingest.profile, "Settings file (RAM capacity)");
    ingest_cmd->add_option("--min-solvers", ingest.min_solvers, "Exclude tasks with fewer solvers")->capture_default_str();
    ingest_cmd->add_option("--language", ingest.language, "Language filter; 'all' disables it")->capture_default_str();
    ingest_cmd->add_option("--page-size", ingest.page_size, "Submissions per contest.status request")->capture_default_str();
    ingest_cmd->add_option("--interval-ms", ingest.interval_ms, "Minimum delay between API requests")->capture_default_str();
    ingest_cmd->add_option("--base-url", ingest.base_url, "API base URL")->capture_default_str();

    StageArgs manual;
    auto* manual_cmd = app.add_subcommand("manual", "Manual-development energy per task");
    manual_cmd->add_option("--fixture", manual.fixture, "Task fixture (raw contest or aggregates)");
    manual_cmd->add_option("--profile", manual.profile, "Settings file; built-in defaults if omitted");
    manual_cmd->add_option("--out", manual.out, "Output CSV");
    manual_cmd->add_option("--min-solvers", manual.min_solvers, "Used when aggregating a raw fixture")->capture_default_str();
    manual_cmd->add_option("--language", manual.language, "Used when aggregating a raw fixture")->capture_default_str();

    LlmRunArgs run;
    auto* run_cmd = app.add_subcommand("llm-run", "Run (or replay) the LLM repair protocol for one task");
    run_cmd->add_option("--fixture", run.stage.fixture, "Task fixture");
    run_cmd->add_option("--task", run.task, "Task id, e.g. 1983A");
    run_cmd->add_option("--statement", run.statement, "Task statement text file");
    run_cmd->add_option("--insight", run.insight, "Human insight text file");
    run_cmd->add_option("--reps", run.reps, "Repetitions (default from settings)");
    run_cmd->add_option("--replay", run.replay, "Replay a recorded session log instead of calling the LLM");
    run_cmd->add_option("--judge", run.judge, "Verdict file (replay mode) or test-case file (local mode)");
    run_cmd->add_option("--judge-mode", run.judge_mode, "replay or local")->capture_default_str();
    run_cmd->add_option("--python", run.python, "Interpreter for the local judge")->capture_default_str();
    run_cmd->add_option("--time-limit", run.time_limit_s, "Local judge time limit per test, seconds")->capture_default_str();
    run_cmd->add_option("--prompts", run.prompts, "Directory with initial.txt, repair.txt, insight.txt")->capture_default_str();
    run_cmd->add_option("--profile,--config", run.stage.profile, "Settings file (LLM endpoint, caps)");
    run_cmd->add_option("--out", run.stage.out, "Session log output");

    StageArgs estimate;
    auto* estimate_cmd = app.add_subcommand("llm-estimate", "LLM-assisted energy per task");
    estimate_cmd->add_option("--sessions", estimate.sessions, "Session log directory or file");
    estimate_cmd->add_option("--fixture", estimate.fixture, "Task fixture");
    estimate_cmd->add_option("--profile", estimate.profile, "Settings file; built-in defaults if omitted");
    estimate_cmd->add_option("--out", estimate.out, "Output CSV");
    estimate_cmd->add_option("--min-solvers", estimate.min_solvers, "Used when aggregating a raw fixture")->capture_default_str();
    estimate_cmd->add_option("--language", estimate.language, "Used when aggregating a raw fixture")->capture_default_str();

    CompareArgs compare;
    auto* compare_cmd = app.add_subcommand("compare", "Ratios, correlations and scatter data");
    compare_cmd->add_option("--manual", compare.manual, "CSV from the manual stage");
    compare_cmd->add_option("--llm", compare.llm, "CSV from the llm-estimate stage");
    compare_cmd->add_option("--out", compare.out, "Report JSON");
    compare_cmd->add_option("--scatter", compare.scatter, "Scatter CSV (MTS vs footprint difference)");
    compare_cmd->add_option("--scatter-json", compare.scatter_json, "Scatter JSON with best-fit line");
    compare_cmd->add_option("--profile", compare.profile, "Settings file (per-query grams for the overlay)");
    compare_cmd->add_option("--p-method", compare.p_method, "t or permutation")->capture_default_str();
    compare_cmd->add_option("--seed", compare.seed, "Permutation sampling seed")->capture_default_str();
    compare_cmd->add_option("--resamples", compare.resamples, "Permutation samples when n > 10")->capture_default_str();

    PipelineArgs pipeline;
    auto* pipeline_cmd = app.add_subcommand("pipeline", "manual, llm-estimate and compare in one go");
    pipeline_cmd->add_option("--fixture", pipeline.stage.fixture, "Task fixture");
    pipeline_cmd->add_option("--profile", pipeline.stage.profile, "Settings file; built-in defaults if omitted");
    pipeline_cmd->add_option("--sessions", pipeline.stage.sessions, "Session logs; fixture llm_means otherwise");
    pipeline_cmd->add_option("--out-dir", pipeline.out_dir, "Output directory");
    pipeline_cmd->add_flag("--resume", pipeline.resume, "Keep stage outputs that already exist");
    pipeline_cmd->add_option("--min-solvers", pipeline.stage.min_solvers, "Used when aggregating a raw fixture")->capture_default_str();
    pipeline_cmd->add_option("--language", pipeline.stage.language, "Used when aggregating a raw fixture")->capture_default_str();
    pipeline_cmd->add_option("--p-method", pipeline.p_method, "t or permutation")->capture_default_str();
    pipeline_cmd->add_option("--seed", pipeline.seed, "Permutation sampling seed")->capture_default_str();
    pipeline_cmd->add_option("--resamples", pipeline.resamples, "Permutation samples when n > 10")->capture_default_str();

    app.footer("Exit codes: 0 ok, 1 usage or configuration error, 2 data error, 3 remote-service error.\n"
               "The LLM API key is read from the variable named by llm.api_key_env (default OPENAI_API_KEY).");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*ingest_cmd) return run_ingest(ingest);
        if (*manual_cmd) return run_manual_stage(manual);
        if (*run_cmd) return run_llm_stage(run);
        if (*estimate_cmd) return run_llm_estimate_stage(estimate);
        if (*compare_cmd) return run_compare(compare);
        if (*pipeline_cmd) return run_pipeline(pipeline);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
