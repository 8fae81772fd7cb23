#include "devcarbon/codeforces.hpp"

#include "devcarbon/error.hpp"
#include "text_util.hpp"

#include <nlohmann/json.hpp>

#include <set>

namespace devcarbon {

namespace {

std::string participant_of(const nlohmann::json& author) {
    std::string id;
    for (const auto& m : author.value("members", nlohmann::json::array())) {
        if (!id.empty()) id += ',';
        id += m.value("handle", "");
    }
    if (id.empty() && author.contains("teamId")) id = "team:" + std::to_string(author["teamId"].get<long long>());
    return id;
}

}  // namespace

CodeforcesClient::CodeforcesClient(HttpTransport& transport, CodeforcesOptions options, Sleeper sleeper)
    : transport_(transport), options_(std::move(options)), sleeper_(std::move(sleeper)) {
    if (options_.page_size < 1) throw ConfigError("page size must be positive");
    if (options_.retry.max_attempts < 1) throw ConfigError("retry attempts must be positive");
}

void CodeforcesClient::pace() {
    using namespace std::chrono;
    if (last_request_) {
        auto elapsed = duration_cast<milliseconds>(steady_clock::now() - *last_request_);
        if (elapsed < options_.min_request_interval) sleeper_(options_.min_request_interval - elapsed);
    }
    last_request_ = steady_clock::now();
}

nlohmann::json CodeforcesClient::call(const std::string& method, const std::string& query) {
    const std::string url = options_.base_url + "/" + method + "?" + query;
    std::string last_failure;
    for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
        if (attempt > 1) sleeper_(options_.retry.delay_after(attempt - 1));
        pace();

        HttpResponse response;
        try {
            response = transport_.get(url);
        } catch (const TransportError& e) {
            last_failure = e.what();
            continue;
        }

        auto body = nlohmann::json::parse(response.body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) {
            last_failure = "HTTP " + std::to_string(response.status) + " with unparseable body";
            if (response.status == 429 || response.status >= 500) continue;
            throw RemoteError(method + ": " + last_failure);
        }
        if (body.value("status", "") == "OK") return body.at("result");

        const std::string comment = body.value("comment", "no comment");
        const std::string lowered = detail::to_lower(comment);
        if (lowered.find("not found") != std::string::npos) throw NotFoundError(method + ": " + comment);
        last_failure = "HTTP " + std::to_string(response.status) + ": " + comment;
        if (response.status == 429 || response.status >= 500 || lowered.find("limit exceeded") != std::string::npos) {
            continue;
        }
        throw RemoteError(method + ": " + last_failure);
    }
    throw RemoteError(method + " failed after " + std::to_string(options_.retry.max_attempts) +
                      " attempts: " + last_failure);
}

ContestFixture CodeforcesClient::fetch_contest(std::int64_t contest_id) {
    if (contest_id <= 0) throw NotFoundError("contest " + std::to_string(contest_id) + " not found");
    const std::string id = std::to_string(contest_id);

    ContestFixture fixture;
    fixture.contest_id = contest_id;
    auto standings = call("contest.standings", "contestId=" + id + "&from=1&count=1");
    for (const auto& p : standings.at("problems")) {
        fixture.tasks.push_back({p.at("index").get<std::string>(), p.value("name", "")});
    }

    std::set<long long> seen;
    for (long long from = 1;; from += options_.page_size) {
        auto page = call("contest.status", "contestId=" + id + "&from=" + std::to_string(from) +
                                               "&count=" + std::to_string(options_.page_size));
        for (const auto& s : page) {
            // Pages can shift if submissions arrive mid-fetch.
            if (s.contains("id") && !seen.insert(s["id"].get<long long>()).second) continue;
            fixture.submissions.push_back(submission_from_api(s));
        }
        if (page.size() < static_cast<std::size_t>(options_.page_size)) break;
    }
    return fixture;
}

SubmissionRecord submission_from_api(const nlohmann::json& s) {
    SubmissionRecord r;
    const auto& author = s.at("author");
    r.participant_id = participant_of(author);
    r.participant_type = author.value("participantType", "CONTESTANT");
    r.task_index = s.at("problem").at("index").get<std::string>();
    r.relative_time_s = s.at("relativeTimeSeconds").get<double>();
    r.verdict = s.value("verdict", "") == "OK" ? Verdict::accepted : Verdict::rejected;
    r.runtime_ms = s.value("timeConsumedMillis", 0.0);
    r.memory_bytes = s.value("memoryConsumedBytes", 0.0);
    r.language = s.value("programmingLanguage", "");
    return r;
}

}  // namespace devcarbon
