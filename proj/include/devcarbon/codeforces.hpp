#pragma once

#include "devcarbon/http.hpp"
#include "devcarbon/ingest.hpp"
#include "devcarbon/retry.hpp"

#include <nlohmann/json_fwd.hpp>

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

namespace devcarbon {

struct CodeforcesOptions {
    std::string base_url = "https://codeforces.com/api";
    int page_size = 10000;
    // The public API allows roughly one call every two seconds.
    std::chrono::milliseconds min_request_interval{2000};
    RetryPolicy retry{5, std::chrono::milliseconds{2000}, 2.0, std::chrono::milliseconds{60000}};
};

/// Pulls task metadata (contest.standings) and every submission
/// (contest.status, paged) for one contest. Requests are strictly sequential.
class CodeforcesClient {
public:
    CodeforcesClient(HttpTransport& transport, CodeforcesOptions options = {}, Sleeper sleeper = real_sleeper());

    /// Throws NotFoundError for unknown contests and RemoteError once retries
    /// are exhausted.
    ContestFixture fetch_contest(std::int64_t contest_id);

private:
    nlohmann::json call(const std::string& method, const std::string& query);
    void pace();

    HttpTransport& transport_;
    CodeforcesOptions options_;
    Sleeper sleeper_;
    std::optional<std::chrono::steady_clock::time_point> last_request_;
};

/// Converts one element of contest.status' result array.
SubmissionRecord submission_from_api(const nlohmann::json& submission);

}  // namespace devcarbon
