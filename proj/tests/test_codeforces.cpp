#include "devcarbon/codeforces.hpp"
#include "devcarbon/error.hpp"
#include "support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace devcarbon;
using test::FakeTransport;

namespace {

std::string ok(const nlohmann::json& result) { return nlohmann::json{{"status", "OK"}, {"result", result}}.dump(); }

std::string failed(const std::string& comment) {
    return nlohmann::json{{"status", "FAILED"}, {"comment", comment}}.dump();
}

nlohmann::json api_submission(long long id, const std::string& handle, const std::string& task, long long t,
                              const std::string& verdict) {
    return {{"id", id},
            {"contestId", 1983},
            {"relativeTimeSeconds", t},
            {"problem", {{"contestId", 1983}, {"index", task}}},
            {"author", {{"members", {{{"handle", handle}}}}, {"participantType", "CONTESTANT"}}},
            {"programmingLanguage", "Python 3"},
            {"verdict", verdict},
            {"timeConsumedMillis", 46},
            {"memoryConsumedBytes", 102400}};
}

std::string standings() {
    return ok({{"contest", {{"id", 1983}}},
               {"problems", {{{"index", "A"}, {"name", "One"}}, {{"index", "B"}, {"name", "Two"}}}},
               {"rows", nlohmann::json::array()}});
}

CodeforcesOptions fast(int page_size = 2) {
    CodeforcesOptions o;
    o.page_size = page_size;
    o.min_request_interval = std::chrono::milliseconds{0};
    o.retry = {3, std::chrono::milliseconds{100}, 2.0, std::chrono::milliseconds{1000}};
    return o;
}

}  // namespace

TEST(Codeforces, FetchesStandingsThenPagesStatus) {
    FakeTransport http;
    http.steps.push_back({200, standings()});
    http.steps.push_back({200, ok({api_submission(1, "ann", "A", 100, "OK"), api_submission(2, "bob", "A", 90, "WRONG_ANSWER")})});
    http.steps.push_back({200, ok({api_submission(2, "bob", "A", 90, "WRONG_ANSWER"), api_submission(3, "bob", "B", 900, "OK")})});
    http.steps.push_back({200, ok(nlohmann::json::array())});
    test::RecordingSleeper sleeper;
    CodeforcesClient client(http, fast(), sleeper);

    const ContestFixture f = client.fetch_contest(1983);
    EXPECT_EQ(f.contest_id, 1983);
    ASSERT_EQ(f.tasks.size(), 2u);
    EXPECT_EQ(f.tasks[1].name, "Two");
    ASSERT_EQ(f.submissions.size(), 3u);  // id 2 repeated across pages
    EXPECT_EQ(f.submissions[0].participant_id, "ann");
    EXPECT_EQ(f.submissions[0].verdict, Verdict::accepted);
    EXPECT_EQ(f.submissions[1].verdict, Verdict::rejected);
    EXPECT_DOUBLE_EQ(f.submissions[0].runtime_ms, 46);
    EXPECT_DOUBLE_EQ(f.submissions[0].memory_bytes, 102400);
    EXPECT_EQ(f.submissions[0].language, "Python 3");

    ASSERT_EQ(http.urls.size(), 4u);
    EXPECT_NE(http.urls[0].find("contest.standings?contestId=1983"), std::string::npos);
    EXPECT_NE(http.urls[1].find("contest.status?contestId=1983&from=1&count=2"), std::string::npos);
    EXPECT_NE(http.urls[2].find("from=3&count=2"), std::string::npos);
    EXPECT_TRUE(sleeper.delays->empty());
}

TEST(Codeforces, ContestZeroIsNotFound) {
    FakeTransport http;
    CodeforcesClient client(http, fast());
    EXPECT_THROW(client.fetch_contest(0), NotFoundError);
    EXPECT_TRUE(http.urls.empty());
}

TEST(Codeforces, UnknownContestCommentIsNotFound) {
    FakeTransport http;
    http.steps.push_back({400, failed("contestId: Contest with id 999999 not found")});
    CodeforcesClient client(http, fast());
    try {
        client.fetch_contest(999999);
        FAIL();
    } catch (const NotFoundError& e) {
        EXPECT_EQ(exit_code(e.kind()), 3);
    }
}

TEST(Codeforces, RetriesTransientFailuresWithBackoff) {
    FakeTransport http;
    http.steps.push_back({0, "", true});
    http.steps.push_back({503, "<html>busy</html>"});
    http.steps.push_back({200, standings()});
    http.steps.push_back({429, failed("Call limit exceeded")});
    http.steps.push_back({200, ok(nlohmann::json::array({api_submission(1, "ann", "A", 100, "OK")}))});
    test::RecordingSleeper sleeper;
    CodeforcesClient client(http, fast(), sleeper);

    const auto f = client.fetch_contest(1983);
    EXPECT_EQ(f.submissions.size(), 1u);
    using ms = std::chrono::milliseconds;
    EXPECT_EQ(*sleeper.delays, (std::vector<ms>{ms{100}, ms{200}, ms{100}}));
}

TEST(Codeforces, GivesUpAfterMaxAttempts) {
    FakeTransport http;
    for (int i = 0; i < 3; ++i) http.steps.push_back({502, "bad gateway"});
    test::RecordingSleeper sleeper;
    CodeforcesClient client(http, fast(), sleeper);
    EXPECT_THROW(client.fetch_contest(1983), RemoteError);
    EXPECT_EQ(http.urls.size(), 3u);
}

TEST(Codeforces, NonRetryableFailureSurfacesImmediately) {
    FakeTransport http;
    http.steps.push_back({400, failed("count: Field should contain long integer value")});
    CodeforcesClient client(http, fast());
    EXPECT_THROW(client.fetch_contest(1983), RemoteError);
    EXPECT_EQ(http.urls.size(), 1u);
}

TEST(Codeforces, PacesRequests) {
    FakeTransport http;
    http.steps.push_back({200, standings()});
    http.steps.push_back({200, ok(nlohmann::json::array())});
    test::RecordingSleeper sleeper;
    auto options = fast();
    options.min_request_interval = std::chrono::milliseconds{60000};
    CodeforcesClient client(http, options, sleeper);
    client.fetch_contest(1983);
    ASSERT_EQ(sleeper.delays->size(), 1u);
    EXPECT_GT(sleeper.delays->front().count(), 59000);
}

TEST(Codeforces, TeamsAndParticipantTypes) {
    auto s = api_submission(5, "x", "A", 10, "OK");
    s["author"] = {{"members", {{{"handle", "a"}}, {{"handle", "b"}}}}, {"participantType", "VIRTUAL"}, {"teamId", 3}};
    const auto r = submission_from_api(s);
    EXPECT_EQ(r.participant_id, "a,b");
    EXPECT_EQ(r.participant_type, "VIRTUAL");
}
