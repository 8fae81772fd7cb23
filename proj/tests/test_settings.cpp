#include "devcarbon/error.hpp"
#include "devcarbon/io.hpp"
#include "devcarbon/settings.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace devcarbon;

TEST(Settings, EmptyTextGivesDefaults) {
    const Settings s = parse_settings("");
    EXPECT_DOUBLE_EQ(s.profile.p_laptop_w, 4.075);
    EXPECT_DOUBLE_EQ(*s.profile.p_runtime_override_w, 14.0);
    EXPECT_FALSE(s.profile.p_cpu_w);
    EXPECT_DOUBLE_EQ(s.constants.debug_time_share, 0.42);
    EXPECT_DOUBLE_EQ(s.constants.read_extend_share(), 0.42 * 0.4);
    EXPECT_EQ(s.constants.pre_insight_cap, 5);
    EXPECT_EQ(s.constants.insight_cap, 3);
    EXPECT_EQ(s.constants.repetitions, 3);
    EXPECT_EQ(s.llm.model, "gpt-4");
}

TEST(Settings, CommentsBlankLinesAndOverrides) {
    const Settings s = parse_settings(
        "# header\n"
        "\n"
        "p_laptop_w = 5.5   # trailing comment\n"
        "p_runtime_override_w = none\n"
        "p_cpu_w = 10\n"
        "p_ram_full_w = 2.5\n"
        "understanding_share=0.5\n"
        "insight_cap = 2\n"
        "llm.model = some-model\n");
    EXPECT_DOUBLE_EQ(s.profile.p_laptop_w, 5.5);
    EXPECT_FALSE(s.profile.p_runtime_override_w);
    EXPECT_DOUBLE_EQ(runtime_power(s.profile, 1.0), 12.5);
    EXPECT_DOUBLE_EQ(s.constants.understanding_share, 0.5);
    EXPECT_EQ(s.constants.insight_cap, 2);
    EXPECT_EQ(s.llm.model, "some-model");
}

TEST(Settings, UnknownKeyNamesOriginAndLine) {
    try {
        parse_settings("p_laptop_w = 4\nlaptop_power = 3\n", "my.cfg");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("my.cfg:2"), std::string::npos) << e.what();
        EXPECT_EQ(exit_code(e.kind()), 1);
    }
}

TEST(Settings, MalformedValuesRejected) {
    EXPECT_THROW(parse_settings("p_laptop_w = fast"), ConfigError);
    EXPECT_THROW(parse_settings("p_laptop_w 4"), ConfigError);
    EXPECT_THROW(parse_settings("insight_cap = 2.5"), ConfigError);
    EXPECT_THROW(parse_settings("p_laptop_w = 4W"), ConfigError);
}

TEST(Settings, InvariantsChecked) {
    EXPECT_THROW(parse_settings("pre_insight_cap = 0"), ConfigError);
    EXPECT_THROW(parse_settings("repetitions = 0"), ConfigError);
    EXPECT_THROW(parse_settings("debug_time_share = 1.2"), ConfigError);
    EXPECT_THROW(parse_settings("read_share = 0.6\nedit_share = 0.6"), ConfigError);
    EXPECT_THROW(parse_settings("carbon_intensity_g_per_kwh = 0"), ConfigError);
    EXPECT_THROW(parse_settings("llm.max_attempts = 0"), ConfigError);
}

TEST(Settings, RenderRoundTrips) {
    Settings s;
    s.profile.p_laptop_w = 3.59;
    s.profile.p_cpu_w = 11.25;
    s.profile.p_runtime_override_w.reset();
    s.constants.insight_cap = 4;
    s.llm.temperature = 0.2;
    const Settings back = parse_settings(render_settings(s));
    EXPECT_EQ(render_settings(back), render_settings(s));
    EXPECT_DOUBLE_EQ(back.profile.p_laptop_w, 3.59);
    EXPECT_FALSE(back.profile.p_runtime_override_w);
    EXPECT_EQ(back.constants.insight_cap, 4);
}

TEST(Settings, ShippedProfileMatchesDefaults) {
    const Settings shipped = load_settings(test::data_dir() / "default_profile.cfg");
    EXPECT_EQ(render_settings(shipped), render_settings(Settings{}));
}

TEST(Settings, MissingFileIsUsageError) {
    EXPECT_THROW(load_settings("/nonexistent/devcarbon.cfg"), UsageError);
}

TEST(Io, AtomicWriteCreatesParentsAndLeavesNoTemp) {
    test::ScratchDir dir("io");
    const auto target = dir / "a/b/out.txt";
    write_file_atomic(target, "hello\n");
    EXPECT_EQ(read_text_file(target), "hello\n");
    write_file_atomic(target, "again");
    EXPECT_EQ(read_text_file(target), "again");
    EXPECT_FALSE(std::filesystem::exists(target.string() + ".tmp"));
    EXPECT_THROW(read_text_file(dir / "missing"), DataError);
}
