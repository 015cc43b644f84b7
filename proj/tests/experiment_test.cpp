#include "levylab/experiment.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace levylab {

namespace {

nlohmann::json minimal_config() {
    return nlohmann::json::parse(R"({
      "schema_version": 1,
      "seed": 7,
      "experiments": [{
        "name": "centre",
        "task": "survival",
        "model": {"kind": "alpha_stable", "alpha": 1.0, "dimension": 1},
        "domain": {"shape": "interval", "a": 1.0},
        "backend": "mc",
        "times": [1.0],
        "points": [[0.0, 0.0]],
        "mc": {"n": 2000, "eps": 0.01}
      }]
    })");
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("levylab-test-" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Config, RoundTrip) {
    const auto c = parse_config(minimal_config());
    const auto again = parse_config(nlohmann::json(c));
    EXPECT_EQ(c, again);
    EXPECT_EQ(config_hash(c), config_hash(again));
}

TEST(Config, RoundTripWithInfiniteRectangle) {
    auto j = minimal_config();
    j["experiments"][0]["task"] = "exit_law";
    j["experiments"][0]["points"] = {{0.3, 0.0}};
    j["experiments"][0]["rectangles"] = {{{"t0", 0}, {"t1", "inf"}, {"lo", "-inf"}, {"hi", -1}}};
    const auto c = parse_config(j);
    EXPECT_TRUE(std::isinf(c.experiments[0].rectangles[0].t1));
    EXPECT_EQ(parse_config(nlohmann::json(c)), c);
}

TEST(Config, HashDependsOnContent) {
    auto j = minimal_config();
    const auto a = config_hash(parse_config(j));
    j["seed"] = 8;
    EXPECT_NE(a, config_hash(parse_config(j)));
}

TEST(Config, ListsEveryOffendingField) {
    auto j = minimal_config();
    j["colour"] = "blue";
    j["experiments"][0]["mc"]["n"] = 0;
    j["experiments"][0]["backend"] = "gpu";
    j["experiments"][0]["times"] = {1.0, 0.5};
    try {
        parse_config(j);
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("colour: unknown field"), std::string::npos);
        EXPECT_NE(msg.find("experiments[0].mc.n"), std::string::npos);
        EXPECT_NE(msg.find("experiments[0].backend"), std::string::npos);
        EXPECT_NE(msg.find("experiments[0].times"), std::string::npos);
    }
}

TEST(Config, RejectsWrongTypes) {
    auto j = minimal_config();
    j["experiments"][0]["mc"]["eps"] = "small";
    EXPECT_THROW(parse_config(j), ValidationError);
    j = minimal_config();
    j["schema_version"] = 2;
    EXPECT_THROW(parse_config(j), ValidationError);
}

TEST(Config, RefusesBrownianWithoutValidationMode) {
    auto j = minimal_config();
    j["experiments"][0]["task"] = "eigen";
    j["experiments"][0]["model"] = {{"kind", "brownian_reference"}};
    j["experiments"][0]["backend"] = "pde";
    try {
        parse_config(j);
        FAIL() << "expected a refusal";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("pure jump"), std::string::npos);
    }
    j["validation_mode"] = true;
    EXPECT_NO_THROW(parse_config(j));
}

TEST(Config, ProfileLayoutMergesPointSets) {
    const ProfileSettings s;
    const auto layout = detail::profile_layout(s);
    EXPECT_EQ(layout.monotone.size(), 33u);
    EXPECT_EQ(layout.concave.size(), 19u);
    for (std::size_t i = 1; i < layout.xs.size(); ++i) EXPECT_GT(layout.xs[i], layout.xs[i - 1]);
    EXPECT_NEAR(layout.xs[layout.concave.front()], -0.45, 1e-12);
    EXPECT_NEAR(layout.xs[layout.monotone.back()], 0.96, 1e-12);
}

TEST(Catalog, ContainsCoreChecks) {
    const auto& c = list_checks();
    ASSERT_FALSE(c.empty());
    const auto has = [&](const std::string& id) {
        return std::any_of(c.begin(), c.end(), [&](const CheckInfo& i) { return i.id == id; });
    };
    EXPECT_TRUE(has("theorem1_monotone"));
    EXPECT_TRUE(has("prop31_sign"));
    EXPECT_TRUE(has("ikeda_watanabe"));
    EXPECT_EQ(&list_checks(), &c);
}

TEST(Run, MinimalConfigWritesOneEstimate) {
    const auto dir = scratch_dir("minimal");
    RunOptions opt;
    opt.output_dir = dir.string();
    const auto result = run(parse_config(minimal_config()), opt);
    const auto report = nlohmann::json::parse(read_file(dir / "centre.json"));
    ASSERT_EQ(report["results"]["estimates"].size(), 1u);
    const auto& est = report["results"]["estimates"][0];
    EXPECT_EQ(est["n"], 2000);
    EXPECT_GT(est["value"].get<double>(), 0.2);
    EXPECT_LT(est["value"].get<double>(), 0.6);
    EXPECT_EQ(report["config_hash"], result.hash);
    const std::string csv = read_file(dir / "centre.csv");
    EXPECT_EQ(csv.rfind("# config_hash=" + result.hash + " seed=", 0), 0u);
    EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
    std::filesystem::remove_all(dir);
}

TEST(Run, ValidateOnlyWritesNothing) {
    const auto dir = scratch_dir("validate");
    RunOptions opt;
    opt.output_dir = dir.string();
    opt.validate_only = true;
    run(parse_config(minimal_config()), opt);
    EXPECT_FALSE(std::filesystem::exists(dir));
}

TEST(Run, ReproducibleAcrossRunsAndWorkers) {
    auto j = minimal_config();
    j["experiments"][0]["task"] = "profile";
    j["experiments"][0]["backend"] = "both";
    j["experiments"][0]["times"] = {0.5};
    j["experiments"][0]["pde"] = {{"nodes", 64}};
    j["experiments"][0]["mc"] = {{"n", 3000}, {"eps", 0.001}};
    const auto c = parse_config(j);
    const auto a_dir = scratch_dir("repro-a");
    const auto b_dir = scratch_dir("repro-b");
    RunOptions a;
    a.output_dir = a_dir.string();
    RunOptions b;
    b.output_dir = b_dir.string();
    b.jobs = 2;
    const auto ra = run(c, a);
    const auto rb = run(c, b);
    EXPECT_EQ(ra.hash, rb.hash);
    EXPECT_EQ(read_file(a_dir / "centre.json"), read_file(b_dir / "centre.json"));
    EXPECT_EQ(read_file(a_dir / "centre.csv"), read_file(b_dir / "centre.csv"));
    EXPECT_EQ(read_file(a_dir / "summary.json"), read_file(b_dir / "summary.json"));
    std::filesystem::remove_all(a_dir);
    std::filesystem::remove_all(b_dir);
}

TEST(Io, Fnv1aReferenceValues) {
    EXPECT_EQ(hex64(fnv1a("")), "cbf29ce484222325");
    EXPECT_EQ(hex64(fnv1a("a")), "af63dc4c8601ec8c");
}

TEST(Io, InfiniteNumbers) {
    EXPECT_EQ(number_to_json(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_TRUE(std::isinf(number_from_json("-inf")));
    EXPECT_EQ(number_from_json(2.5), 2.5);
    EXPECT_THROW(number_from_json("many"), ValidationError);
}

}  // namespace levylab
