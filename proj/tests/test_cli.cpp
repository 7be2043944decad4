#include "cli.hpp"
#include "hibarrier/report.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hibarrier;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("hibarrier-cli-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string emit(const std::string& id) {
        const std::string path = (dir_ / (id + ".json")).string();
        EXPECT_EQ(run({"examples", "emit", id, "--out", path}).code, cli::kOk);
        return path;
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    return nlohmann::json::parse(in);
}

}  // namespace

TEST_F(CliTest, CheckExitCodes) {
    EXPECT_EQ(run({"check", emit("exprj"), "--theorem", "contract-c1", "--theorem", "contract-complete"}).code, cli::kOk);
    EXPECT_EQ(run({"check", emit("expillu"), "--theorem", "thm1"}).code, cli::kViolated);
    EXPECT_EQ(run({"check", emit("thermostat"), "--theorem", "contract-lip", "--samples", "50"}).code, cli::kViolated);
    const auto cset = run({"check", emit("expCsets"), "--theorem", "cset"});
    EXPECT_EQ(cset.code, cli::kOk);
}

TEST_F(CliTest, CheckInconclusive) {
    // Option c needs a convex C; the union fails the spot-check.
    EXPECT_EQ(run({"check", emit("expcount"), "--theorem", "boundary", "--option", "c", "--samples", "60"}).code,
              cli::kInconclusive);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({"check", path("missing.json"), "--theorem", "thm1"}).code, cli::kUsage);
    EXPECT_EQ(run({"check", emit("exp1"), "--theorem", "nope"}).code, cli::kUsage);
    EXPECT_EQ(run({"check", emit("exp1")}).code, cli::kUsage);
    EXPECT_EQ(run({"simulate", emit("thermostat"), "--x0", "0.5,1"}).code, cli::kUsage);
    EXPECT_EQ(run({"simulate", emit("thermostat"), "--x0", "0"}).code, cli::kUsage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);

    std::ofstream(path("bad.json")) << R"({"dim": 2, "C": {"all": []}, "D": {"any": []}, "F": ["x1", "x2 +* 1"],
      "G": ["x1", "x2"], "barrier": ["x1"], "box": {"lo": [-1, -1], "hi": [1, 1]}})";
    const auto r = run({"check", path("bad.json"), "--theorem", "thm1"});
    EXPECT_EQ(r.code, cli::kUsage);
    EXPECT_NE(r.err.find("bad.json:1:"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("/F/1"), std::string::npos) << r.err;
}

TEST_F(CliTest, EmitThenCheckMatchesExpected) {
    const std::string file = emit("bouncing-ball");
    EXPECT_EQ(read_json(file)["name"], "bouncing-ball");
    EXPECT_EQ(run({"check", file, "--theorem", "thm1", "--theorem", "invariance"}).code, cli::kOk);
    EXPECT_EQ(run({"check", file, "--theorem", "contract-c1"}).code, cli::kViolated);
}

TEST_F(CliTest, ReportsAreReproducible) {
    const std::string file = emit("thermostat");
    ASSERT_EQ(run({"check", file, "--theorem", "thm1", "--seed", "5", "--report", path("a.json")}).code, cli::kOk);
    ASSERT_EQ(run({"check", file, "--theorem", "thm1", "--seed", "5", "--workers", "4", "--report", path("b.json")}).code,
              cli::kOk);
    auto a = read_json(path("a.json"));
    auto b = read_json(path("b.json"));
    EXPECT_EQ(a["tool"], "hibarrier");
    EXPECT_EQ(a["command"], "check");
    EXPECT_EQ(a["results"][0]["status"], "NoViolationFound");
    a["config"]["settings"].erase("workers");
    b["config"]["settings"].erase("workers");
    EXPECT_EQ(report::without_timing(a), report::without_timing(b));
}

TEST_F(CliTest, SimulateWritesCsv) {
    const std::string file = emit("bouncing-ball");
    const auto r = run({"simulate", file, "--x0", "0,1", "--horizon", "2.5,1", "--step", "0.01"});
    ASSERT_EQ(r.code, cli::kOk);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,j,x1,x2,B1,flag");
    EXPECT_NE(r.out.find(",jump\n"), std::string::npos);
    EXPECT_NE(r.err.find("HorizonReached"), std::string::npos) << r.err;

    ASSERT_EQ(run({"simulate", file, "--x0", "0,1", "--policy", "random", "--seed", "3", "--out", path("a.csv")}).code, cli::kOk);
    ASSERT_EQ(run({"simulate", file, "--x0", "0,1", "--policy", "random", "--seed", "3", "--out", path("b.csv")}).code, cli::kOk);
    std::stringstream a, b;
    a << std::ifstream(path("a.csv")).rdbuf();
    b << std::ifstream(path("b.csv")).rdbuf();
    EXPECT_FALSE(a.str().empty());
    EXPECT_EQ(a.str(), b.str());
}

TEST_F(CliTest, Falsify) {
    const auto found = run({"falsify", emit("expillu"), "--horizon", "1,0", "--step", "1e-3", "--out", path("w.csv"),
                            "--report", path("r.json")});
    EXPECT_EQ(found.code, cli::kViolated);
    EXPECT_TRUE(fs::exists(path("w.csv")));
    EXPECT_EQ(read_json(path("r.json"))["results"]["result"], "counterexample");
    EXPECT_EQ(run({"falsify", emit("thermostat"), "--budget", "30"}).code, cli::kOk);
    EXPECT_EQ(run({"falsify", emit("bouncing-ball"), "--mode", "contractivity", "--budget", "10", "--horizon", "0.5,2"}).code,
              cli::kViolated);
    EXPECT_EQ(run({"falsify", emit("exprj"), "--mode", "sideways"}).code, cli::kUsage);
}

TEST_F(CliTest, ExamplesListAndRun) {
    const auto list = run({"examples", "list"});
    ASSERT_EQ(list.code, cli::kOk);
    for (const char* id : {"exp1", "thermostat", "bouncing-ball", "exp1nwbis", "expillu", "expcount", "expcount-fixed", "exprj",
                           "expCsets"}) {
        EXPECT_NE(list.out.find(std::string(id) + " "), std::string::npos) << id;
    }
    const auto r = run({"examples", "run", "exp1"});
    EXPECT_EQ(r.code, cli::kOk) << r.out;
    EXPECT_NE(r.out.find("note:"), std::string::npos);
    EXPECT_EQ(run({"examples", "run", "nope"}).code, cli::kUsage);
}

TEST(CliParsing, PoliciesAndOverlap) {
    EXPECT_EQ(cli::parse_policy("const:0.1,0.2").lambda.size(), 2);
    EXPECT_EQ(cli::parse_policy("random").kind, ParameterRule::Kind::PerStepRandom);
    EXPECT_EQ(cli::parse_policy("adversarial:4").grid, 4);
    EXPECT_THROW((void)cli::parse_policy("adversarial:1"), std::invalid_argument);
    EXPECT_THROW((void)cli::parse_policy("const:2"), std::invalid_argument);
    EXPECT_EQ(cli::parse_overlap("jump").kind, OverlapRule::Kind::PreferJump);
    EXPECT_DOUBLE_EQ(cli::parse_overlap("bernoulli:0.3").p, 0.3);
    EXPECT_THROW((void)cli::parse_overlap("bernoulli:2"), std::invalid_argument);
}
