#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(GENFN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("genfn_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("reproduce writes byte-identical tables on repeat runs") {
    const auto a = scratch("a"), b = scratch("b");
    REQUIRE(run("reproduce --out " + a.string()) == 0);
    REQUIRE(run("reproduce --out " + b.string()) == 0);
    CHECK(fs::exists(a / "reproduce.csv"));
    CHECK(slurp(a / "reproduce.csv") == slurp(b / "reproduce.csv"));
    CHECK(slurp(a / "reproduce_summary.json") == slurp(b / "reproduce_summary.json"));
    CHECK_FALSE(fs::exists(a / "reproduce_failures.json"));
    const auto summary = nlohmann::json::parse(slurp(a / "reproduce_summary.json"));
    CHECK(summary["implication3_fails"] == true);
}

TEST_CASE("qft writes both tables") {
    const auto a = scratch("qft");
    REQUIRE(run("qft --out " + a.string()) == 0);
    CHECK(fs::exists(a / "qft.csv"));
    CHECK(fs::exists(a / "dyson.csv"));
}

TEST_CASE("flags override the configuration") {
    const auto a = scratch("flags");
    REQUIRE(run("reproduce --out " + a.string() + " --mollifier cosine_power:k=6 --grid 0.1,0.5,6 --seed 9") == 0);
    const auto csv = slurp(a / "reproduce.csv");
    CHECK(csv.find("cosine_power:k=6") != std::string::npos);
    CHECK(csv.find(",bump,") == std::string::npos);
    const auto summary = nlohmann::json::parse(slurp(a / "reproduce_summary.json"));
    CHECK(summary["config"]["suite"]["seed"] == 9);
    CHECK(summary["eq2"].size() == 6);
}

TEST_CASE("gate failures exit 1 with a manifest and partial output") {
    const auto a = scratch("fail");
    fs::create_directories(a);
    std::ofstream(a / "cfg.ini") << "[thresholds]\nnegligible_order = 0\n";
    CHECK(run("reproduce --config " + (a / "cfg.ini").string() + " --out " + a.string()) == 1);
    CHECK(fs::exists(a / "reproduce.csv"));
    REQUIRE(fs::exists(a / "reproduce_failures.json"));
    const auto manifest = nlohmann::json::parse(slurp(a / "reproduce_failures.json"));
    CHECK(manifest["failures"].size() == 1);
}

TEST_CASE("bad input exits 2") {
    const auto a = scratch("bad");
    fs::create_directories(a);
    std::ofstream(a / "cfg.ini") << "[grid]\nwidth = 3\n";
    CHECK(run("reproduce --config " + (a / "cfg.ini").string()) == 2);
    CHECK(run("reproduce --config /nonexistent.ini") == 2);
    CHECK(run("reproduce --grid 0.1,0.5") == 2);
    CHECK(run("qft --mollifier wedge") == 2);
    CHECK(run("eval 'int((H^2 - H) * H'") == 2);
    CHECK(run("eval 'int(int(H))'") == 2);
    CHECK(run("classify 'H^2 - H'") == 2);
    CHECK(run("frobnicate") == 2);
}

TEST_CASE("eval and classify succeed on the documented examples") {
    CHECK(run("eval \"int((H^2 - H) * H')\"") == 0);
    CHECK(run("eval 'pair(H^2 - H, 0)'") == 0);
    CHECK(run("classify 'int(D*D)'") == 0);
    CHECK(run("eval 'H^2 - H'") == 0);
}

TEST_CASE("well-typed expressions that fail to evaluate exit 1") {
    CHECK(run("eval 'int(H)'") == 1);
    CHECK(run("classify 'pair(H, 99)'") == 1);
}
