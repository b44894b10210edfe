#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Invocation {
    int exit_code;
    std::string out;
};

Invocation run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(VERIFY_EXE) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
    const int st = pclose(pipe);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("specrec_cli_" + name); }

}  // namespace

TEST(Cli, JsonReportSchema) {
    const Invocation r = run("arith --seed 7");
    ASSERT_EQ(r.exit_code, 0);
    const Json j = Json::parse(r.out);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"schema", "suite", "seed", "checks"}));
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["suite"], "arith");
    EXPECT_EQ(j["seed"], 7);
    ASSERT_GE(j["checks"].size(), 5u);
    for (const auto& c : j["checks"]) {
        for (const char* k : {"name", "paper_ref", "status", "max_abs_err", "tolerance", "params", "runtime_ms"})
            EXPECT_TRUE(c.contains(k)) << k;
        EXPECT_FALSE(c["paper_ref"].get<std::string>().empty());
        EXPECT_TRUE(c["runtime_ms"].is_null());
        EXPECT_TRUE(c["params"].is_object());
        const std::string st = c["status"];
        if (st != "SKIP") EXPECT_EQ(st == "PASS", c["max_abs_err"].get<double>() <= c["tolerance"].get<double>());
    }
}

TEST(Cli, TimingsAddRuntimeAndTimestamp) {
    const Json j = Json::parse(run("arith --timings").out);
    EXPECT_TRUE(j.contains("timestamp"));
    for (const auto& c : j["checks"]) EXPECT_TRUE(c["runtime_ms"].is_number());
}

TEST(Cli, ZeroToleranceFails) {
    const Invocation r = run("arith --tol 0");
    EXPECT_EQ(r.exit_code, 1);
    int fails = 0;
    const Json j = Json::parse(r.out);
    for (const auto& c : j["checks"]) {
        EXPECT_EQ(c["tolerance"], 0.0);
        fails += c["status"].get<std::string>() == "FAIL";
    }
    EXPECT_GT(fails, 0);
}

TEST(Cli, ReportIsByteIdenticalAcrossRunsAndPoolSizes) {
    const fs::path a = tmp("a.json"), b = tmp("b.json");
    ASSERT_EQ(run("special --seed 3 --out " + a.string(), "SPECREC_THREADS=1").exit_code, 0);
    ASSERT_EQ(run("special --seed 3 --out " + b.string(), "SPECREC_THREADS=3").exit_code, 0);
    const std::string sa = slurp(a);
    EXPECT_FALSE(sa.empty());
    EXPECT_EQ(sa, slurp(b));
    EXPECT_NE(sa, run("special --seed 4").out);
    fs::remove(a);
    fs::remove(b);
}

TEST(Cli, CsvProjection) {
    const Invocation r = run("spectral --format csv");
    ASSERT_EQ(r.exit_code, 0);
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "schema,suite,seed,name,paper_ref,status,max_abs_err,tolerance,params,runtime_ms");
    std::set<std::string> names;
    while (std::getline(is, line)) {
        EXPECT_EQ(line.rfind("1,spectral,42,", 0), 0u) << line;
        names.insert(line.substr(14, line.find(',', 14) - 14));
    }
    const Json j = Json::parse(run("spectral").out);
    EXPECT_EQ(names.size(), j["checks"].size());
    for (const auto& c : j["checks"]) EXPECT_TRUE(names.count(c["name"].get<std::string>())) << c["name"];
}

TEST(Cli, SmallTruncationSkipsInsteadOfFailing) {
    const Invocation r = run("local --trunc 1000");
    EXPECT_EQ(r.exit_code, 0);
    int skips = 0;
    const Json j = Json::parse(r.out);
    for (const auto& c : j["checks"])
        if (c["status"].get<std::string>() == "SKIP") {
            ++skips;
            EXPECT_TRUE(c["params"].contains("skip_reason"));
        }
    EXPECT_GE(skips, 2);
}

TEST(Cli, ConfigurationErrors) {
    EXPECT_EQ(run("nosuch").exit_code, 2);
    EXPECT_EQ(run("").exit_code, 2);
    EXPECT_EQ(run("arith --format xml").exit_code, 2);
    EXPECT_EQ(run("arith --trunc 0").exit_code, 2);
    EXPECT_EQ(run("arith --trunc 20000000").exit_code, 2);
    EXPECT_EQ(run("arith --tol -1").exit_code, 2);
    EXPECT_EQ(run("arith", "SPECREC_THREADS=0").exit_code, 2);
    EXPECT_EQ(run("arith --out /nonexistent_dir/r.json").exit_code, 2);
}
