#include <json.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string cli = CAUCHY2MM_CLI;
const std::string samples = CAUCHY2MM_SAMPLES;

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("cauchy2mm_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + cli + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

nlohmann::ordered_json load(const fs::path& p) { return nlohmann::ordered_json::parse(slurp(p)); }

}  // namespace

TEST(CliSchema, MalformedWeightIsExitTwo)
{
    auto dir = scratch("bad");
    write(dir / "broken.json", "{\"a\": 0, \"poly\": [0, 1],");
    write(dir / "extra.json", R"({"a": 0, "poly": [0, 1], "support": [[0, "inf"]], "colour": 3})");
    write(dir / "growth.json", R"({"a": 0, "poly": [0, -1], "support": [[0, "inf"]]})");
    for (const char* f : {"broken.json", "extra.json", "growth.json", "missing.json"})
        EXPECT_EQ(run("bops --weights " + (dir / f).string() + " --out " + (dir / "o").string()), 2) << f;
}

TEST(CliSchema, UnknownOptionIsExitTwo)
{
    EXPECT_EQ(run("bops --weights " + samples + "/laguerre.json --frobnicate"), 2);
    EXPECT_EQ(run("no-such-command"), 2);
}

TEST(CliSchema, ReportLayoutAndManifest)
{
    auto dir = scratch("layout");
    ASSERT_EQ(run("bops --weights " + samples + "/laguerre.json --exact --n-max 3 --out " + dir.string()), 0);
    auto rep = load(dir / "report.json");
    std::vector<std::string> top;
    for (auto it = rep.begin(); it != rep.end(); ++it)
        top.push_back(it.key());
    EXPECT_EQ(top, (std::vector<std::string>{"tool", "command", "timestamp", "ok", "checks"}));
    EXPECT_EQ(rep["command"], "bops");
    EXPECT_EQ(rep["ok"], true);
    ASSERT_FALSE(rep["checks"].empty());
    for (const auto& c : rep["checks"]) {
        auto it = c.begin();
        EXPECT_EQ(it.key(), "check");
        EXPECT_EQ((++it).key(), "point");
        EXPECT_EQ((++it).key(), "residual");
        EXPECT_EQ((++it).key(), "tolerance");
        EXPECT_EQ((++it).key(), "pass");
    }
    auto man = load(dir / "manifest.json");
    EXPECT_EQ(man["seed"], 7);
    EXPECT_TRUE(man.contains("config"));
    EXPECT_TRUE(man["versions"].contains("boost"));
    EXPECT_TRUE(fs::exists(dir / "bimoments.csv"));
}

TEST(CliSchema, RunsAreByteIdenticalApartFromTimestamp)
{
    auto a = scratch("det_a"), b = scratch("det_b");
    const std::string args = "sample --weights " + samples + "/laguerre.json --N 2 --steps 2000 --seed 5 --out ";
    const int ra = run(args + a.string()), rb = run(args + b.string());
    EXPECT_EQ(ra, rb);
    auto ja = load(a / "report.json"), jb = load(b / "report.json");
    ja.erase("timestamp");
    jb.erase("timestamp");
    EXPECT_EQ(ja.dump(), jb.dump());
    EXPECT_EQ(slurp(a / "chain.csv"), slurp(b / "chain.csv"));
    EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
}

TEST(CliSchema, ToleranceOverrideTurnsChecksRed)
{
    auto dir = scratch("tol");
    EXPECT_EQ(run("o1check --alpha " + samples + "/laguerre.json --k 1 --samples 2000 --tolerance 1e-300 --out " + dir.string()), 1);
    EXPECT_EQ(load(dir / "report.json")["ok"], false);
}

TEST(CliSchema, MinimiserFailureIsExitThree)
{
    auto dir = scratch("eq");
    EXPECT_EQ(run("equilibrium --potentials " + samples + "/potentials_logconfined.json --n 20 --max-iters 1 --out " + dir.string()), 3);
}

TEST(CliSchema, PrecisionFromEnvironment)
{
    auto dir = scratch("env");
    ASSERT_EQ(run("bops --weights " + samples + "/laguerre.json --n-max 3 --out " + dir.string(), "CAUCHY_PRECISION_BITS=160"), 0);
    EXPECT_EQ(load(dir / "manifest.json")["precision_bits"], 160);
    EXPECT_EQ(run("bops --weights " + samples + "/laguerre.json --n-max 3 --out " + dir.string(), "CAUCHY_PRECISION_BITS=7"), 2);
    ASSERT_EQ(run("bops --weights " + samples + "/laguerre.json --n-max 3 --precision 200 --out " + dir.string(), "CAUCHY_PRECISION_BITS=160"), 0);
    EXPECT_EQ(load(dir / "manifest.json")["precision_bits"], 200);
}
