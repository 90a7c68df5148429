#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
    int code = -1;
    std::string out;
};

Result sh(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + " '" SHARPCONE_CLI_PATH "' " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    Result r;
    if (!p)
        return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0)
        r.out.append(buf.data(), n);
    const int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

fs::path work()
{
    const fs::path d = fs::temp_directory_path() / "sharpcone_cli_test";
    fs::create_directories(d);
    return d;
}

std::string write(const std::string& name, const std::string& text)
{
    const fs::path p = work() / name;
    std::ofstream(p) << text;
    return p.string();
}

const char* fix_a = R"({"algebra": {"blocks": [[2, 2]]},
  "xi0": [0.816496580927726, 0, 0, 0.5773502691896257],
  "vectors": {"half": [0.408248290463863, 0, 0, 0]}})";

} // namespace

TEST(Cli, ModularPasses)
{
    const auto r = sh("modular " + write("fixa.json", fix_a));
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    const auto spec = j["data"]["modular"]["delta_spectrum"];
    ASSERT_EQ(spec.size(), 4u);
    EXPECT_NEAR(spec[0].get<double>(), 0.5, 1e-8);
    EXPECT_NEAR(spec[3].get<double>(), 2.0, 1e-8);
    EXPECT_FALSE(j.contains("timings"));
}

TEST(Cli, FailingCheckExitsOne)
{
    const auto r = sh("recover " + write("fixa.json", fix_a) + " --projection '{\"rank_one_xi0\": true}'");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("recover.inline.cond-2"), std::string::npos);
}

TEST(Cli, InputErrorsExitTwo)
{
    EXPECT_EQ(sh("modular /nonexistent/file.json").code, 2);
    EXPECT_EQ(sh("modular " + write("bad.json", "{not json")).code, 2);
    EXPECT_EQ(sh("frobnicate " + write("fixa.json", fix_a)).code, 2);
    EXPECT_EQ(sh("generate no-such-profile").code, 2);
    EXPECT_EQ(sh("modular " + write("fixa.json", fix_a) + " --format yaml").code, 2);
    EXPECT_EQ(sh("cone member " + write("fixa.json", fix_a) + " missing").code, 2);
    EXPECT_EQ(sh("modular " + write("fixa.json", fix_a), "SHARPCONE_SEED=abc").code, 2);
}

TEST(Cli, ConeAndText)
{
    const std::string f = write("fixa.json", fix_a);
    auto r = sh("cone classify " + f + " half");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(nlohmann::json::parse(r.out)["data"]["cone"]["status"], "boundary");
    r = sh("cone order " + f + " half xi0 --format text");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("cone: PASS", 0), 0u) << r.out;
    r = sh("modular " + f + " --timings");
    EXPECT_TRUE(nlohmann::json::parse(r.out).contains("timings"));
}

TEST(Cli, GenerateAndVerify)
{
    const auto g1 = sh("generate tracial-mix --seed 3");
    ASSERT_EQ(g1.code, 0);
    EXPECT_EQ(sh("generate tracial-mix --seed 3").out, g1.out);
    EXPECT_NE(sh("generate tracial-mix --seed 4").out, g1.out);
    // flag beats environment
    EXPECT_EQ(sh("generate tracial-mix --seed 3", "SHARPCONE_SEED=9").out, g1.out);
    EXPECT_EQ(sh("generate tracial-mix", "SHARPCONE_SEED=3").out, g1.out);

    const std::string f = write("mix.json", g1.out);
    const auto v1 = sh("verify-all " + f);
    ASSERT_EQ(v1.code, 0) << v1.out;
    EXPECT_EQ(sh("verify-all " + f).out, v1.out);
    EXPECT_NE(sh("verify-all " + f, "SHARPCONE_SEED=77").out, v1.out);
    EXPECT_EQ(sh("verify-all " + f + " --seed 77", "SHARPCONE_SEED=1").out,
              sh("verify-all " + f, "SHARPCONE_SEED=77").out);
}

TEST(Cli, Stdin)
{
    const std::string f = write("fixa.json", fix_a);
    const auto r = sh("modular - < '" + f + "'");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, sh("modular " + f).out);
}
