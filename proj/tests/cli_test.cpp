// SPDX-License-Identifier: Apache-2.0
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "nbnsp/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "nbnsp_cli_test";

int run(const std::string& args, const std::string& env = "") {
    fs::create_directories(kDir);
    const std::string cmd = env + " " + std::string(NBNSP_CLI) + " " + args + " > " + (kDir / "stdout").string()
                            + " 2> " + (kDir / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string config(const char* name) { return (fs::path(NBNSP_CONFIG_DIR) / name).string(); }

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_EQ(run("fit"), 1);
    EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, SimulateIsDeterministic) {
    const auto a = kDir / "a.csv", b = kDir / "b.csv";
    ASSERT_EQ(run("simulate " + config("smoke.json") + " --seed 42 --out " + a.string()), 0);
    ASSERT_EQ(run("simulate " + config("smoke.json") + " --seed 42 --out " + b.string()), 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(nbnsp::io::sidecar_path(a)), "{\"horizon\": 2500}\n");
    EXPECT_NE(slurp(kDir / "stdout").find("component 1"), std::string::npos);
}

TEST(Cli, FitRoundTrip) {
    const auto p = kDir / "fit.csv";
    ASSERT_EQ(run("simulate " + config("smoke.json") + " --seed 5 --out " + p.string()), 0);
    const auto out = kDir / "fit.json";
    const int code = run("fit " + p.string() + " --out " + out.string());
    ASSERT_TRUE(code == 0 || code == 3);
    const auto j = nbnsp::io::json::parse(slurp(out));
    EXPECT_EQ(j["theta"]["kernel"], "gamma");
    EXPECT_GT(j["n_pairs"].get<int>(), 100);
    EXPECT_EQ(j["converged"].get<bool>(), code == 0);
}

TEST(Cli, DataErrorsExitTwo) {
    const auto bad = kDir / "bad.csv";
    std::ofstream(bad) << "component,time\n1,0.5\n1,zzz\n";
    EXPECT_EQ(run("fit " + bad.string() + " --horizon 10"), 2);
    EXPECT_NE(slurp(kDir / "stderr").find("line 3"), std::string::npos);
    const auto cfg = kDir / "unknown.json";
    std::ofstream(cfg) << R"({"sim": {"horizon": 10, "bogus": 1}})";
    EXPECT_EQ(run("simulate " + cfg.string()), 2);
    EXPECT_NE(slurp(kDir / "stderr").find("bogus"), std::string::npos);
}

TEST(Cli, EmptyComponentExitsThree) {
    const auto p = kDir / "one.csv";
    std::ofstream(p) << "component,time\n1,0.5\n1,2.5\n";
    EXPECT_EQ(run("fit " + p.string() + " --horizon 10"), 3);
}

TEST(Cli, CcfWithTheoryColumn) {
    const auto p = kDir / "ccf.csv";
    ASSERT_EQ(run("simulate " + config("smoke.json") + " --seed 1 --out " + p.string()), 0);
    const auto theta = kDir / "theta.json";
    std::ofstream(theta) << R"({"kernel": "gamma", "a": 10, "alpha1": 0.3, "alpha2": 0.4, "l1": 1, "l2": 1})";
    const auto out = kDir / "g.csv";
    ASSERT_EQ(run("ccf " + p.string() + " --h 0.05 --grid=-1:1:0.5 --theta " + theta.string() + " --out " + out.string()), 0);
    const auto text = slurp(out);
    EXPECT_EQ(text.substr(0, text.find('\n')), "u,g_hat,g_theta");
    EXPECT_NE(text.find("\n0.5,"), std::string::npos);
    EXPECT_EQ(run("ccf " + p.string() + " --grid=0:1:0"), 1);
    EXPECT_EQ(run("ccf " + p.string() + " --h 0"), 1);
}

TEST(Cli, SmokeMonteCarlo) {
    const auto dir = kDir / "mc";
    ASSERT_EQ(run("mc " + config("smoke.json") + " --out-dir " + dir.string(), "NBNSP_THREADS=1"), 0);
    EXPECT_EQ(slurp(dir / "smoke.csv").substr(0, 24), "parameter,mean,std,truth");
    EXPECT_TRUE(fs::exists(dir / "smoke.json"));
    EXPECT_EQ(run("mc " + config("smoke.json"), "NBNSP_THREADS=zero"), 1);
}

TEST(Cli, PrepConcatenates) {
    const auto a = kDir / "s1.csv", b = kDir / "s2.csv", out = kDir / "merged.csv";
    std::ofstream(a) << "component,time\n1,1\n2,3\n";
    std::ofstream(b) << "component,time\n1,0.5\n";
    ASSERT_EQ(run("prep " + a.string() + " " + b.string() + " --horizon 10 --concat-gap 2 --out " + out.string()), 0);
    const auto merged = nbnsp::io::read_pattern(out);
    EXPECT_DOUBLE_EQ(merged.horizon(), 22.0);
    EXPECT_EQ(merged.times1(), (std::vector<double>{1.0, 12.5}));
}

TEST(Cli, LoglikMatchesLibrary) {
    const auto p = kDir / "ll.csv";
    ASSERT_EQ(run("simulate " + config("smoke.json") + " --seed 3 --out " + p.string()), 0);
    const auto theta = kDir / "theta_ll.json";
    std::ofstream(theta) << R"({"kernel": "gamma", "a": 10, "alpha1": 0.3, "alpha2": 0.4, "l1": 1, "l2": 1})";
    ASSERT_EQ(run("loglik " + p.string() + " --theta " + theta.string()), 0);
    const auto j = nbnsp::io::json::parse(slurp(kDir / "stdout"));
    const auto pattern = nbnsp::io::read_pattern(p);
    const nbnsp::NbnspParams truth{10.0, nbnsp::GammaKernel{0.3, 1.0}, nbnsp::GammaKernel{0.4, 1.0}};
    EXPECT_DOUBLE_EQ(j["objective"].get<double>(), nbnsp::quasi_log_likelihood(pattern, truth, nbnsp::QmleConfig{}));
}
