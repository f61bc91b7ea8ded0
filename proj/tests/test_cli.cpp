#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

struct Result {
    int status;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(MAXTERM_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return {-1, ""};
    std::string out;
    std::array<char, 4096> buf{};
    while (const std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string last_line(std::string text) {
    while (!text.empty() && text.back() == '\n') text.pop_back();
    return text.substr(text.rfind('\n') + 1);
}

std::string without_wall_time(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.find("wall time") == std::string::npos) out += line + "\n";
    return out;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("maxterm_cli_" + std::to_string(::getpid()) + "_" + name);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* const kQuick = "certify --M 20000 --dps 60";

} // namespace

TEST(Cli, QuickMeshWithRelaxedTargets) {
    const auto out = temp_file("quick.json");
    const Result r = run(std::string(kQuick) + " --target-A 1.7100 --target-beta 0.5848 --out " + out.string());
    EXPECT_EQ(r.status, 0) << r.out;
    EXPECT_EQ(last_line(r.out), "Certified all targets : True");
    EXPECT_NE(r.out.find("Certified mesh_max_upper <= bound : True"), std::string::npos);
    const auto j = nlohmann::json::parse(read_file(out));
    EXPECT_TRUE(j.at("passed_A").get<bool>());
    EXPECT_EQ(j.at("target_A").get<std::string>(), "171/100");
    const Result report = run("report " + out.string());
    EXPECT_EQ(report.status, 0) << report.out;
    EXPECT_EQ(last_line(report.out), "Certificate arithmetic consistent : True");
    std::filesystem::remove(out);
}

TEST(Cli, QuickMeshAgainstDefaultTargets) {
    const Result r = run(kQuick);
    EXPECT_EQ(r.status, 2) << r.out;
    EXPECT_EQ(last_line(r.out), "Certified all targets : False");
}

TEST(Cli, TargetBelowMaximum) {
    const Result r = run("certify --M 2000 --dps 40 --target-mesh 17/10");
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find("Certified mesh_max_upper <= bound : False"), std::string::npos);
}

TEST(Cli, StableOutput) {
    const Result a = run("certify --M 3000 --dps 40");
    const Result b = run("certify --M 3000 --dps 40 --workers 4 --chunk-size 333");
    EXPECT_EQ(a.status, b.status);
    const std::string sa = without_wall_time(a.out);
    std::string sb = without_wall_time(b.out);
    const auto pos = sb.find("workers = 4");
    ASSERT_NE(pos, std::string::npos);
    sb.replace(pos, 11, "workers = 1");
    EXPECT_EQ(sa, sb);
    EXPECT_EQ(without_wall_time(run("certify --M 3000 --dps 40").out), sa);
}

TEST(Cli, StrictReplication) {
    const Result r = run("certify --M 2000 --dps 40 --strict-replication --json");
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("lipschitz").get<std::string>(), "4");
    EXPECT_TRUE(j.at("strict_replication").get<bool>());
}

TEST(Cli, OperationalErrors) {
    EXPECT_EQ(run("certify --K 1").status, 1);
    EXPECT_EQ(run("certify --K 0.5").status, 1);
    EXPECT_EQ(run("certify --K abc").status, 1);
    EXPECT_EQ(run("certify --alpha 1/0").status, 1);
    EXPECT_EQ(run("certify --target-A x").status, 1);
    EXPECT_EQ(run("certify --M 0").status, 1);
    EXPECT_EQ(run("certify --N 0").status, 1);
    EXPECT_EQ(run("").status, 1);
    EXPECT_EQ(run("frobnicate").status, 1);
    EXPECT_EQ(run("report /nonexistent/cert.json").status, 1);
    EXPECT_EQ(run("--version").status, 0);
}

TEST(Cli, UnwritableOutputFailsBeforeComputing) {
    const auto start = std::chrono::steady_clock::now();
    const Result r = run("certify --out /nonexistent-dir/cert.json"); // full default mesh if not checked first
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_EQ(r.status, 1);
    EXPECT_LT(seconds, 5.0);
    EXPECT_NE(r.out.find("cannot write"), std::string::npos);
}

TEST(Cli, ReportDetectsTampering) {
    const auto out = temp_file("tamper.json");
    ASSERT_EQ(run("certify --M 2000 --dps 40 --target-A 2 --target-beta 1/2 --out " + out.string()).status, 0);
    auto j = nlohmann::json::parse(read_file(out));
    EXPECT_EQ(run("report " + out.string()).status, 0);

    auto tampered = j;
    const std::string mant = tampered["mesh_max_upper"]["mantissa"].get<std::string>();
    tampered["mesh_max_upper"]["mantissa"] = mant.substr(0, mant.size() - 12) + "000000000000";
    std::ofstream(out) << tampered.dump(2);
    Result r = run("report " + out.string());
    EXPECT_EQ(r.status, 2) << r.out;
    EXPECT_EQ(last_line(r.out), "Certificate arithmetic consistent : False");

    tampered = j;
    tampered["beta_lower"]["decimal"] = "0.9";
    std::ofstream(out) << tampered.dump(2);
    EXPECT_EQ(run("report " + out.string()).status, 2);

    std::ofstream(out) << "{ not json";
    EXPECT_EQ(run("report " + out.string()).status, 1);
    std::filesystem::remove(out);
}

TEST(Cli, Search) {
    const Result r = run("search --grid-K 5 --grid-alpha 5 --keep 2 --refine-iters 3 --samples 512");
    EXPECT_EQ(r.status, 0) << r.out;
    EXPECT_EQ(r.out.rfind("rank", 0), 0u);
    EXPECT_NE(r.out.find("\n1 "), std::string::npos);
    EXPECT_NE(r.out.find("\n2 "), std::string::npos);
    EXPECT_EQ(run("search --K-low 0.5").status, 1);
}

TEST(Cli, Verify) {
    const Result r = run("verify --points 3 --samples 256 --max-m 2");
    EXPECT_EQ(r.status, 0) << r.out;
    EXPECT_EQ(last_line(r.out), "Identity residuals within tolerance : True");
    EXPECT_NE(r.out.find("Maximum-term ratio"), std::string::npos);
}
