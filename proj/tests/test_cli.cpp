// Drives the built qrtrap binary through the shell and checks output and
// exit codes.

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(QRTRAP_CLI_PATH) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string value_of(const std::string& out, const std::string& key) {
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
    return {};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("qrtrap_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return path / name;
    }
};

// Coarse grid and a short horizon so every run here is fast.
const char* tiny_config = R"(profile = fast
[grid]
n_points = 499
[propagator]
dt = 1e-4
[run]
tau_end = 0.005
sample_interval = 0.001
[sweep]
sigmas = 20, 40
gammas = 0, -0.2
)";

}  // namespace

TEST(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run("").code, 2); }

TEST(Cli, UnknownOptionIsUsageError) { EXPECT_EQ(run("units --L 4.47e5 --bogus 1").code, 2); }

TEST(Cli, VersionFlag) {
    const auto r = run("--version");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find(QRTRAP_VERSION), std::string::npos);
}

TEST(Cli, UnitsSodium) {
    const auto r = run("units --species Na --L 4.47e5");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(value_of(r.out, "sigma"), "29.92");
    EXPECT_EQ(value_of(r.out, "gamma"), "0.0002922");
    EXPECT_EQ(value_of(r.out, "seconds_per_tau"), "0.4051");
}

TEST(Cli, UnitsLithium) {
    const auto r = run("units --species Li --L 4.47e5");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(value_of(r.out, "sigma"), "54.25");
    EXPECT_EQ(value_of(r.out, "gamma"), "-0.009664");
    EXPECT_FALSE(value_of(r.out, "gamma_uncertainty").empty());
}

TEST(Cli, UnitsExplicitValues) {
    const auto r = run("units --L 1000 --beta4 100 --a-int 5");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(value_of(r.out, "sigma"), "10");
    EXPECT_EQ(value_of(r.out, "gamma"), "0.01");
    EXPECT_TRUE(value_of(r.out, "seconds_per_tau").empty());
}

TEST(Cli, UnitsErrors) {
    EXPECT_EQ(run("units --species Xx --L 4.47e5").code, 2);
    EXPECT_EQ(run("units --L 4.47e5").code, 2);
    EXPECT_EQ(run("units --species Na").code, 2);
}

TEST(Cli, PrintDefaults) {
    const auto paper = run("--print-defaults");
    ASSERT_EQ(paper.code, 0);
    EXPECT_NE(paper.out.find("profile = paper"), std::string::npos);
    EXPECT_NE(paper.out.find("n_points = 3999"), std::string::npos);
    const auto fast = run("--print-defaults --profile fast");
    ASSERT_EQ(fast.code, 0);
    EXPECT_NE(fast.out.find("n_points = 1999"), std::string::npos);
    EXPECT_EQ(run("--print-defaults --profile turbo").code, 2);
}

TEST(Cli, PrintedDefaultsLoadBack) {
    TempDir tmp;
    const auto text = run("--print-defaults --profile fast").out;
    const auto cfg = tmp.write("defaults.conf", text);
    const auto again = run("--config " + cfg.string() + " --print-defaults --profile fast");
    EXPECT_EQ(again.code, 0);
    EXPECT_EQ(again.out, text);
}

TEST(Cli, SimulateZeroDurationGivesHeaderAndOneRow) {
    TempDir tmp;
    const auto cfg = tmp.write("tiny.conf", tiny_config);
    const auto r = run("simulate --config " + cfg.string() + " --sigma 20 --tau-end 0");
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string header, row, extra;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header, "tau,rho_s,e_kin,e_pot,e_int,e_tot,norm_total");
    EXPECT_EQ(row.rfind("0,", 0), 0u);
    EXPECT_FALSE(std::getline(in, extra));
}

TEST(Cli, SimulateWritesBundle) {
    TempDir tmp;
    const auto cfg = tmp.write("tiny.conf", tiny_config);
    const auto r = run("simulate --config " + cfg.string() + " --sigma 40 --gamma -0.2 --out " + (tmp.path / "run").string());
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(fs::exists(tmp.path / "run" / "series.csv"));
    EXPECT_TRUE(fs::exists(tmp.path / "run" / "status.json"));
}

TEST(Cli, SimulateRejectsBadConfig) {
    TempDir tmp;
    EXPECT_EQ(run("simulate --config " + tmp.write("bad.conf", "speed = 3\n").string()).code, 2);
    EXPECT_EQ(run("simulate --config " + (tmp.path / "missing.conf").string()).code, 2);
    EXPECT_EQ(run("simulate --profile fast --tau-end -1").code, 2);
}

TEST(Cli, Sweep) {
    TempDir tmp;
    const auto plan = tmp.write("tiny.plan", tiny_config);
    const auto out = tmp.path / "bundle";
    const auto r = run("sweep " + plan.string() + " --out " + out.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("sigma,gamma,rho_s_final,collapsed\n", 0), 0u);
    EXPECT_NE(r.out.find("\n40,-0.2,"), std::string::npos);
    EXPECT_TRUE(fs::exists(out / "summary.csv"));
    EXPECT_TRUE(fs::exists(out / "manifest.json"));
    // A second invocation resumes and reports the same numbers.
    EXPECT_EQ(run("sweep " + plan.string() + " --out " + out.string()).out, r.out);
}

TEST(Cli, SweepRejectsMalformedPlan) {
    TempDir tmp;
    EXPECT_EQ(run("sweep " + tmp.write("bad.plan", "[sweep]\nsigmas = 20, forty\n").string()).code, 2);
    EXPECT_EQ(run("sweep " + tmp.write("bad2.plan", "[swep]\nsigmas = 20\n").string()).code, 2);
}

TEST(Cli, PhaseDiagram) {
    const auto r = run("phase-diagram --sigmas 0 --n-alpha 5");
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 5);
    EXPECT_EQ(run("phase-diagram --sigmas ''").code, 2);
    EXPECT_EQ(run("phase-diagram --alpha-min 0").code, 2);
}

TEST(Cli, PhaseDiagramBundle) {
    TempDir tmp;
    ASSERT_EQ(run("phase-diagram --sigmas 10,40 --n-alpha 8 --out " + tmp.path.string()).code, 0);
    for (const char* f : {"phase_diagram.csv", "discrepancy_audit.csv", "large_width_audit.csv", "large_width_notes.txt"}) {
        EXPECT_TRUE(fs::exists(tmp.path / f)) << f;
        EXPECT_GT(fs::file_size(tmp.path / f), 0u) << f;
    }
}

TEST(Cli, CriticalGammaRejectsNonCollapsingBracket) {
    EXPECT_EQ(run("critical-gamma --lo 0.1 --hi 0.2").code, 4);
    EXPECT_EQ(run("critical-gamma --lo -0.5 --hi -0.6").code, 4);
}
