#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(RESETWALKS_CLI) + " " + args + " 2>/dev/null";
    FILE* f = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), f)) out.append(buf.data(), got);
    const int st = pclose(f);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

double mass_column_sum(const std::string& csv, std::size_t col) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    double s = 0;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        for (std::size_t i = 0; i <= col; ++i) std::getline(cells, cell, ',');
        s += std::stod(cell);
    }
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Cli, AltitudeZeroLength) {
    const auto r = run("altitude --p 1/2 --n 0");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "k,prob\n0,1\n");
}

TEST(Cli, AltitudeMoranGeometricRows) {
    const auto r = run("altitude --p 1/2 --n 100");
    ASSERT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("\n0,1/2\n1,1/4\n2,1/8\n"), std::string::npos);
}

TEST(Cli, FloatDistributionsSumToOne) {
    const auto a = run("altitude --model '{\"steps\":{\"-1\":\"1/4\",\"2\":\"1/4\"},\"q\":\"1/2\"}' --n 100 --mode float");
    ASSERT_EQ(a.status, 0);
    EXPECT_NEAR(mass_column_sum(a.out, 1), 1.0, 1e-9);
    const auto h = run("height --p 1/2 --n 33554432");
    ASSERT_EQ(h.status, 0);
    EXPECT_NEAR(mass_column_sum(h.out, 1), 1.0, 1e-9);
}

TEST(Cli, HeightCdfSingleValue) {
    const auto r = run("height-cdf --p 1/2 --h 25 --n 33554432");
    ASSERT_EQ(r.status, 0);
    EXPECT_NEAR(std::stod(r.out), 0.7788, 1e-3);
    EXPECT_EQ(run("height-cdf --p 1/2 --h 5 --n 4").out, "1\n");
}

TEST(Cli, AsymptoticsJson) {
    const auto r = run("height-asymptotics --p 1/2 --n 33554432 --json");
    ASSERT_EQ(r.status, 0);
    for (const char* key : {"\"h_star\"", "\"peak_prob\"", "\"alpha\"", "\"gumbel_distance\""})
        EXPECT_NE(r.out.find(key), std::string::npos) << key;
}

TEST(Cli, FluctuationTable) {
    const auto r = run("fluctuations --p 1/2 --emit Q,R --samples 512");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(r.out.rfind("x,Q(x),R(x)\n", 0), 0u);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 513);
}

TEST(Cli, MoranMDAgeHistogram) {
    const auto r = run("moran-md --m 3 --pI '{\"{}\":\"0.4\",\"{1}\":\"0.2\",\"{2}\":\"0.2\",\"{1,2,3}\":\"0.2\"}' --n 50 --stat age-hist");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(r.out.rfind("individual,k,prob\n", 0), 0u);
}

TEST(Cli, SeededRunsAreByteIdentical) {
    const std::string a = ::testing::TempDir() + "soliton_a.csv", b = ::testing::TempDir() + "soliton_b.csv";
    ASSERT_EQ(run("soliton --m 4 --steps 1000 --seed 7 --emit " + a).status, 0);
    ASSERT_EQ(run("soliton --m 4 --steps 1000 --seed 7 --emit " + b).status, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(a).size() > 1000, true);
    const auto s1 = run("moran-md --m 2 --pI '{\"{}\":\"1/2\",\"{1,2}\":\"1/2\"}' --n 10 --stat sim-age-hist --reps 5000 --seed 3 --threads 4");
    const auto s2 = run("moran-md --m 2 --pI '{\"{}\":\"1/2\",\"{1,2}\":\"1/2\"}' --n 10 --stat sim-age-hist --reps 5000 --seed 3 --threads 1");
    EXPECT_EQ(s1.out, s2.out);
}

TEST(Cli, ValidateFilterAndExitCodes) {
    const auto r = run("validate --only waiting-duality");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("\"waiting-duality\""), std::string::npos);
    EXPECT_EQ(r.out.find("\"pippenger\""), std::string::npos);
    const std::string bad = ::testing::TempDir() + "corrupt_model.json";
    std::ofstream(bad) << "{\"steps\": {\"1\": \"1/2\"";
    EXPECT_EQ(run("validate --model-file " + bad).status, 2);
    EXPECT_EQ(run("altitude --p 3/2 --n 3").status, 2);
    EXPECT_EQ(run("height --p 1/2 --n 4294967296").status, 3);
    EXPECT_EQ(run("frobnicate").status, 2);
}

TEST(Cli, ValidateModelIdentities) {
    const auto r = run("validate --model '{\"steps\":{\"-2\":\"1/3\",\"1\":\"1/2\"},\"q\":\"1/6\"}'");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("\"model-identities\""), std::string::npos);
}
