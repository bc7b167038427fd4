#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "pglab/image_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "pglab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = pglab::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("pglab_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::vector<std::string> kSmall{"--dim", "3", "--samples", "10", "--steps", "12",
                                      "--calibration-samples", "2", "--jobs", "2"};

std::vector<std::string> with_small(std::vector<std::string> args) {
    args.insert(args.end(), kSmall.begin(), kSmall.end());
    return args;
}

}  // namespace

TEST(Cli, HelpExitsZero) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("toy"), std::string::npos);
}

TEST(Cli, UnknownOptionExitsOne) { EXPECT_EQ(run({"toy", "--bogus"}).code, 1); }

TEST(Cli, InvalidValueExitsOneAndNamesKey) {
    const auto r = run(with_small({"toy", "--samples", "0", "--out", fresh_dir("invalid").string()}));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("samples"), std::string::npos);
}

TEST(Cli, ToyRunWritesTableAndFiles) {
    const auto dir = fresh_dir("toy");
    const auto r = run(with_small({"toy", "--w", "1,3", "--out", dir.string()}));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("cell,r,mean_distance", 0), 0u);
    EXPECT_NE(r.out.find("cfg_w3,"), std::string::npos);
    EXPECT_NE(r.out.find("apg_w1_eta0_rauto_beta-0.5,"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    EXPECT_TRUE(fs::exists(dir / "drift.csv"));
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const auto first = fresh_dir("cfg_first");
    ASSERT_EQ(run(with_small({"toy", "--strategies", "cfg", "--w", "2", "--seed", "5", "--out", first.string()}))
                  .code,
              0);
    const std::string echoed = slurp(first / "config.ini");
    EXPECT_NE(echoed.find("seed=5"), std::string::npos);

    // the echoed config reproduces the run
    const auto second = fresh_dir("cfg_second");
    ASSERT_EQ(run({"toy", "--config", (first / "config.ini").string(), "--out", second.string()}).code, 0);
    EXPECT_EQ(slurp(second / "config.ini"), echoed);
    EXPECT_EQ(slurp(second / "drift.csv"), slurp(first / "drift.csv"));

    // flags take precedence over the file
    const auto third = fresh_dir("cfg_third");
    ASSERT_EQ(
        run({"toy", "--config", (first / "config.ini").string(), "--seed", "6", "--out", third.string()}).code, 0);
    EXPECT_NE(slurp(third / "config.ini").find("seed=6"), std::string::npos);
}

TEST(Cli, MissingConfigFileExitsOne) {
    EXPECT_EQ(run({"toy", "--config", "/nonexistent/pglab.ini"}).code, 1);
}

TEST(Cli, SweepRun) {
    const auto dir = fresh_dir("sweep");
    const auto r = run(with_small({"sweep", "--w", "1,2", "--out", dir.string()}));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "sweep.csv"));
}

TEST(Cli, SweepCapExitsOne) {
    const auto r = run(with_small({"sweep", "--w", "1,2,3", "--sweep-cap", "2", "--out", fresh_dir("cap").string()}));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("sweep_cap"), std::string::npos);
}

TEST(Cli, UnwritableOutputExitsTwo) {
    const auto blocker = fresh_dir("blocker");
    std::ofstream(blocker) << "file in the way";
    const auto r = run(with_small({"toy", "--out", (blocker / "sub").string()}));
    EXPECT_EQ(r.code, 2);
    fs::remove(blocker);
}

TEST(Cli, Metrics) {
    const auto dir = fresh_dir("metrics_in");
    fs::create_directories(dir);
    pglab::write_png(dir / "a.png", pglab::ImageRGB::solid(2, 2, {1, 0, 0}));
    pglab::write_png(dir / "b.png", pglab::ImageRGB::solid(2, 2, {0.5, 0.5, 0.5}));
    const auto r = run({"metrics", dir.string(), "--out", fresh_dir("metrics_out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("images,2"), std::string::npos);
    EXPECT_NE(r.out.find("mean_saturation,0.5"), std::string::npos);
}

TEST(Cli, MetricsMissingDirectoryExitsOne) {
    const auto r = run({"metrics", "/nonexistent/pglab_images", "--out", fresh_dir("metrics_missing").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("/nonexistent/pglab_images"), std::string::npos);
}

TEST(Cli, SelftestSubset) {
    const auto r = run({"selftest", "--only", "1,3", "--out", fresh_dir("selftest").string()});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_NE(r.out.find("[PASS] 1"), std::string::npos);
    EXPECT_NE(r.out.find("[PASS] 3"), std::string::npos);
}
