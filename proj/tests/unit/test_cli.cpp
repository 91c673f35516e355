#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "edcuav/csv.hpp"
#include "edcuav/scenario_io.hpp"
#include "fixtures.hpp"

namespace edc {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("edcuav_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args) const {
        const std::string cmd = std::string(EDCUAV_CLI_PATH) + " " + args + " >" + (dir_ / "stdout.txt").string() +
                                " 2>" + (dir_ / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string slurp(const std::string& name) const { return io::read_file(dir_ / name); }

    std::string write_scenario(const std::string& name, const Scenario& sc) const {
        io::write_file_atomic(dir_ / name, io::scenario_to_json(sc));
        return path(name);
    }

    fs::path dir_;
};

TEST_F(Cli, GenWritesRequestedScenario) {
    ASSERT_EQ(run("gen --uavs 10 --area 10000 --gps-error 5 --seed 7 -o " + path("s.json")), 0);
    const auto sc = io::read_scenario_file(path("s.json"));
    EXPECT_EQ(sc.num_uavs(), 10);
    EXPECT_DOUBLE_EQ(sc.area_width, 100.0);
    EXPECT_DOUBLE_EQ(sc.area_height, 100.0);
    EXPECT_EQ(sc.uavs[3].gps_error_radius, 5.0);
}

TEST_F(Cli, GenOverPackedExitsWithGenerationExhausted) {
    EXPECT_EQ(run("gen --uavs 50 --area 10000 --gps-error 5 --seed 7 -o " + path("s.json")), 3);
    EXPECT_FALSE(fs::exists(path("s.json")));
}

TEST_F(Cli, PlanVerifiedAndLiteral) {
    const auto sc = write_scenario("head_on.json", testing::head_on_pair());
    EXPECT_EQ(run("plan " + sc + " --mode signed-l1 -o " + path("plan.csv")), 0);
    const auto rows = io::parse_trajectory_csv(slurp("plan.csv"));
    EXPECT_EQ(rows.size(), 42u);
    EXPECT_EQ(run("plan " + sc + " --mode scp -o " + path("scp.csv")), 0);
    // Literal mode is exempt from the separation check and only reports it.
    EXPECT_EQ(run("plan " + sc + " --mode literal -o " + path("lit.csv")), 0);
    EXPECT_NE(slurp("stderr.txt").find("separation VIOLATED"), std::string::npos);
}

TEST_F(Cli, PlanRecedingHorizon) {
    const auto sc = write_scenario("parallel.json",
                                   testing::make_scenario({{{0, 0}, {100, 0}}, {{0, 50}, {100, 50}}}, 20, 100.0));
    EXPECT_EQ(run("plan " + sc + " --mode signed-l1 --horizon receding:4 -o " + path("plan.csv")), 0);
    EXPECT_EQ(io::parse_trajectory_csv(slurp("plan.csv")).size(), 42u);
}

TEST_F(Cli, ExitCodesForFailures) {
    io::write_file_atomic(dir_ / "broken.json", "{ not json");
    EXPECT_EQ(run("plan " + path("broken.json")), 1);
    EXPECT_EQ(run("plan " + path("missing.json")), 1);
    const auto sc = write_scenario("head_on.json", testing::head_on_pair());
    EXPECT_EQ(run("plan " + sc + " --mode nonsense"), 1);
    EXPECT_EQ(run("plan " + sc + " --horizon receding:0"), 1);
    EXPECT_EQ(run("plan " + sc + " --no-such-flag"), 1);
    EXPECT_EQ(run("sweep --param uavs --values 20,10"), 1);

    const auto infeasible =
        write_scenario("close_goals.json", testing::make_scenario({{{0, 0}, {50, 50}}, {{100, 0}, {55, 50}}}, 20, 100.0));
    EXPECT_EQ(run("plan " + infeasible), 2);
    EXPECT_EQ(run("simulate " + infeasible + " --mode scp"), 2);

    EXPECT_EQ(run("plan " + sc + " --max-iter 1"), 4);
}

TEST_F(Cli, SimulateSingleUav) {
    const auto sc = write_scenario("one.json", testing::make_scenario({{{10, 10}, {80, 40}}}, 20, 100.0));
    ASSERT_EQ(run("simulate " + sc + " --mode signed-l1 --strategy min-response --seed 3 -o " + path("log.csv") +
                  " --metrics " + path("m.csv")),
              0);
    const auto rows = io::parse_metrics_csv(slurp("m.csv"));
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].pair_slot_collisions, 0.0);
    EXPECT_EQ(rows[0].distinct_pair_collisions, 0.0);
    EXPECT_EQ(rows[0].completed, 1);
    EXPECT_EQ(io::parse_trajectory_csv(slurp("log.csv")).size(), 21u);
}

TEST_F(Cli, SimulateBaselineAcceptsUnseparatedScenario) {
    const auto sc = write_scenario("close.json",
                                   testing::make_scenario({{{0, 0}, {50, 50}}, {{100, 0}, {55, 50}}}, 20, 100.0));
    EXPECT_EQ(run("simulate " + sc + " --mode baseline --metrics " + path("m.csv")), 0);
    EXPECT_GE(io::parse_metrics_csv(slurp("m.csv"))[0].pair_slot_collisions, 1.0);
}

TEST_F(Cli, SweepRowCountsAndReport) {
    ASSERT_EQ(run("sweep --param uavs --values 10,20,30,40,50 --runs 30 --mode baseline --area 10000 "
                  "--no-endpoint-separation -o " + path("sweep.csv") + " --chart " + path("sweep.svg")),
              0);
    const auto rows = io::parse_metrics_csv(slurp("sweep.csv"));
    ASSERT_EQ(rows.size(), 155u);
    EXPECT_EQ(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.is_aggregate(); }), 5);
    EXPECT_TRUE(fs::exists(path("sweep.svg")));

    ASSERT_EQ(run("report " + path("sweep.csv") + " --out-dir " + path("charts")), 0);
    EXPECT_NE(slurp("stdout.txt").find("pair_slot_collisions: linear R2="), std::string::npos);
    EXPECT_TRUE(fs::exists(path("charts/collisions.svg")));
    EXPECT_TRUE(fs::exists(path("charts/planning_time.svg")));
}

TEST_F(Cli, SweepIsReproducible) {
    const std::string args = "sweep --param gps-error --values 1,3,5 --runs 4 --uavs 4 --area 40000 --v-max 15 "
                             "--mode scp --seed 11 -o ";
    ASSERT_EQ(run(args + path("a.csv")), 0);
    ASSERT_EQ(run(args + path("b.csv") + " --threads 3"), 0);
    EXPECT_EQ(io::strip_wall_time(slurp("a.csv")), io::strip_wall_time(slurp("b.csv")));
}

}  // namespace
}  // namespace edc
