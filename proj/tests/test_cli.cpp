#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

// End-to-end checks against the built binary: exit codes are part of the
// interface (0 ok, 2 bad config, 3 no convergence, 4 I/O trouble).

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TVI_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  EXPECT_TRUE(WIFEXITED(status)) << cmd;
  return WEXITSTATUS(status);
}

std::string tmp_path(const std::string& name) { return ::testing::TempDir() + name; }

TEST(Cli, RunWritesCsvAndExitsZero) {
  const std::string out = tmp_path("cli_run.csv");
  ASSERT_EQ(run_cli("run --problem pendulum --method tvi -r 1 --quadrature trapezoid"
                    " --h 0.1 --steps 5 --out " +
                    out),
            0);
  std::ifstream in(out);
  ASSERT_TRUE(in.good());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "step,t,q0,p0,energy,energy_error,newton_iters,residual");
}

TEST(Cli, TmaxPicksTheStepCount) {
  const std::string out = tmp_path("cli_tmax.csv");
  ASSERT_EQ(run_cli("run --problem pendulum --method stormer_verlet --h 0.25 --tmax 2 --out " +
                    out),
            0);
  std::ifstream in(out);
  int lines = 0;
  std::string s;
  while (std::getline(in, s)) ++lines;
  EXPECT_EQ(lines, 10);  // header + rows 0..8
}

TEST(Cli, ConvergeAndCompareAndPlot) {
  const std::string conv = tmp_path("cli_conv.csv");
  ASSERT_EQ(run_cli("converge --problem pendulum --method euler_a --h 0.2,0.1,0.05"
                    " --tmax 1 --out " +
                    conv),
            0);
  const std::string cmp = tmp_path("cli_cmp.csv");
  ASSERT_EQ(run_cli("compare --problem pendulum --h 0.1 --tmax 1"
                    " --spec stormer_verlet --spec tvi:1:trapezoid --out " +
                    cmp),
            0);
  const std::string svg = tmp_path("cli_conv.svg");
  ASSERT_EQ(run_cli("plot --kind loglog --out " + svg + " " + conv), 0);
  std::ifstream in(svg);
  EXPECT_TRUE(in.good());
}

TEST(Cli, ListSubcommands) {
  EXPECT_EQ(run_cli("list-problems"), 0);
  EXPECT_EQ(run_cli("list-methods"), 0);
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run_cli("run --problem lorenz"), 2);
  EXPECT_EQ(run_cli("run --problem pendulum --method rk4"), 2);
  EXPECT_EQ(run_cli("run --problem pendulum --method tvi --quadrature gauss0"), 2);
  EXPECT_EQ(run_cli("converge --problem pendulum --method euler_a --h 0.3 --tmax 1"), 2);
  EXPECT_EQ(run_cli("definitely-not-a-subcommand"), 2);
}

TEST(Cli, NonConvergenceExitsThree) {
  EXPECT_EQ(run_cli("run --problem kepler --method tvi -r 3 --quadrature gauss2"
                    " --h 20 --steps 3"),
            3);
}

TEST(Cli, IoErrorsExitFour) {
  EXPECT_EQ(run_cli("plot --kind loglog --out " + tmp_path("x.svg") + " " +
                    tmp_path("no_such_table.csv")),
            4);
  EXPECT_EQ(run_cli("run --problem pendulum --method euler_a --steps 2 --out"
                    " /nonexistent_dir/out.csv"),
            4);
}

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("run --help"), 0);
}

}  // namespace
