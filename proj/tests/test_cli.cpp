#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "plevy/error.hpp"

using namespace plevy;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir(const std::string& tag) {
  const auto d = fs::temp_directory_path() / ("plevy_cli_test_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}
}  // namespace

TEST(Config, RejectsUnknownAndOutOfRange) {
  EXPECT_THROW(cli::parse_config(nlohmann::json{{"colour", 3}}), Error);
  EXPECT_THROW(cli::parse_config(nlohmann::json{{"p", 0.5}}), Error);
  EXPECT_THROW(cli::parse_config(nlohmann::json{{"ladder", {0.2, -1.0}}}), Error);
  EXPECT_THROW(cli::parse_config(nlohmann::json{{"solver", {{"bogus", 1}}}}), Error);
  EXPECT_THROW(cli::parse_config(nlohmann::json{{"u", "x +"}}), Error);
  try {
    cli::parse_config(nlohmann::json{{"colour", 3}});
  } catch (const std::exception& e) {
    EXPECT_EQ(cli::exit_code_for(e), cli::kValidation);
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
}

TEST(Config, Defaults) {
  const auto c = cli::parse_config(nlohmann::json::object());
  EXPECT_EQ(c.sweep.p, 2.0);
  EXPECT_EQ(c.sweep.ladder.size(), 4u);
  EXPECT_EQ(c.expr("f")(0.3), 1.0);
  const auto d = cli::parse_config(nlohmann::json{{"p", 3}, {"d", 2}, {"domain", {0, 1, 0, 2}}});
  EXPECT_EQ(d.sweep.d, 2);
  EXPECT_EQ(d.sweep.domain.hi[1], 2.0);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(cli::exit_code_for(Error(ErrorKind::Solver, "")), cli::kSolver);
  EXPECT_EQ(cli::exit_code_for(Error(ErrorKind::Guard, "")), cli::kGuard);
  EXPECT_EQ(cli::exit_code_for(Error(ErrorKind::Parse, "")), cli::kValidation);
  EXPECT_EQ(cli::exit_code_for(Error(ErrorKind::Domain, "")), cli::kValidation);
}

TEST(Run, ConstantsAndAffineSweep) {
  const auto dir = temp_dir("run");
  auto c = cli::parse_config(nlohmann::json{{"g", "x"}, {"f", "0"}, {"ladder", {0.4, 0.2}}});
  c.out_dir = dir.string();
  std::ostringstream err;
  EXPECT_EQ(cli::run("constants", "", c, err), cli::kOk) << err.str();
  EXPECT_TRUE(fs::exists(dir / "constants.json"));
  EXPECT_EQ(cli::run("sweep", "dirichlet", c, err), cli::kOk) << err.str();
  EXPECT_TRUE(fs::exists(dir / "dirichlet.csv"));
  std::ifstream in(dir / "dirichlet.summary.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["meta"]["fingerprint"].get<std::string>().size(), 16u);
  EXPECT_EQ(cli::run("sweep", "nonsense", c, err), cli::kValidation);
  EXPECT_EQ(cli::run("frobnicate", "", c, err), cli::kValidation);
  fs::remove_all(dir);
}

TEST(Run, SolverFailureMapsToThree) {
  const auto dir = temp_dir("solver");
  auto c = cli::parse_config(nlohmann::json{{"solver", {{"max_iter", 1}}}});
  c.out_dir = dir.string();
  std::ostringstream err;
  EXPECT_EQ(cli::run("solve", "", c, err), cli::kSolver);
  fs::remove_all(dir);
}
