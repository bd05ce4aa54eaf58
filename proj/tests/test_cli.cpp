#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jgl/cli.hpp"
#include "jgl/errors.hpp"

using namespace jgl;
using namespace jgl::cli;
namespace fs = std::filesystem;

namespace {

RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "jgl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_args(static_cast<int>(argv.size()), argv.data());
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("jgl_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  fs::path dir_;
};

struct EnvGuard {
  explicit EnvGuard(const char* value) {
    if (value) {
      setenv("JGL_PRECISION_BITS", value, 1);
    } else {
      unsetenv("JGL_PRECISION_BITS");
    }
  }
  ~EnvGuard() { unsetenv("JGL_PRECISION_BITS"); }
};

}  // namespace

TEST(ParseArgs, DefaultsAndFlags) {
  EnvGuard env(nullptr);
  const auto c = parse({"verify", "--n-max", "12", "--B2", "0.25", "--relaxed", "--n-list", "16,32,64"});
  EXPECT_EQ(c.command, "verify");
  EXPECT_EQ(c.n_max, 12);
  EXPECT_EQ(c.B2, "0.25");
  EXPECT_EQ(c.A, "1");
  EXPECT_TRUE(c.relaxed);
  EXPECT_EQ(c.n_list, (std::vector<int>{16, 32, 64}));
  EXPECT_FALSE(c.precision_bits.has_value());
  EXPECT_FALSE(c.fd_step.has_value());
}

TEST(ParseArgs, PrecisionAndStepOptions) {
  EnvGuard env(nullptr);
  const auto c = parse({"verify", "--precision-bits", "300", "--fd-step", "1e-9"});
  EXPECT_EQ(c.precision_bits, 300);
  EXPECT_EQ(c.fd_step, "1e-9");
  EXPECT_FALSE(parse({"verify", "--precision-bits", "auto"}).precision_bits.has_value());
  EXPECT_THROW(parse({"verify", "--precision-bits", "12"}), ConfigInvalid);
  EXPECT_THROW(parse({"verify", "--precision-bits", "many"}), ConfigInvalid);
}

TEST(ParseArgs, EnvironmentOverridesAutoOnly) {
  EnvGuard env("640");
  EXPECT_EQ(parse({"moments"}).precision_bits, 640);
  EXPECT_EQ(parse({"moments", "--precision-bits", "200"}).precision_bits, 200);
}

TEST(ParseArgs, Rejections) {
  EnvGuard env(nullptr);
  EXPECT_THROW(parse({}), ConfigInvalid);
  EXPECT_THROW(parse({"frobnicate"}), ConfigInvalid);
  EXPECT_THROW(parse({"verify", "--no-such-flag"}), ConfigInvalid);
  EXPECT_THROW(parse({"montecarlo", "--mode", "some"}), ConfigInvalid);
  EXPECT_THROW(parse({"montecarlo", "--threads", "0"}), ConfigInvalid);
  EXPECT_THROW(parse({"painleve4", "--n", "0"}), ConfigInvalid);
}

TEST_F(TempDir, ConfigFileAndFlagPrecedence) {
  EnvGuard env(nullptr);
  const std::string cfg = path("run.json");
  std::ofstream(cfg) << R"({"n_max": 9, "B1": "-0.25", "s2": 1.1, "seed": 5, "n-list": [8, 16, 32]})";
  const auto c = parse({"verify", "--config", cfg, "--n-max", "4"});
  EXPECT_EQ(c.n_max, 4);
  EXPECT_EQ(c.B1, "-0.25");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.n_list, (std::vector<int>{8, 16, 32}));
  EXPECT_DOUBLE_EQ(std::stod(c.s2), 1.1);
  std::ofstream(path("bad.json")) << R"({"nonsense": 1})";
  EXPECT_THROW(parse({"verify", "--config", path("bad.json")}), ConfigInvalid);
  std::ofstream(path("broken.json")) << "{";
  EXPECT_THROW(parse({"verify", "--config", path("broken.json")}), ConfigInvalid);
}

TEST_F(TempDir, MomentsPrintsGaussianMass) {
  EnvGuard env(nullptr);
  auto c = parse({"moments", "--B1", "0", "--B2", "0", "--relaxed", "--output", path("m.txt")});
  const auto r = run(c);
  EXPECT_EQ(r.exit_code, 0);
  // sqrt(pi) to the 38 digits a 128-bit value carries.
  EXPECT_EQ(slurp(path("m.txt")).substr(0, 30), "1.7724538509055160272981674833");
  EXPECT_EQ(r.primary, slurp(path("m.txt")));
}

TEST_F(TempDir, RecurrenceCsv) {
  EnvGuard env(nullptr);
  const auto r = run(parse({"recurrence", "--n-max", "5", "--output", path("r.csv")}));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.primary.rfind("n,alpha_n,beta_n,h_n,p_n,logD_n\n0,", 0), 0u);
  EXPECT_EQ(std::count(r.primary.begin(), r.primary.end(), '\n'), 7);
}

TEST_F(TempDir, VerifyReportSchema) {
  EnvGuard env(nullptr);
  const auto r = run(parse({"verify", "--n-max", "6", "--output", path("v.json")}));
  ASSERT_EQ(r.exit_code, 0);
  const auto doc = nlohmann::json::parse(slurp(path("v.json")));
  EXPECT_EQ(doc["command"], "verify");
  EXPECT_TRUE(doc["params"].contains("A"));
  EXPECT_TRUE(doc["params"].contains("strict"));
  EXPECT_GE(doc["precision_bits"].get<long>(), 512);
  ASSERT_GT(doc["checks"].size(), 50u);
  for (const auto& chk : doc["checks"]) {
    for (const char* key : {"label", "lhs", "rhs", "rel_residual", "threshold"}) {
      ASSERT_TRUE(chk[key].is_string()) << key;
    }
    EXPECT_TRUE(chk["n"].is_number_integer());
    EXPECT_TRUE(chk["pass"].get<bool>());
    // 40 significant digits, for values that are not exact zeros.
    const std::string lhs = chk["lhs"];
    std::size_t digits = 0;
    for (char ch : lhs.substr(0, lhs.find_first_of("eE"))) digits += std::isdigit(static_cast<unsigned char>(ch)) != 0;
    if (lhs != "0") EXPECT_GE(digits, 40u) << lhs;
  }
}

TEST_F(TempDir, InvalidParamsExitTwo) {
  EnvGuard env(nullptr);
  // s1 > s2 is only accepted with --relaxed.
  EXPECT_EQ(run(parse({"verify", "--s1", "1", "--s2", "0", "--output", path("x.json")})).exit_code, 2);
  EXPECT_FALSE(fs::exists(path("x.json")));
  EXPECT_EQ(run(parse({"painleve4", "--A", "-1", "--output", path("y.json")})).exit_code, 2);
}

TEST_F(TempDir, PrecisionExhaustedExitThree) {
  EnvGuard env(nullptr);
  EXPECT_EQ(run(parse({"recurrence", "--n-max", "30", "--precision-bits", "64", "--output", path("z.csv")})).exit_code,
            3);
}

TEST(Main, ExitCodes) {
  EnvGuard env(nullptr);
  const char* bogus[] = {"jgl", "bogus"};
  EXPECT_EQ(jgl::cli::main(2, bogus), 2);
  const char* help[] = {"jgl", "--help"};
  EXPECT_EQ(jgl::cli::main(2, help), 0);
}

TEST_F(TempDir, DeterministicAcrossRunsAndThreads) {
  EnvGuard env(nullptr);
  auto c = parse({"montecarlo", "--n", "3", "--samples", "20000", "--seed", "9", "--output", path("a.csv")});
  const auto a = run(c);
  c.threads = 3;
  c.output_path = path("b.csv");
  const auto b = run(c);
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(a.primary.rfind("n,s1,s2,mode,p_hat,stderr,p_det,sigma_distance\n", 0), 0u);

  const auto p1 = run(parse({"painleve4", "--n", "4", "--output", path("p1.json")}));
  const auto p2 = run(parse({"painleve4", "--n", "4", "--output", path("p2.json")}));
  EXPECT_EQ(p1.exit_code, 0);
  EXPECT_EQ(slurp(path("p1.json")), slurp(path("p2.json")));
}

TEST_F(TempDir, SecondaryCsvForIntegratePii) {
  EnvGuard env(nullptr);
  const auto r = run(parse({"integrate-pii", "--n-list", "8,16,32", "--xi-span", "0", "--output", path("i.json"),
                            "--csv", path("traj.csv")}));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(slurp(path("traj.csv")).rfind("xi,v1,v2,w1,w2,H2\n", 0), 0u);
}

TEST_F(TempDir, WriteAtomicLeavesNoTemporaries) {
  const std::string target = path("out.txt");
  write_atomic(target, "first\n");
  write_atomic(target, "second\n");
  EXPECT_EQ(slurp(target), "second\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_)) ++files;
  EXPECT_EQ(files, 1u);
  EXPECT_ANY_THROW(write_atomic(path("missing/dir/out.txt"), "x"));
}
