#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cmasim_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  int sim(const std::string& args) {
    const std::string cmd = std::string("\"") + SIM_EXECUTABLE + "\" " + args + " > \"" +
                            (dir_ / "stdout.txt").string() + "\" 2> \"" + (dir_ / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string q(const fs::path& p) const { return "\"" + p.string() + "\""; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ValidateExitCodes) {
  EXPECT_EQ(sim("validate --config " + q(write("ok.json", "{}"))), 0);
  EXPECT_NE(read(dir_ / "stdout.txt").find("valid "), std::string::npos);
  EXPECT_EQ(sim("validate --config " + q(write("bad.json", R"({"transport":{"dt":-1}})"))), 1);
  EXPECT_NE(read(dir_ / "stderr.txt").find("transport.dt"), std::string::npos);
  EXPECT_EQ(sim("validate --config " + q(write("broken.json", "{\n  \"run\": }"))), 1);
  EXPECT_NE(read(dir_ / "stderr.txt").find("line 2"), std::string::npos);
  EXPECT_EQ(sim("validate --config " + q(dir_ / "missing.json")), 1);
  EXPECT_EQ(sim("frobnicate"), 1);
  EXPECT_EQ(sim("run"), 1);
}

TEST_F(Cli, RunTwiceIsByteIdentical) {
  const auto cfg = write("c.json", "{}");
  for (const char* exp : {"sweep", "pressure", "patterns", "scenario"}) {
    ASSERT_EQ(sim(std::string("run --config ") + q(cfg) + " --experiment " + exp + " --svg --out " + q(dir_ / "a")), 0);
    ASSERT_EQ(sim(std::string("run --config ") + q(cfg) + " --experiment " + exp + " --svg --out " + q(dir_ / "b")), 0);
    for (const char* ext : {".csv", ".svg"}) {
      const std::string name = std::string(exp) + ext;
      const auto a = read(dir_ / "a" / name);
      EXPECT_FALSE(a.empty()) << name;
      EXPECT_EQ(a, read(dir_ / "b" / name)) << name;
    }
  }
  const auto manifest = nlohmann::json::parse(read(dir_ / "a" / "manifest.json"));
  EXPECT_EQ(manifest["command"], "run");
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
  EXPECT_TRUE(manifest.contains("timings_s"));
  EXPECT_TRUE(manifest.contains("versions"));
}

TEST_F(Cli, ExperimentFromConfig) {
  const auto out = dir_ / "o";
  const auto cfg = write("c.json", R"({"run":{"experiment":"pressure","out_dir":")" + out.string() + R"("}})");
  ASSERT_EQ(sim("run --config " + q(cfg)), 0);
  EXPECT_EQ(read(out / "pressure.csv").substr(0, 21), "cover,label,gen_kPa\nT");
  EXPECT_FALSE(fs::exists(out / "pressure.svg"));
}

TEST_F(Cli, IncompleteRunsExitTwo) {
  const auto cfg = write("c.json", R"({"run":{"valves_enabled":false,"pattern_cycles":1}})");
  EXPECT_EQ(sim("run --config " + q(cfg) + " --experiment patterns --out " + q(dir_ / "o")), 2);
  EXPECT_TRUE(fs::exists(dir_ / "o" / "patterns.csv"));
}

TEST_F(Cli, UnknownExperimentIsInputError) {
  EXPECT_EQ(sim("run --config " + q(write("c.json", "{}")) + " --experiment bogus --out " + q(dir_ / "o")), 1);
}

TEST_F(Cli, CalibrateWritesFitAndConfig) {
  const auto cfg = write("c.json", R"({"run":{"pattern_cycles":4}})");
  const auto targets = write("t.csv", "pattern,t_on_s,velocity_gps\npattern1,1,0.42\npattern2,1,0.17\n"
                                      "pattern1,2,0.22\npattern1,3,0.11\n");
  ASSERT_EQ(sim("calibrate --config " + q(cfg) + " --targets " + q(targets) + " --max-sweeps 1 --out " +
                q(dir_ / "cal")),
            0);
  const auto fitted = read(dir_ / "cal" / "calibrated_config.json");
  EXPECT_EQ(sim("validate --config " + q(dir_ / "cal" / "calibrated_config.json")), 0);
  const auto j = nlohmann::json::parse(fitted);
  EXPECT_GT(j["transport"]["mobility"].get<double>(), 0.0);
  const auto fit = read(dir_ / "cal" / "calibration_fit.csv");
  EXPECT_EQ(fit.substr(0, 37), "pattern,t_on_s,target_gps,velocity_gp");
  EXPECT_TRUE(fs::exists(dir_ / "cal" / "calibration_history.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "cal" / "manifest.json"));
}

TEST_F(Cli, CalibrationFailureExitsTwo) {
  const auto cfg = write("c.json", R"({"run":{"pattern_cycles":1},"transport":{"o_push":1,"o_block":1}})");
  const auto targets = write("t.csv", "pattern,t_on_s,velocity_gps\npattern1,1,0.42\npattern2,1,0.17\n");
  EXPECT_EQ(sim("calibrate --config " + q(cfg) + " --targets " + q(targets) + " --max-sweeps 1 --out " +
                q(dir_ / "cal")),
            2);
}
