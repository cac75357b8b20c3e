#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "modsym/pipeline.hpp"

using namespace modsym;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "modsym_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, std::string* out = nullptr, const std::string& env = "") {
  const auto log = fs::temp_directory_path() / "modsym_tests" / "cli_out.txt";
  const std::string cmd = env + " " + std::string(MODSYM_LAB_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream is(log);
    std::ostringstream os;
    os << is.rdbuf();
    *out = os.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST(Config, DefaultsValid) {
  RunConfig c;
  EXPECT_NO_THROW(validate(c));
  EXPECT_EQ(c.level, 11);
  EXPECT_EQ(c.digits, 10);
  EXPECT_EQ(c.z_ref.y, 1.0);
}

TEST(Config, ApplyJson) {
  const auto c = apply_config(RunConfig{}, nlohmann::json::parse(R"({"T": 300, "digits": 12, "T_grid": [1,2,3,4],
      "gamma1": [-2, -1, 11, 5], "z_ref": [0.1, 2.0], "threads": 2})"));
  EXPECT_EQ(c.T, 300.0);
  EXPECT_EQ(c.digits, 12);
  ASSERT_TRUE(c.gamma1.has_value());
  EXPECT_EQ(*c.gamma1, GroupElement(-2, -1, 11, 5));
  EXPECT_EQ(c.z_ref.x, 0.1);
  EXPECT_EQ(c.threads, 2u);
}

TEST(Config, Rejections) {
  EXPECT_THROW(apply_config(RunConfig{}, nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
  EXPECT_THROW(apply_config(RunConfig{}, nlohmann::json::parse(R"({"T": "big"})")), ConfigError);
  EXPECT_THROW(apply_config(RunConfig{}, nlohmann::json::parse(R"({"gamma1": [1, 1, 1, 1]})")), ConfigError);
  EXPECT_THROW(apply_config(RunConfig{}, nlohmann::json::parse(R"({"z_ref": [0, -1]})")), ConfigError);
  RunConfig c;
  c.gamma1 = GroupElement(1, 1, 0, 1);
  EXPECT_THROW(validate(c), ConfigError);
  c.gamma1 = GroupElement(2, 1, 1, 1);
  EXPECT_THROW(validate(c), ConfigError);
  c = RunConfig{};
  c.T_grid = {500, 250};
  EXPECT_THROW(validate(c), ConfigError);
  c = RunConfig{};
  c.level = 37;
  EXPECT_THROW(validate(c), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, NonVanishingGamma1Aborts) {
  RunConfig c;
  c.gamma1 = GroupElement(-2, -1, 11, 5);  // hyperbolic, but its symbol is a nonzero period
  Workspace ws(c);
  EXPECT_THROW(ws.context(), ConfigError);
}

TEST(Config, CacheDirEnvOverride) {
  RunConfig c;
  c.cache_dir = "/tmp/from_config";
  ::setenv("MODSYM_CACHE_DIR", "/tmp/from_env", 1);
  EXPECT_EQ(resolve_cache_dir(c)->string(), "/tmp/from_env");
  ::unsetenv("MODSYM_CACHE_DIR");
  EXPECT_EQ(resolve_cache_dir(c)->string(), "/tmp/from_config");
}

TEST(Cli, MissingConfigExit2) {
  std::string out;
  EXPECT_EQ(run("enumerate --config /nonexistent/cfg.json", &out), 2);
  EXPECT_NE(out.find("cannot open config"), std::string::npos);
}

TEST(Cli, BadFlagsExit2) {
  EXPECT_EQ(run("enumerate --T -5"), 2);
  EXPECT_EQ(run("moments --Tgrid 250,500,1000 --out /tmp/modsym_tests/short"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST(Cli, ComputeErrorExit3) {
  const auto dir = scratch("cli_compute");
  const auto coeffs = dir / "short.txt";
  std::ofstream(coeffs) << "# qexp N=11 k=2 M=3\n1 1\n2 -2\n3 -1\n";
  EXPECT_EQ(run("symbols --T 50 --coeff-file " + coeffs.string() + " --out " + dir.string()), 3);
}

TEST(Cli, EnumerateCacheHitIdenticalReport) {
  const auto dir = scratch("cli_enum");
  std::string a, b;
  ASSERT_EQ(run("enumerate --N 11 --T 500 --out " + dir.string(), &a), 0);
  const std::string first = slurp(dir / "enumerate_report.json");
  ASSERT_EQ(run("enumerate --N 11 --T 500 --out " + dir.string(), &b), 0);
  EXPECT_NE(a.find("count=1378"), std::string::npos) << a;
  EXPECT_NE(a.find("cache=miss"), std::string::npos);
  EXPECT_NE(b.find("cache=hit"), std::string::npos);
  EXPECT_EQ(slurp(dir / "enumerate_report.json"), first);
  bool found = false;
  for (const auto& f : fs::directory_iterator(dir / "cache")) found = found || f.path().filename().string().rfind("cosets_", 0) == 0;
  EXPECT_TRUE(found);
}

TEST(Cli, EnvCacheDir) {
  const auto dir = scratch("cli_env");
  const auto cache = dir / "envcache";
  ASSERT_EQ(run("enumerate --T 50 --out " + dir.string(), nullptr, "MODSYM_CACHE_DIR=" + cache.string()), 0);
  EXPECT_TRUE(fs::exists(cache));
  EXPECT_FALSE(fs::exists(dir / "cache"));
}

TEST(Cli, EisensteinAndMoments) {
  const auto dir = scratch("cli_eis");
  std::string out;
  ASSERT_EQ(run("eisenstein --z 0,2 --s 3,0 --T 200 --out " + dir.string(), &out), 0);
  const auto j = nlohmann::json::parse(slurp(dir / "eisenstein_report.json"));
  EXPECT_GT(j["result"]["value"][0].get<double>(), 0.0);
  EXPECT_GT(j["result"]["tail_estimate"].get<double>(), 0.0);
  ASSERT_EQ(run("moments --m 1 --n 0 --Tgrid 125,250,500,1000 --out " + dir.string()), 0);
  const auto m = nlohmann::json::parse(slurp(dir / "moments_report.json"))["result"];
  EXPECT_EQ(m["model"], "T_logpow");
  EXPECT_EQ(m["meta"]["m"], 1);
  EXPECT_EQ(m["T_grid"].size(), 4u);
}

TEST(Cli, DistributionSvg) {
  const auto dir = scratch("cli_dist");
  ASSERT_EQ(run("distribution --Tgrid 100,200,400,800 --svg --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "distribution.csv"));
  const auto svg = slurp(dir / "distribution.svg");
  EXPECT_LE(svg.size(), 50u * 1024u);
  EXPECT_EQ(svg.find("script"), std::string::npos);
  const std::string first = slurp(dir / "distribution_report.json");
  ASSERT_EQ(run("distribution --Tgrid 100,200,400,800 --svg --out " + dir.string()), 0);
  EXPECT_EQ(slurp(dir / "distribution_report.json"), first);
}

TEST(Cli, TamperedCoefficientsFailVerify) {
  const auto dir = scratch("cli_tamper");
  const auto coeffs = dir / "tampered.txt";
  std::ofstream(coeffs) << "# qexp N=11 k=2 M=3\n1 1\n2 -2\n3 900\n";
  std::string out;
  EXPECT_EQ(run("verify --quick --coeff-file " + coeffs.string() + " --out " + dir.string(), &out), 1);
  EXPECT_NE(out.find("|a_3| = 900"), std::string::npos) << out;
}
