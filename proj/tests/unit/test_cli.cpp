#include "cli.hpp"
#include "config.hpp"
#include "output.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace fs = std::filesystem;
using gpbayes::cli::Config;
using gpbayes::cli::ConfigError;
using gpbayes::cli::run_cli;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gpbayes_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kRegress = R"(
[experiment]
kind = regress
seed = 5

[regress]
function = sin_shift_sq
design = uniform
n_train = 6
grid_nodes = 41
samples = 2

[kernel]
family = matern32
lengthscale = 0.7
variance = 1
)";

}  // namespace

TEST(Config, ParsesSectionsListsAndComments) {
  const auto cfg = Config::parse("top = 1\n[a]\n# note\nx = 2.5  # trailing\nlist = 1, 2 ,3\nflag = yes\n");
  EXPECT_EQ(cfg.get_u64("", "top"), 1u);
  EXPECT_DOUBLE_EQ(cfg.get_double("a", "x"), 2.5);
  EXPECT_EQ(cfg.get_sizes("a", "list"), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_TRUE(cfg.get_bool("a", "flag"));
  EXPECT_NO_THROW(cfg.reject_unknown());
}

TEST(Config, DefaultsAppearInResolvedText) {
  const auto cfg = Config::parse("[a]\nx = 2\n");
  (void)cfg.get_double("a", "x");
  (void)cfg.get_double("a", "y", 0.25);
  EXPECT_EQ(cfg.resolved_text(), "[a]\nx = 2\ny = 0.25\n");
}

TEST(Config, UnknownKeyNamesKeyAndLine) {
  const auto cfg = Config::parse("[a]\nx = 1\nmystery = 2\n", "f.cfg");
  (void)cfg.get_double("a", "x");
  try {
    cfg.reject_unknown();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "a.mystery");
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("f.cfg:3"), std::string::npos);
  }
}

TEST(Config, RejectsMalformedLinesAndDuplicates) {
  EXPECT_THROW(Config::parse("[a\n"), ConfigError);
  EXPECT_THROW(Config::parse("[a]\njust words\n"), ConfigError);
  EXPECT_THROW(Config::parse("[a]\nx = 1\nx = 2\n"), ConfigError);
}

TEST(Config, BadNumbersAreReportedWithTheKey) {
  const auto cfg = Config::parse("[k]\nlengthscale = abc\nn = -3\n");
  EXPECT_THROW((void)cfg.get_double("k", "lengthscale"), ConfigError);
  EXPECT_THROW((void)cfg.get_size("k", "n"), ConfigError);
  EXPECT_THROW((void)cfg.get_double("k", "missing"), ConfigError);
}

TEST(Output, Fnv1aMatchesReferenceVectors) {
  EXPECT_EQ(gpbayes::cli::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(gpbayes::cli::fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Cli, RunWritesCsvMetaAndResolvedConfig) {
  const auto dir = scratch("meta");
  const auto cfg = write_file(dir / "r.cfg", kRegress);
  const auto r = run({"run", "--config", cfg.string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "resolved.cfg"));
  const std::string meta = slurp(dir / "out" / "predictions.csv.meta");
  EXPECT_NE(meta.find("seed = 5"), std::string::npos);
  EXPECT_NE(meta.find("version = "), std::string::npos);
  EXPECT_NE(meta.find("config_hash = "), std::string::npos);
  const std::string csv = slurp(dir / "out" / "predictions.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,truth,mean,std,sample_1,sample_2");
  // Defaults are echoed.
  EXPECT_NE(slurp(dir / "out" / "resolved.cfg").find("grid_max = 5"), std::string::npos);
}

TEST(Cli, SameSeedGivesIdenticalBytes) {
  const auto dir = scratch("determinism");
  const auto cfg = write_file(dir / "r.cfg", kRegress);
  ASSERT_EQ(run({"run", cfg.string(), "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"regress", "--config", cfg.string(), "--out", (dir / "b").string(), "--threads", "2"}).code, 0);
  for (const char* f : {"predictions.csv", "design.csv", "predictions.csv.meta"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
}

TEST(Cli, SeedOverrideChangesSampledOutput) {
  const auto dir = scratch("seed");
  const auto cfg = write_file(dir / "r.cfg", kRegress);
  ASSERT_EQ(run({"run", cfg.string(), "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"run", cfg.string(), "--out", (dir / "b").string(), "--seed", "6"}).code, 0);
  EXPECT_NE(slurp(dir / "a" / "design.csv"), slurp(dir / "b" / "design.csv"));
  EXPECT_NE(slurp(dir / "b" / "design.csv.meta").find("seed = 6"), std::string::npos);
}

TEST(Cli, NegativeLengthscaleExitsOneNamingTheKey) {
  const auto dir = scratch("negative");
  const auto cfg = write_file(dir / "bad.cfg", "[experiment]\nkind = regress\n[kernel]\nlengthscale = -1\n");
  const auto r = run({"run", "--config", cfg.string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, gpbayes::cli::kExitValidation);
  EXPECT_NE(r.err.find("kernel.lengthscale"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find(":4:"), std::string::npos) << r.err;
}

TEST(Cli, UnknownKeyExitsOne) {
  const auto dir = scratch("unknown");
  const auto cfg = write_file(dir / "bad.cfg", std::string(kRegress) + "[regress2]\nfoo = 1\n");
  const auto r = run({"run", cfg.string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, gpbayes::cli::kExitValidation);
  EXPECT_NE(r.err.find("regress2.foo"), std::string::npos) << r.err;
}

TEST(Cli, UnknownKindAndKindMismatchExitOne) {
  const auto dir = scratch("kind");
  const auto a = write_file(dir / "a.cfg", "[experiment]\nkind = nonsense\n");
  EXPECT_EQ(run({"run", a.string(), "--out", (dir / "o").string()}).code, 1);
  const auto b = write_file(dir / "b.cfg", kRegress);
  const auto r = run({"invert", b.string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("experiment.kind"), std::string::npos);
}

TEST(Cli, MissingConfigFileExitsOne) {
  EXPECT_EQ(run({"run", "--config", "/nonexistent/x.cfg", "--out", "/tmp/x"}).code, 1);
  EXPECT_EQ(run({"run"}).code, 1);
  EXPECT_EQ(run({"bogus-subcommand"}).code, 1);
}

TEST(Cli, NumericalFailureExitsTwo) {
  const auto dir = scratch("numerical");
  const auto cfg = write_file(dir / "c.cfg", R"(
[experiment]
kind = invert
[forward]
type = identity
[data]
y = 1
[prior]
type = gaussian
[surrogate]
design = posterior
threshold = 0.9999
n_train = 5
rejection_cap = 50
)");
  const auto r = run({"run", cfg.string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, gpbayes::cli::kExitNumerical);
  EXPECT_NE(r.err.find("rejection cap"), std::string::npos) << r.err;
}

TEST(Cli, KindsAndVersion) {
  const auto k = run({"kinds"});
  EXPECT_EQ(k.code, 0);
  EXPECT_NE(k.out.find("hellinger-convergence"), std::string::npos);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, std::string(gpbayes::cli::version()) + "\n");
}

namespace {

class ScratchCleanup : public ::testing::Environment {
 public:
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(fs::temp_directory_path() / ("gpbayes_cli_test_" + std::to_string(::getpid())), ec);
  }
};

const auto* const kCleanup = ::testing::AddGlobalTestEnvironment(new ScratchCleanup);

}  // namespace
