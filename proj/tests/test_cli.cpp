#include <filesystem>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli_harness.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("rsa_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json last_json_line(const std::string& text) {
  auto end = text.find_last_not_of('\n');
  auto begin = text.rfind('\n', end);
  begin = begin == std::string::npos ? 0 : begin + 1;
  return nlohmann::json::parse(text.substr(begin, end - begin + 1));
}

}  // namespace

TEST(Cli, VersionAndUsage) {
  const auto dir = scratch("usage");
  EXPECT_EQ(cli::run({"--version"}, dir).exit_code, 0);
  EXPECT_EQ(cli::run({"--help"}, dir).exit_code, 0);

  const auto none = cli::run({}, dir);
  EXPECT_EQ(none.exit_code, 2);
  EXPECT_EQ(last_json_line(none.err)["error"], "usage");

  const auto bad = cli::run({"rdm", "--bogus"}, dir);
  EXPECT_EQ(bad.exit_code, 2);
  EXPECT_EQ(last_json_line(bad.err)["error"], "usage");
}

TEST(Cli, MissingInputIsIoError) {
  const auto dir = scratch("io");
  const auto r = cli::run({"rdm", "--pooled", (dir / "nope.csv").string(), "--out", (dir / "r.csv").string()}, dir);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(last_json_line(r.err)["error"], "io");
}

TEST(Cli, InvalidInputIsValidationError) {
  const auto dir = scratch("validation");
  cli::spit(dir / "pooled.csv", "id,d0,d1\na,1,2\nb,nan,3\n");
  const auto r = cli::run({"rdm", "--pooled", (dir / "pooled.csv").string(), "--out", (dir / "r.csv").string()}, dir);
  EXPECT_EQ(r.exit_code, 2);
  const auto j = last_json_line(r.err);
  EXPECT_EQ(j["error"], "validation");
  EXPECT_FALSE(fs::exists(dir / "r.csv"));
}

TEST(Cli, SingularCovarianceWithoutRidge) {
  const auto dir = scratch("singular");
  cli::spit(dir / "pooled.csv", "id,d0,d1,d2,d3\na,1,0,0,1\nb,0,1,0,1\nc,0,0,1,1\nd,1,1,1,3\n");
  const auto args = [&](const std::string& ridge) {
    return std::vector<std::string>{"rdm", "--pooled", (dir / "pooled.csv").string(), "--metric", "mahalanobis",
                                    "--ridge", ridge, "--out", (dir / "r.csv").string()};
  };
  const auto r = cli::run(args("0"), dir);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(last_json_line(r.err)["message"], "singular covariance");
  EXPECT_EQ(cli::run(args("0.01"), dir).exit_code, 0);
}

TEST(Cli, ConstantRowWarningGoesToStderr) {
  const auto dir = scratch("warn");
  cli::spit(dir / "pooled.csv", "id,d0,d1,d2\na,1,1,1\nb,0,1,2\nc,2,0,1\n");
  const auto r = cli::run({"rdm", "--pooled", (dir / "pooled.csv").string(), "--out", (dir / "r.csv").string()}, dir);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(last_json_line(r.err).contains("warning"));
}

TEST(Cli, FullPipelineIsDeterministic) {
  std::vector<std::string> failures;
  const auto dir = fs::temp_directory_path() / "rsa_cli_pipeline";
  const auto a = cli::run_pipeline(dir, 1, true, failures);
  const auto b = cli::run_pipeline(dir, 4, true, failures);
  EXPECT_TRUE(failures.empty()) << failures.front();
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.contains("third.tsv.manifest.json"));
  const auto manifest = nlohmann::json::parse(a.at("third.tsv.manifest.json"));
  EXPECT_EQ(manifest["command"], "third");
  EXPECT_EQ(manifest["inputs"].size(), 2u);
  EXPECT_EQ(manifest["outputs"][0]["sha256"].get<std::string>().size(), 64u);
}
