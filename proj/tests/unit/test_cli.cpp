#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"

#ifndef DMPRED_CLI
#error "DMPRED_CLI must name the dmpred executable"
#endif

namespace dmpred {
namespace {

namespace fs = std::filesystem;

int run(const std::string& args, const fs::path& log) {
  // every stochastic command needs a seed; tests that care pass their own
  const std::string seed = args.find("--seed") == std::string::npos ? " --seed 5" : "";
  const std::string cmd =
      std::string("\"") + DMPRED_CLI + "\" " + args + seed + " > \"" + log.string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::stringstream s;
  s << std::ifstream(p, std::ios::binary).rdbuf();
  return s.str();
}

TEST(Cli, SimulateIsDeterministic) {
  const auto dir = testing::scratch_dir("cli_sim");
  ASSERT_EQ(run("simulate --pairs 60 --seed 7 --out " + (dir / "a").string(), dir / "a.log"), 0);
  ASSERT_EQ(run("simulate --pairs 60 --seed 7 --out " + (dir / "b").string(), dir / "b.log"), 0);
  const auto games = slurp(dir / "a" / "games.csv");
  EXPECT_EQ(games, slurp(dir / "b" / "games.csv"));
  EXPECT_EQ(slurp(dir / "a" / "reviews.csv"), slurp(dir / "b" / "reviews.csv"));
  EXPECT_EQ(std::count(games.begin(), games.end(), '\n'), 601);
  const auto m = nlohmann::json::parse(slurp(dir / "a" / "simulate_manifest.json"));
  EXPECT_EQ(m["seed"], 7);
}

TEST(Cli, ZeroPairsIsUsageError) {
  const auto dir = testing::scratch_dir("cli_zero");
  EXPECT_NE(run("simulate --pairs 0 --out " + dir.string(), dir / "log"), 0);
}

TEST(Cli, FeaturizeHcAndMissingEmbeddings) {
  const auto dir = testing::scratch_dir("cli_feat");
  ASSERT_EQ(run("simulate --pairs 3 --out " + dir.string(), dir / "sim.log"), 0);
  ASSERT_EQ(run("featurize --reviews " + (dir / "reviews.csv").string() + " --out " + (dir / "f").string(),
                dir / "f.log"),
            0);
  const auto hc = slurp(dir / "f" / "hc_features.csv");
  EXPECT_EQ(std::count(hc.begin(), hc.end(), '\n'), 71);
  const std::string first_row = hc.substr(hc.find('\n') + 1, hc.find('\n', hc.find('\n') + 1) - hc.find('\n') - 1);
  EXPECT_EQ(std::count(first_row.begin(), first_row.end(), ','), 42);

  EXPECT_EQ(run("featurize --textual dnn --reviews " + (dir / "reviews.csv").string() + " --out " +
                    (dir / "g").string(),
                dir / "g.log"),
            2);
  EXPECT_NE(slurp(dir / "g.log").find("--embeddings"), std::string::npos);
}

TEST(Cli, OverridesFlagged) {
  const auto dir = testing::scratch_dir("cli_over");
  ASSERT_EQ(run("simulate --pairs 2 --out " + dir.string(), dir / "sim.log"), 0);
  const auto reviews = slurp(dir / "reviews.csv");
  const auto line2 = reviews.substr(reviews.find('\n') + 1);
  const auto id = line2.substr(0, line2.find(','));
  auto gold = slurp(testing::fixture("sample_overrides.csv"));
  const auto header = gold.substr(0, gold.find('\n') + 1);
  const auto row = gold.substr(gold.find("sample-r2"));
  const auto cells = row.find(',');
  std::ofstream(dir / "over.csv") << header << id << row.substr(cells, row.find('\n') - cells) << "\n";
  ASSERT_EQ(run("featurize --reviews " + (dir / "reviews.csv").string() + " --overrides " + (dir / "over.csv").string() +
                    " --out " + (dir / "f").string(),
                dir / "f.log"),
            0);
  const auto src = slurp(dir / "f" / "hc_sources.csv");
  EXPECT_NE(src.find(id + ",override"), std::string::npos);
  EXPECT_EQ(std::count(src.begin(), src.end(), '\n') - 1, 70);
}

TEST(Cli, TrainEvaluateAblate) {
  const auto dir = testing::scratch_dir("cli_train");
  ASSERT_EQ(run("simulate --pairs 8 --seed 1 --dm feature:13 --out " + dir.string(), dir / "sim.log"), 0);
  const std::string data = " --games " + (dir / "games.csv").string() + " --reviews " + (dir / "reviews.csv").string();
  ASSERT_EQ(run("train --variant lstm-trcr --hidden 8 --epochs 2" + data + " --out " + (dir / "m").string(),
                dir / "train.log"),
            0)
      << slurp(dir / "train.log");
  ASSERT_EQ(run("evaluate --model " + (dir / "m" / "model.bin").string() + data + " --out " + (dir / "e").string(),
                dir / "eval.log"),
            0)
      << slurp(dir / "eval.log");
  const auto metrics = nlohmann::json::parse(slurp(dir / "e" / "metrics.json"));
  EXPECT_NE(metrics.dump().find("\"rmse\""), std::string::npos);
  ASSERT_EQ(run("ablate --predictions lstm=" + (dir / "e" / "predictions.csv").string() + " --out " +
                    (dir / "a").string(),
                dir / "abl.log"),
            0)
      << slurp(dir / "abl.log");
  EXPECT_TRUE(fs::exists(dir / "a" / "ablation.csv"));
}

TEST(Cli, BaselinesOnlyCv) {
  const auto dir = testing::scratch_dir("cli_cv");
  ASSERT_EQ(run("simulate --pairs 12 --seed 2 --out " + (dir / "tv").string(), dir / "a.log"), 0);
  ASSERT_EQ(run("simulate --pairs 4 --seed 3 --split test --out " + (dir / "te").string(), dir / "b.log"), 0);
  const std::string args = "cv --baselines-only --ewg-draws 100 --train-games " + (dir / "tv" / "games.csv").string() +
                           " --train-reviews " + (dir / "tv" / "reviews.csv").string() + " --test-games " +
                           (dir / "te" / "games.csv").string() + " --test-reviews " +
                           (dir / "te" / "reviews.csv").string();
  ASSERT_EQ(run(args + " --out " + (dir / "o1").string(), dir / "c1.log"), 0) << slurp(dir / "c1.log");
  ASSERT_EQ(run(args + " --out " + (dir / "o2").string(), dir / "c2.log"), 0);
  const auto m = slurp(dir / "o1" / "metrics.json");
  EXPECT_EQ(m, slurp(dir / "o2" / "metrics.json"));
  for (const char* b : {"\"AVG\"", "\"MED\"", "\"MVC\"", "\"EWG\""}) EXPECT_NE(m.find(b), std::string::npos) << b;
}

}  // namespace
}  // namespace dmpred
