#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "citemap/pipeline.hpp"
#include "citemap/synthetic.hpp"

using namespace citemap;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "citemap_pipeline" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig config_in(const std::string& name) {
  PipelineConfig c;
  c.out_dir = fresh_dir(name);
  return c;
}

}  // namespace

TEST(Config, KeyValueLines) {
  PipelineConfig c;
  apply_config_text(c, "# comment\ntransform = arcsinh\nmeasure = cosine\nfactors = 3\nthreshold = 0.25\nseed = 7\n");
  EXPECT_EQ(c.transform, Transform::arcsinh);
  EXPECT_EQ(c.measure, Measure::cosine);
  EXPECT_EQ(c.fixed_factors, 3u);
  EXPECT_EQ(c.threshold, 0.25);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_THROW(apply_config_text(c, "nonsense = 1\n"), ParseError);
}

TEST(LoadInput, MissingFileNamesPath) {
  PipelineConfig c;
  c.input = "/nonexistent/m.csv";
  try {
    load_input(c);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/m.csv"), std::string::npos);
  }
}

TEST(Stats, OneByOneMatrix) {
  auto c = config_in("one");
  const auto r = cmd_stats(c, CitationMatrix::from_ids({"X"}, Matrix{{0}}));
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "stats.csv"));
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_THROW(cmd_classify(c, CitationMatrix::from_ids({"X"}, Matrix{{0}})), DimensionError);
}

TEST(Classify, IdentityMatrixKeepsTwoFactors) {
  auto c = config_in("identity");
  c.transform = Transform::none;
  const auto r = cmd_classify(c, CitationMatrix::from_ids({"a", "b", "c"}, Matrix::identity(3)));
  EXPECT_EQ(r.summary["variants"][0]["kaiser_count"], 2);
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "loadings_raw.txt"));
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "scree.svg"));
}

TEST(Classify, ForcedFactorCountIsNoted) {
  auto c = config_in("forced");
  c.fixed_factors = 2;
  const auto r = cmd_classify(c, synthetic::demo_matrix());
  EXPECT_EQ(r.summary["variants"][0]["factors"], 2);
  EXPECT_NE(slurp(c.out_dir / "loadings_raw.txt").find("forced to 2"), std::string::npos);
  EXPECT_NE(slurp(c.out_dir / "loadings_log.txt").find("forced to 2"), std::string::npos);
}

TEST(Classify, NoFactorAboveOne) {
  auto c = config_in("nofactor");
  c.transform = Transform::none;
  // Disjoint rows have cosine similarity 0, so every eigenvalue is exactly 1.
  c.measure = Measure::cosine;
  const auto m = CitationMatrix::from_ids({"a", "b", "c", "d"}, Matrix::identity(4));
  const auto r = cmd_classify(c, m);
  EXPECT_EQ(r.summary["variants"][0]["kaiser_count"], 0);
  EXPECT_NE(slurp(c.out_dir / "loadings_raw.txt").find("No factors retained"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(c.out_dir / "loadings_raw.csv"));
}

TEST(Powerlaw, SkipsEmptyRowAndMarksShortRow) {
  auto c = config_in("powerlaw");
  const auto m = CitationMatrix::from_ids({"full", "none", "short"},
                                          Matrix{{100, 50, 33}, {0, 0, 0}, {4, 0, 0}});
  const auto r = cmd_powerlaw(c, m);
  const auto csv = slurp(c.out_dir / "powerlaw.csv");
  EXPECT_NE(csv.find("short,1,NA,NA,NA,NA"), std::string::npos);
  EXPECT_EQ(csv.find("none"), std::string::npos);
  EXPECT_EQ(r.warnings.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "powerlaw" / "full.svg"));
}

TEST(Map, SameSeedGivesIdenticalFiles) {
  auto a = config_in("map_a"), b = config_in("map_b");
  const auto m = synthetic::demo_matrix();
  cmd_map(a, m);
  cmd_map(b, m);
  for (const char* f : {"map_raw.svg", "map_log.svg", "map_log.net", "map_log.dot"})
    EXPECT_EQ(slurp(a.out_dir / f), slurp(b.out_dir / f)) << f;
}

TEST(Map, ThresholdLeavesIsolatedNodesWarned) {
  auto c = config_in("map_isolated");
  c.threshold = 0.99;
  const auto r = cmd_map(c, synthetic::demo_matrix());
  EXPECT_FALSE(r.warnings.empty());
}

TEST(LogEffectTable, PrintedValues) {
  const auto r = cmd_table5();
  EXPECT_NE(r.text.find("-0.155"), std::string::npos);
  EXPECT_NE(r.text.find("+0.198"), std::string::npos);
  EXPECT_NE(r.text.find("+0.800"), std::string::npos);
  EXPECT_NE(r.text.find("+0.967"), std::string::npos);
}

TEST(Demo, WritesLoadableMatrixAndLabels) {
  auto c = config_in("demo");
  cmd_demo(c);
  c.input = c.out_dir / "demo.csv";
  c.labels = c.out_dir / "demo_labels.csv";
  const auto m = load_input(c);
  EXPECT_EQ(m, synthetic::demo_matrix());
  EXPECT_EQ(m.label(*m.index_of("J Am Chem Soc")).name, synthetic::demo_matrix().label(*m.index_of("J Am Chem Soc")).name);
}

TEST(Cli, MissingInputExitsNonZero) {
  const std::string cmd = std::string(CITEMAP_CLI) + " stats --input /nonexistent/x.csv -o " +
                          fresh_dir("cli").string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  EXPECT_NE(status, 0);
}

TEST(Cli, PipelineOnDemo) {
  const auto dir = fresh_dir("cli_pipeline");
  const std::string cmd = std::string(CITEMAP_CLI) + " pipeline -o " + dir.string() + " > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  for (const char* f : {"stats.csv", "classify.json", "powerlaw.csv", "map_log.svg", "demo.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
}

TEST(Stats, DemoHasOneRowPerJournalAndLogShrinksVmr) {
  auto c = config_in("stats_demo");
  const auto m = synthetic::demo_matrix();
  const auto r = cmd_stats(c, m);
  ASSERT_EQ(r.summary.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(r.summary[i]["journal"], m.label(i).id);
    EXPECT_GT(r.summary[i]["raw"]["summary"]["vmr"].get<double>(), r.summary[i]["log"]["summary"]["vmr"].get<double>());
  }
  std::istringstream csv(slurp(c.out_dir / "stats.csv"));
  std::size_t lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  EXPECT_EQ(lines, 1 + 2 * m.size());
}

TEST(Classify, ClusteredMatrixRawSixLogFewer) {
  auto c = config_in("clustered");
  const auto r = cmd_classify(c, synthetic::clustered_matrix({}, 1));
  EXPECT_EQ(r.summary["variants"][0]["kaiser_count"], 6);
  EXPECT_LT(r.summary["variants"][1]["kaiser_count"].get<std::size_t>(), 6u);
}

TEST(Classify, ForcedSixOnDemoGivesSixColumns) {
  auto c = config_in("forced6");
  c.fixed_factors = 6;
  const auto r = cmd_classify(c, synthetic::demo_matrix());
  const auto& log = r.summary["variants"][1];
  EXPECT_EQ(log["factors"], 6);
  EXPECT_LT(log["kaiser_count"].get<std::size_t>(), 6u);
  const auto table = slurp(c.out_dir / "loadings_log.txt");
  EXPECT_NE(table.find("forced to 6"), std::string::npos);
  EXPECT_NE(table.find("journal\tclass\t1\t2\t3\t4\t5\t6\n"), std::string::npos);
}

TEST(Powerlaw, ExactMatrixSlopesAndHook) {
  auto c = config_in("powerlaw_exact");
  const auto exact = synthetic::powerlaw_matrix(40, 5);
  const auto r = cmd_powerlaw(c, exact.matrix);
  ASSERT_EQ(r.summary.size(), 40u);
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_NEAR(r.summary[i]["slope"].get<double>(), exact.exponents[i], 1e-9);
    EXPECT_EQ(r.summary[i]["head_size"], 0);
  }
  auto h = config_in("powerlaw_hook");
  h.exclude_head = 3;
  const auto hooked = cmd_powerlaw(h, synthetic::powerlaw_matrix(40, 5, 3, 3.0).matrix);
  for (const auto& row : hooked.summary) EXPECT_GT(row["head_size"].get<std::size_t>(), 0u);
}

TEST(Map, CorrelatedTripleIsTriangle) {
  auto c = config_in("map_triangle");
  c.transform = Transform::none;
  const auto m = CitationMatrix::from_ids({"a", "b", "c"}, Matrix{{10, 20, 30}, {11, 19, 33}, {9, 22, 29}});
  EXPECT_EQ(cmd_map(c, m).summary["maps"][0]["edges"], 3);
  c.threshold = 1.1;
  const auto r = cmd_map(c, m);
  EXPECT_EQ(r.summary["maps"][0]["edges"], 0);
  EXPECT_EQ(r.warnings.size(), 3u);
}
