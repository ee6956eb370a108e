#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "kgprobe/cli/cli.hpp"
#include "kgprobe/kg/graph.hpp"
#include "kgprobe/knowledge/distribution.hpp"
#include "support/tempdir.hpp"

namespace fs = std::filesystem;
using namespace kgprobe;
using namespace kgprobe::cli;

namespace {

const fs::path kData = KGPROBE_TEST_DATA;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<std::string> fixture_args(const support::TempDir& dir, std::vector<std::string> extra) {
  std::vector<std::string> a{"--out", dir.path().string(), "--triplets", (kData / "fixture_triplets.tsv").string(),
                             "--templates", (kData / "templates.json").string(), "--mock"};
  a.insert(a.end(), extra.begin(), extra.end());
  return a;
}

std::vector<std::string> with(std::string cmd, std::vector<std::string> args) {
  args.insert(args.begin(), std::move(cmd));
  return args;
}

std::map<std::string, std::string> read_dir(const fs::path& dir, const std::string& skip = "") {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != skip) files[e.path().filename().string()] = slurp(e.path());
  return files;
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_EQ(run({}).code, kExitInput);
  EXPECT_EQ(run({"frobnicate"}).code, kExitInput);
  EXPECT_EQ(run({"ingest", "--no-such-flag"}).code, kExitInput);
  EXPECT_EQ(run({"ingest", "--config", "/nonexistent/config.json"}).code, kExitInput);
}

TEST(Cli, CommentOnlyFileHasNoTriplets) {
  support::TempDir dir("cli_empty");
  write(dir / "empty.tsv", "# nothing here\n\n# still nothing\n");
  auto r = run({"ingest", "--out", dir.path().string(), "--triplets", (dir / "empty.tsv").string()});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("no triplets"), std::string::npos) << r.err;
}

TEST(Cli, MissingTripletFileIsInputError) {
  support::TempDir dir("cli_missing");
  EXPECT_EQ(run({"ingest", "--out", dir.path().string(), "--triplets", (dir / "nope.tsv").string()}).code, kExitInput);
}

TEST(Cli, IngestTwoComponentToy) {
  support::TempDir dir("cli_toy");
  // Strongly connected triangle a,b,c plus the 2-cycle d,e reached from c.
  // Undirected: neighbour degrees 2,2,3,2,1 and clustering 1,1,1/3,0,0.
  write(dir / "toy.tsv", "a\tr\tb\nb\tr\tc\nc\tr\ta\nc\ts\td\nd\tr\te\ne\tr\td\n");
  auto args = std::vector<std::string>{"ingest", "--out", dir.path().string(), "--triplets", (dir / "toy.tsv").string()};
  ASSERT_EQ(run(args).code, kExitOk);
  const auto stats = slurp(dir / "component_stats.csv");
  EXPECT_EQ(stats,
            "scope,nodes,triplets,relations,avg_degree_triplet,avg_degree_neighbor,avg_clustering\n"
            "input,5,6,2,2.4,2,0.4666666666666667\n"
            "component,3,3,1,2,2,1\n");
  EXPECT_EQ(slurp(dir / "component.tsv").find("d\t"), std::string::npos);
  const auto snapshot = read_dir(dir.path());
  ASSERT_EQ(run(args).code, kExitOk);
  EXPECT_EQ(read_dir(dir.path()), snapshot);

  auto weak = args;
  weak.insert(weak.end(), {"--component", "weak"});
  ASSERT_EQ(run(weak).code, kExitOk);
  EXPECT_NE(slurp(dir / "component_stats.csv").find("component,5,6,2"), std::string::npos);
}

TEST(Cli, MissingTemplateNamesRelation) {
  support::TempDir dir("cli_tmpl");
  write(dir / "t.tsv", "a\tborn_in\tb\nb\tmystery\ta\n");
  write(dir / "templates.json", R"({"born_in": "{sub} was born in {obj}"})");
  auto base = std::vector<std::string>{"--out", dir.path().string(), "--triplets", (dir / "t.tsv").string(),
                                       "--templates", (dir / "templates.json").string(), "--mock"};
  ASSERT_EQ(run(with("ingest", base)).code, kExitOk);
  auto r = run(with("probe", base));
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("mystery"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "probe_cache.jsonl") && fs::file_size(dir / "probe_cache.jsonl") > 0);
}

TEST(Cli, UnreachableEndpointExitsWithNetworkCodeAndKeepsCache) {
  support::TempDir dir("cli_net");
  auto mock = fixture_args(dir, {});
  ASSERT_EQ(run(with("ingest", mock)).code, kExitOk);
  ASSERT_EQ(run(with("probe", mock)).code, kExitOk);
  const auto cache_before = slurp(dir / "probe_cache.jsonl");
  ASSERT_FALSE(cache_before.empty());

  auto http = fixture_args(dir, {"--no-mock", "--endpoint", "http://127.0.0.1:1/v1/chat/completions",
                                 "--max-attempts", "1", "--max-parallel", "2", "--rps", "10000"});
  auto r = run(with("probe", http));
  EXPECT_EQ(r.code, kExitNetwork) << r.err;
  EXPECT_EQ(slurp(dir / "probe_cache.jsonl").substr(0, cache_before.size()), cache_before);
  EXPECT_TRUE(fs::exists(dir / "probe_failures_plain.jsonl"));
}

TEST(Cli, AllTrueMockGivesUnitKnowledgeAndHomophily) {
  support::TempDir dir("cli_true");
  auto a = fixture_args(dir, {"--mock-rate", "1"});
  ASSERT_EQ(run(with("ingest", a)).code, kExitOk);
  ASSERT_EQ(run(with("probe", a)).code, kExitOk);
  auto t = a;
  t.push_back("--temporal");
  ASSERT_EQ(run(with("probe", t)).code, kExitOk);
  auto r = run(with("analyze", a));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (std::string v : {"plain", "temporal"}) {
    std::ifstream in(dir / ("scores_" + v + ".csv"));
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      auto f = knowledge::split_csv_line(line);
      ASSERT_EQ(f.size(), 6u);
      EXPECT_EQ(f[2], "1") << line;
      EXPECT_EQ(f[5], "1") << line;
      ++rows;
    }
    EXPECT_EQ(rows, 142u);
  }
  ASSERT_TRUE(fs::exists(dir / "delta.csv"));
  auto summary = nlohmann::json::parse(slurp(dir / "analysis_summary.json"));
  EXPECT_EQ(summary.at("plain").at("graph_homophily"), 1.0);
  EXPECT_EQ(summary.at("delta").at("one_mass_temporal"), 1.0);
}

TEST(Cli, AnalyzeWithoutCacheIsInputError) {
  support::TempDir dir("cli_nocache");
  auto a = fixture_args(dir, {});
  ASSERT_EQ(run(with("ingest", a)).code, kExitOk);
  EXPECT_EQ(run(with("analyze", a)).code, kExitInput);
}

TEST(Cli, PredictWithoutCheckpointIsInputError) {
  support::TempDir dir("cli_nockpt");
  auto a = fixture_args(dir, {});
  ASSERT_EQ(run(with("ingest", a)).code, kExitOk);
  auto r = run(with("predict", a));
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("checkpoint"), std::string::npos);
}

TEST(Cli, TrainAndPredict) {
  support::TempDir dir("cli_train");
  auto a = fixture_args(dir, {"--epochs", "30", "--hidden", "8"});
  ASSERT_EQ(run(with("ingest", a)).code, kExitOk);
  ASSERT_EQ(run(with("probe", a)).code, kExitOk);
  ASSERT_EQ(run(with("analyze", a)).code, kExitOk);
  auto t = run(with("train", a));
  ASSERT_EQ(t.code, kExitOk) << t.err;
  auto metrics = nlohmann::json::parse(slurp(dir / "train_metrics.json"));
  EXPECT_GE(metrics.at("one_minus_mae").get<double>(), 0.0);
  ASSERT_EQ(run(with("predict", a)).code, kExitOk);
  const auto preds = slurp(dir / "predictions.csv");
  EXPECT_EQ(preds.substr(0, preds.find('\n')), "entity,predicted");
  EXPECT_EQ(std::count(preds.begin(), preds.end(), '\n'), 143);

  // A checkpoint trained on other entities is refused.
  write(dir / "other.tsv", "x\tborn_in\ty\n");
  auto other = a;
  other.insert(other.end(), {"--triplets", (dir / "other.tsv").string(), "--graph", (dir / "other.tsv").string()});
  EXPECT_EQ(run(with("predict", other)).code, kExitInput);
}

TEST(Cli, ConfigFileThenFlagOverride) {
  support::TempDir dir("cli_config");
  write(dir / "run.json", R"({"version": 1, "seed": 11, "mock": {"enabled": true, "rate": 0.25},
                              "train": {"epochs": 7}, "select": {"budget": 50}})");
  auto r = run({"ingest", "--config", (dir / "run.json").string(), "--print-config", "--epochs", "9"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("seed"), 11);
  EXPECT_EQ(j.at("mock").at("rate"), 0.25);
  EXPECT_EQ(j.at("train").at("epochs"), 9);
  EXPECT_EQ(j.at("select").at("budget"), 50);

  write(dir / "bad.json", R"({"version": 1, "sede": 3})");
  EXPECT_EQ(run({"ingest", "--config", (dir / "bad.json").string()}).code, kExitInput);
  write(dir / "v2.json", R"({"version": 2})");
  EXPECT_EQ(run({"ingest", "--config", (dir / "v2.json").string()}).code, kExitInput);
  write(dir / "junk.json", "{");
  EXPECT_EQ(run({"ingest", "--config", (dir / "junk.json").string()}).code, kExitInput);
}

TEST(Cli, PrintedConfigLoadsBack) {
  support::TempDir dir("cli_print");
  auto r = run({"ingest", "--print-config", "--seed", "5", "--arch", "mlp", "--no-temporal"});
  ASSERT_EQ(r.code, kExitOk);
  write(dir / "again.json", r.out);
  auto r2 = run({"ingest", "--config", (dir / "again.json").string(), "--print-config"});
  ASSERT_EQ(r2.code, kExitOk) << r2.err;
  EXPECT_EQ(r2.out, r.out);
}

TEST(Cli, InvalidOptionValues) {
  EXPECT_EQ(run({"ingest", "--print-config", "--component", "giant"}).code, kExitInput);
  EXPECT_EQ(run({"ingest", "--print-config", "--arch", "transformer"}).code, kExitInput);
  EXPECT_EQ(run({"ingest", "--print-config", "--seed", "minus-one"}).code, kExitInput);
}

TEST(Cli, SelectBudgetEqualToPool) {
  support::TempDir dir("cli_select");
  auto a = fixture_args(dir, {"--epochs", "20", "--hidden", "8"});
  ASSERT_EQ(run(with("ingest", a)).code, kExitOk);
  const std::size_t triplets = 394, eval = triplets / 10;
  auto full = a;
  full.insert(full.end(), {"--budget", std::to_string(triplets - eval)});
  auto r = run(with("select", full));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto gp = nlohmann::json::parse(slurp(dir / "plan_graph.json"));
  auto rp = nlohmann::json::parse(slurp(dir / "plan_random.json"));
  EXPECT_EQ(gp.at("initial_ids"), rp.at("initial_ids"));
  std::set<std::size_t> all;
  for (const auto* p : {&gp}) {
    for (std::size_t id : p->at("initial_ids")) all.insert(id);
    for (std::size_t id : p->at("expansion_ids")) all.insert(id);
    for (std::size_t id : p->at("eval_ids")) all.insert(id);
  }
  EXPECT_EQ(all.size(), triplets);
  const auto ft = slurp(dir / "finetune_graph.jsonl");
  EXPECT_EQ(static_cast<std::size_t>(std::count(ft.begin(), ft.end(), '\n')), triplets - eval);
  const auto ev = slurp(dir / "eval.jsonl");
  EXPECT_GT(static_cast<std::size_t>(std::count(ev.begin(), ev.end(), '\n')), eval);  // negatives included

  auto over = a;
  over.insert(over.end(), {"--budget", std::to_string(triplets)});
  EXPECT_EQ(run(with("select", over)).code, kExitInput);
  EXPECT_EQ(run(with("select", a)).code, kExitInput);  // no budget
}

TEST(Cli, PlotDataAndCompactCache) {
  support::TempDir dir("cli_plot");
  auto a = fixture_args(dir, {});
  ASSERT_EQ(run(with("ingest", a)).code, kExitOk);
  ASSERT_EQ(run(with("probe", a)).code, kExitOk);
  ASSERT_EQ(run(with("probe", a)).code, kExitOk);  // fully cached, appends nothing
  ASSERT_EQ(run(with("analyze", a)).code, kExitOk);
  const auto hist = slurp(dir / "histogram_plain.csv");
  fs::remove(dir / "histogram_plain.csv");
  ASSERT_EQ(run(with("plot-data", a)).code, kExitOk);
  EXPECT_EQ(slurp(dir / "histogram_plain.csv"), hist);
  auto r = run(with("compact-cache", a));
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("compacted"), std::string::npos);
}
