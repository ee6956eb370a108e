#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "kgprobe/error.hpp"
#include "kgprobe/knowledge/distribution.hpp"
#include "kgprobe/knowledge/homophily.hpp"
#include "kgprobe/knowledge/scores.hpp"
#include "kgprobe/prompting/probe.hpp"
#include "kgprobe/prompting/verdict.hpp"
#include "support/graphs.hpp"
#include "support/knowledge_oracles.hpp"

using namespace kgprobe;
using namespace kgprobe::knowledge;
using kgprobe::support::tri;
using prompting::ProbeRecord;

namespace {

ProbeRecord rec(const kg::Triplet& t, int verdict) { return {t, t.head + " " + t.relation + " " + t.tail, verdict, "m", false, "", ""}; }

std::vector<ProbeRecord> records(const kg::TripletSet& ts, const std::vector<int>& verdicts) {
  std::vector<ProbeRecord> out;
  for (std::size_t i = 0; i < ts.size(); ++i) out.push_back(rec(ts[i], verdicts[i]));
  return out;
}

double K(const ScoreTable& s, const kg::KnowledgeGraph& g, const std::string& name) {
  return s.scores[g.require_entity(name)].knowledgeability.value();
}

ScoreTable table(const kg::KnowledgeGraph& g, std::vector<std::optional<double>> values) {
  return score_table_from_values(g, values);
}

}  // namespace

TEST(Knowledgeability, MeanOfIncidentVerdicts) {
  kg::TripletSet ts{tri("A", "r", "B"), tri("A", "r", "C"), tri("D", "r", "E"), tri("E", "r", "F"),
                    tri("G", "r", "E"), tri("H", "r", "I"), tri("I", "r", "J"), tri("K", "r", "I")};
  auto g = kg::build_graph(ts);
  auto s = entity_knowledgeability(records(ts, {1, 0, 1, 1, 1, 1, 0, 0}), {}, g);
  EXPECT_EQ(K(s, g, "A"), 0.5);
  EXPECT_EQ(K(s, g, "E"), 1.0);
  EXPECT_EQ(K(s, g, "I"), 1.0 / 3.0);
  EXPECT_EQ(s.scores[g.require_entity("I")].n_probed, 3u);
}

TEST(Knowledgeability, SelfLoopCountsOnceAndParallelTripletsCountSeparately) {
  kg::TripletSet ts{tri("A", "r", "A"), tri("A", "r", "B"), tri("A", "s", "B")};
  auto g = kg::build_graph(ts);
  auto s = entity_knowledgeability(records(ts, {1, 0, 0}), {}, g);
  EXPECT_EQ(K(s, g, "A"), 1.0 / 3.0);
  EXPECT_EQ(K(s, g, "B"), 0.0);
}

TEST(Knowledgeability, FailuresExcludedAndCounted) {
  kg::TripletSet ts{tri("A", "r", "B"), tri("A", "r", "C"), tri("C", "r", "D")};
  auto g = kg::build_graph(ts);
  std::vector<prompting::ProbeFailure> failures{{ts[1], "", prompting::FailureKind::network, "x", 3},
                                                {ts[2], "", prompting::FailureKind::unparseable, "y", 3}};
  auto s = entity_knowledgeability(records({ts[0]}, {1}), failures, g);
  const auto& a = s.scores[g.require_entity("A")];
  EXPECT_EQ(*a.knowledgeability, 1.0);
  EXPECT_EQ(a.n_probed, 1u);
  EXPECT_EQ(a.n_failed, 1u);
  const auto& c = s.scores[g.require_entity("C")];
  EXPECT_FALSE(c.knowledgeability);  // absent, never 0
  EXPECT_EQ(c.n_failed, 2u);
  EXPECT_EQ(s.scored_count(), 2u);
}

TEST(Knowledgeability, UnknownTripletIsError) {
  auto g = kg::build_graph({tri("A", "r", "B")});
  EXPECT_THROW(entity_knowledgeability(records({tri("A", "r", "C")}, {1}), {}, g), InputError);
  std::vector<prompting::ProbeFailure> f{{tri("Z", "r", "B"), "", prompting::FailureKind::network, "", 1}};
  EXPECT_THROW(entity_knowledgeability({}, f, g), InputError);
}

TEST(Knowledgeability, TimestampDistinguishesTriplets) {
  kg::TripletSet ts{{"A", "r", "B", kg::parse_date("2000-01-01")}, {"A", "r", "B", kg::parse_date("2001-01-01")}};
  auto g = kg::build_graph(ts);
  auto s = entity_knowledgeability(records(ts, {1, 0}), {}, g);
  EXPECT_EQ(K(s, g, "A"), 0.5);
}

TEST(Knowledgeability, MatchesBruteForceAndIntegralityInvariant) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    std::mt19937_64 rng(seed);
    auto ts = support::random_triplets(rng, 10 + seed * 10, 200 + seed * 20);
    auto g = kg::build_graph(ts);
    // Identical facts share one statement and therefore one verdict.
    std::map<std::string, int> verdict_of;
    std::vector<int> v;
    for (const auto& t : ts) {
      auto [it, fresh] = verdict_of.emplace(t.head + '\t' + t.relation + '\t' + t.tail, 0);
      if (fresh) it->second = static_cast<int>(rng() & 1);
      v.push_back(it->second);
    }
    auto recs = records(ts, v);
    auto s = entity_knowledgeability(recs, {}, g);
    auto oracle = support::knowledgeability_oracle(ts, recs, g.entities());
    ASSERT_EQ(s.values(), oracle);
    for (const auto& e : s.scores) {
      const double scaled = *e.knowledgeability * static_cast<double>(e.n_probed);
      EXPECT_NEAR(scaled, std::round(scaled), 1e-9);
    }
  }
}

TEST(Knowledgeability, FlippingAVerdictUpNeverLowersEndpoints) {
  std::mt19937_64 rng(3);
  auto ts = support::random_triplets(rng, 40, 100);
  auto g = kg::build_graph(ts);
  std::vector<int> v(ts.size());
  for (auto& x : v) x = static_cast<int>(rng() & 1);
  auto base = entity_knowledgeability(records(ts, v), {}, g);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (v[i]) continue;
    auto w = v;
    w[i] = 1;
    auto up = entity_knowledgeability(records(ts, w), {}, g);
    for (const auto& name : {ts[i].head, ts[i].tail})
      EXPECT_GE(K(up, g, name), K(base, g, name));
  }
}

TEST(Homophily, Examples) {
  auto g = kg::build_graph({tri("v", "r", "a"), tri("v", "r", "b"), tri("x", "r", "y")});
  auto s = table(g, {0.8, 0.8, 0.6, 1.0, 0.0});  // v a b x y
  EXPECT_NEAR(*node_homophily(g.require_entity("v"), s, g), 0.9, 1e-15);
  EXPECT_EQ(*node_homophily(g.require_entity("x"), s, g), 0.0);
  auto constant = table(g, {0.3, 0.3, 0.3, 0.3, 0.3});
  EXPECT_EQ(*node_homophily(0, constant, g), 1.0);
  EXPECT_EQ(graph_homophily(constant, g), 1.0);
}

TEST(Homophily, UndefinedCases) {
  auto g = kg::build_graph({tri("a", "r", "b"), tri("b", "r", "c"), tri("d", "r", "d")});
  auto s = table(g, {0.5, std::nullopt, 1.0, 0.2});
  EXPECT_FALSE(node_homophily(0, s, g));  // only neighbour unscored
  EXPECT_FALSE(node_homophily(1, s, g));  // unscored itself
  EXPECT_FALSE(node_homophily(3, s, g));  // self-loop only
  auto h = homophily_table(s, g);
  EXPECT_EQ(h.defined, 0u);
  EXPECT_FALSE(h.graph_mean);
  EXPECT_THROW(graph_homophily(s, g), InputError);
}

TEST(Homophily, UnscoredNeighboursShrinkTheDenominator) {
  auto g = kg::build_graph({tri("v", "r", "a"), tri("v", "r", "b")});
  auto s = table(g, {1.0, 0.5, std::nullopt});
  EXPECT_EQ(*node_homophily(0, s, g), 0.5);
}

TEST(Homophily, BipartiteOppositeSidesIsZero) {
  kg::TripletSet ts;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) ts.push_back(tri("L" + std::to_string(i), "r", "R" + std::to_string(j)));
  auto g = kg::build_graph(ts);
  std::vector<std::optional<double>> v;
  for (const auto& n : g.entities()) v.push_back(n[0] == 'L' ? 1.0 : 0.0);
  EXPECT_EQ(graph_homophily(table(g, v), g), 0.0);
}

TEST(Homophily, MatchesOracleAndGraphMean) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(100 + seed);
    auto ts = support::random_triplets(rng, 30, 60);
    auto g = kg::build_graph(ts);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::optional<double>> v;
    for (std::size_t i = 0; i < g.num_entities(); ++i)
      v.push_back(u(rng) < 0.2 ? std::nullopt : std::optional<double>(u(rng)));
    auto s = table(g, v);
    auto h = homophily_table(s, g);
    EXPECT_EQ(h.values, support::homophily_oracle(ts, g.entities(), v));
    double sum = 0;
    std::size_t n = 0;
    for (const auto& x : h.values) {
      if (!x) continue;
      EXPECT_GE(*x, 0.0);
      EXPECT_LE(*x, 1.0);
      sum += *x, ++n;
    }
    EXPECT_EQ(h.defined, n);
    EXPECT_EQ(*h.graph_mean, sum / static_cast<double>(n));
  }
}

TEST(Homophily, InvariantUnderRelabelling) {
  std::mt19937_64 rng(8);
  auto ts = support::random_triplets(rng, 25, 40);
  auto g1 = kg::build_graph(ts);
  std::reverse(ts.begin(), ts.end());
  auto g2 = kg::build_graph(ts);
  std::vector<std::optional<double>> v1, v2(g2.num_entities());
  for (kg::EntityId v = 0; v < g1.num_entities(); ++v) {
    v1.push_back((v * 37 % 11) / 10.0);
    v2[g2.require_entity(g1.entity_name(v))] = v1.back();
  }
  auto h1 = homophily_table(table(g1, v1), g1);
  auto h2 = homophily_table(table(g2, v2), g2);
  for (kg::EntityId v = 0; v < g1.num_entities(); ++v)
    EXPECT_NEAR(*h1.values[v], *h2.values[g2.require_entity(g1.entity_name(v))], 1e-15);
}

TEST(Histogram, Examples) {
  auto h = value_histogram(std::vector<std::optional<double>>{0.0, 0.0, 1.0, 1.0}, 2);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 2}));
  auto one = value_histogram(std::vector<std::optional<double>>{0.5}, 10);
  EXPECT_EQ(one.counts[5], 1u);
  EXPECT_EQ(one.total(), 1u);
  EXPECT_THROW(value_histogram(std::vector<std::optional<double>>{0.5}, 1), InputError);
}

TEST(Histogram, DefaultBinsCentreThePeaks) {
  EXPECT_EQ(kDefaultHistogramBins, 21u);
  Histogram h{std::vector<std::size_t>(21)};
  EXPECT_DOUBLE_EQ(h.center(histogram_bin(0.0, 21)), 1.0 / 42.0);
  EXPECT_EQ(histogram_bin(0.5, 21), 10u);
  EXPECT_DOUBLE_EQ(h.center(10), 0.5);
  EXPECT_EQ(histogram_bin(1.0, 21), 20u);
}

TEST(Histogram, CountsConserved) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::optional<double>> v;
  for (int i = 0; i < 1000; ++i) v.push_back(i % 7 == 0 ? std::nullopt : std::optional<double>(u(rng)));
  v.push_back(1.0);
  v.push_back(0.0);
  std::size_t scored = 0;
  for (const auto& x : v) scored += x.has_value();
  for (std::size_t nb = 2; nb < 40; ++nb) EXPECT_EQ(value_histogram(v, nb).total(), scored);
}

TEST(Histogram, InteriorPointsAndMonotonicity) {
  for (std::size_t nb = 2; nb < 30; ++nb) {
    Histogram h{std::vector<std::size_t>(nb)};
    for (std::size_t b = 0; b < nb; ++b) EXPECT_EQ(histogram_bin(h.center(b), nb), b) << nb << " " << b;
    std::size_t prev = 0;
    for (int i = 0; i <= 1000; ++i) {
      const auto b = histogram_bin(i / 1000.0, nb);
      EXPECT_GE(b, prev);
      EXPECT_LT(b, nb);
      prev = b;
    }
    EXPECT_EQ(histogram_bin(1.0, nb), nb - 1);
  }
}

TEST(CompareVariants, Examples) {
  // A has two triplets; the temporal probe flips one of them.
  kg::TripletSet ts{tri("A", "r", "B"), tri("A", "r", "C")};
  auto g = kg::build_graph(ts);
  auto plain = entity_knowledgeability(records(ts, {1, 1}), {}, g, Variant::plain);
  auto temporal = entity_knowledgeability(records(ts, {1, 0}), {}, g, Variant::temporal);
  auto d = compare_variants(plain, temporal);
  EXPECT_EQ(d.entities, (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_EQ(d.delta, (std::vector<double>{-0.5, 0.0, -1.0}));
  auto same = compare_variants(plain, plain);
  for (double x : same.delta) EXPECT_EQ(x, 0.0);
}

TEST(CompareVariants, ZeroMassShift) {
  auto g = kg::build_graph({tri("a", "r", "b")});
  auto d = compare_variants(table(g, {0.0, 1.0}), table(g, {0.0, 0.0}));
  EXPECT_EQ(d.zero_mass_plain, 0.5);
  EXPECT_EQ(d.zero_mass_temporal, 1.0);
  EXPECT_EQ(d.one_mass_plain, 0.5);
  EXPECT_EQ(d.one_mass_temporal, 0.0);
}

TEST(CompareVariants, MismatchListsSymmetricDifference) {
  auto g = kg::build_graph({tri("a", "r", "b"), tri("c", "r", "d")});
  try {
    compare_variants(table(g, {0.0, 1.0, std::nullopt, 0.5}), table(g, {0.0, std::nullopt, 1.0, 0.5}));
    FAIL();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('b'), std::string::npos);
    EXPECT_NE(msg.find('c'), std::string::npos);
  }
}

TEST(ScoreCsv, WriteReadRoundTrip) {
  auto g = kg::build_graph({tri("a,1", "r", "b \"q\""), tri("b \"q\"", "r", "c")});
  auto s = table(g, {1.0 / 3.0, std::nullopt, 0.1});
  auto h = homophily_table(s, g);
  std::stringstream buf;
  write_scores_csv(buf, s, h);
  EXPECT_EQ(buf.str().substr(0, buf.str().find('\n')), "entity,variant,K,n_probed,n_failed,H");
  auto back = read_scores_csv(buf, g);
  EXPECT_EQ(back.values(), s.values());
}

TEST(ScoreCsv, Errors) {
  auto g = kg::build_graph({tri("a", "r", "b")});
  std::istringstream bad_header("name,K\n");
  EXPECT_THROW(read_scores_csv(bad_header, g), InputError);
  std::istringstream unknown("entity,variant,K\nzzz,plain,0.5\n");
  EXPECT_THROW(read_scores_csv(unknown, g), ParseError);
  std::istringstream out_of_range("entity,variant,K\na,plain,1.5\n");
  EXPECT_THROW(read_scores_csv(out_of_range, g), ParseError);
}

TEST(Csv, FieldsAndDoubles) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(split_csv_line("\"a,b\",c,\"d\"\"e\""), (std::vector<std::string>{"a,b", "c", "d\"e"}));
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 0.0, 123456.789}) EXPECT_EQ(std::stod(format_double(x)), x);
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(BinCurveCsv, EmptyBinsHaveBlankMean) {
  auto g = kg::build_graph({tri("a", "r", "b"), tri("b", "r", "c")});
  auto s = table(g, {0.0, 1.0, 0.0});
  std::vector<double> deg{1, 2, 1};
  std::ostringstream out;
  write_bin_curve_csv(out, "degree", bin_by_property(deg, s, 3, kg::BinScale::linear));
  EXPECT_NE(out.str().find("degree,1,"), std::string::npos);
  EXPECT_NE(out.str().find(",,0,0\n"), std::string::npos);
}
