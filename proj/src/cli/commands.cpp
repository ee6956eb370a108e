#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "kgprobe/cli/cli.hpp"
#include "kgprobe/error.hpp"
#include "kgprobe/gnn/checkpoint.hpp"
#include "kgprobe/gnn/features.hpp"
#include "kgprobe/kg/binning.hpp"
#include "kgprobe/kg/centrality.hpp"
#include "kgprobe/kg/components.hpp"
#include "kgprobe/kg/structure.hpp"
#include "kgprobe/knowledge/distribution.hpp"
#include "kgprobe/knowledge/homophily.hpp"
#include "kgprobe/knowledge/scores.hpp"
#include "kgprobe/prompting/probe.hpp"
#include "kgprobe/selection/random.hpp"

namespace kgprobe::cli {
namespace {

namespace fs = std::filesystem;
using knowledge::format_double;
using nlohmann::json;

constexpr std::size_t kCurveBins = 10;

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ostringstream buf;
  body(buf);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << buf.str();
  f.flush();
  if (!f) throw InputError("cannot write " + path.string());
}

void require_file(const fs::path& path, std::string_view what) {
  if (path.empty()) throw InputError(std::string(what) + " path is not set");
  if (!fs::exists(path)) throw InputError(std::string(what) + " not found: " + path.string());
}

kg::KnowledgeGraph load_graph(const RunConfig& c) {
  const auto path = c.graph_path();
  if (!fs::exists(path)) throw InputError("graph not found: " + path.string() + " (run ingest first or set --graph)");
  auto triplets = kg::read_triplet_file(path);
  if (triplets.empty()) throw InputError("no triplets in " + path.string());
  return kg::build_graph(std::move(triplets));
}

prompting::TemplateMap load_templates(const RunConfig& c) {
  require_file(c.paths.templates, "templates");
  return prompting::TemplateMap::load(c.paths.templates);
}

std::string model_tag(const RunConfig& c) {
  return c.mock.enabled ? prompting::MockChatClient(c.seed, c.mock.rate).model_tag() : c.llm.model;
}

std::unique_ptr<prompting::ChatClient> make_client(const RunConfig& c) {
  if (c.mock.enabled) {
    if (!(c.mock.rate >= 0.0 && c.mock.rate <= 1.0)) throw InputError("mock rate must lie in [0, 1]");
    return std::make_unique<prompting::MockChatClient>(c.seed, c.mock.rate);
  }
  return std::make_unique<prompting::HttpChatClient>(c.llm);
}

prompting::ProbeOptions probe_options(const RunConfig& c, bool temporal) {
  c.llm.validate();
  prompting::ProbeOptions o;
  o.temporal = temporal;
  o.max_parallel = c.llm.max_parallel;
  // The mock answers instantly and locally; throttling it only slows tests.
  o.requests_per_second = c.mock.enabled ? 1e9 : c.llm.requests_per_second;
  o.retry = c.llm.retry;
  o.system_message = c.llm.system_message;
  o.temporal_system_message = c.llm.temporal_system_message;
  return o;
}

std::string_view variant_name(bool temporal) { return temporal ? "temporal" : "plain"; }

fs::path failures_path(const RunConfig& c, bool temporal) {
  return c.paths.out_dir / ("probe_failures_" + std::string(variant_name(temporal)) + ".jsonl");
}

json triplet_json(const kg::Triplet& t) {
  json j = {{"head", t.head}, {"relation", t.relation}, {"tail", t.tail}};
  if (t.timestamp) j["timestamp"] = kg::format_date(*t.timestamp);
  return j;
}

kg::Triplet triplet_from(const json& j) {
  kg::Triplet t{j.at("head").get<std::string>(), j.at("relation").get<std::string>(),
                j.at("tail").get<std::string>(), std::nullopt};
  if (j.contains("timestamp")) {
    t.timestamp = kg::parse_date(j.at("timestamp").get<std::string>());
    if (!t.timestamp) throw InputError("bad timestamp in failure report");
  }
  return t;
}

void write_failures(const fs::path& path, std::span<const prompting::ProbeFailure> failures) {
  write_file(path, [&](std::ostream& o) {
    for (const auto& f : failures) {
      json j = triplet_json(f.triplet);
      j["statement"] = f.statement;
      j["kind"] = f.kind == prompting::FailureKind::network ? "network" : "unparseable";
      j["message"] = f.message;
      j["attempts"] = f.attempts;
      o << j.dump() << '\n';
    }
  });
}

std::vector<prompting::ProbeFailure> read_failures(const fs::path& path) {
  std::vector<prompting::ProbeFailure> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      prompting::ProbeFailure f;
      f.triplet = triplet_from(j);
      f.statement = j.value("statement", "");
      f.kind = j.value("kind", "network") == "unparseable" ? prompting::FailureKind::unparseable
                                                            : prompting::FailureKind::network;
      f.message = j.value("message", "");
      f.attempts = j.value("attempts", 0);
      out.push_back(std::move(f));
    } catch (const json::exception& e) {
      throw ParseError(lineno, std::string(e.what()) + " in " + path.string());
    }
  }
  return out;
}

std::size_t count_network(std::span<const prompting::ProbeFailure> failures) {
  return static_cast<std::size_t>(std::count_if(failures.begin(), failures.end(), [](const auto& f) {
    return f.kind == prompting::FailureKind::network;
  }));
}

gnn::FeatureSource load_features(const RunConfig& c, const kg::KnowledgeGraph& g) {
  if (c.features == gnn::FeatureMode::one_hot) return gnn::FeatureSource::one_hot(g.num_entities());
  require_file(c.paths.embeddings, "embeddings");
  return gnn::load_embeddings(c.paths.embeddings, g);
}

gnn::TrainConfig train_config(const RunConfig& c) {
  auto t = c.train;
  t.seed = c.seed;
  return t;
}

void write_summary_row(std::ostream& o, std::string_view scope, const kg::GraphSummary& s) {
  o << scope << ',' << s.nodes << ',' << s.triplets << ',' << s.relations << ',' << format_double(s.avg_degree_triplet)
    << ',' << format_double(s.avg_degree_neighbor) << ',' << format_double(s.avg_clustering) << '\n';
}

void write_predictions(const fs::path& path, const kg::KnowledgeGraph& g, std::span<const double> preds) {
  write_file(path, [&](std::ostream& o) {
    o << "entity,predicted\n";
    for (kg::EntityId v = 0; v < g.num_entities(); ++v)
      o << knowledge::csv_field(g.entity_name(v)) << ',' << format_double(preds[v]) << '\n';
  });
}

struct Property {
  std::string name;
  std::vector<double> values;
  kg::BinScale scale;
};

std::vector<Property> structural_properties(const kg::KnowledgeGraph& g, const kg::CentralityParams& params) {
  std::vector<double> dt(g.num_entities()), dn(g.num_entities());
  for (kg::EntityId v = 0; v < g.num_entities(); ++v) {
    dt[v] = static_cast<double>(kg::degree(g, v, kg::DegreeKind::triplet));
    dn[v] = static_cast<double>(kg::degree(g, v, kg::DegreeKind::neighbor));
  }
  std::vector<Property> props;
  props.push_back({"degree_triplet", std::move(dt), kg::BinScale::log});
  props.push_back({"degree_neighbor", std::move(dn), kg::BinScale::log});
  props.push_back({"pagerank", kg::centrality(g, kg::CentralityKind::pagerank, params).values, kg::BinScale::log});
  props.push_back({"katz", kg::centrality(g, kg::CentralityKind::katz, params).values, kg::BinScale::log});
  props.push_back({"clustering", kg::centrality(g, kg::CentralityKind::clustering).values, kg::BinScale::linear});
  props.push_back({"closeness", kg::centrality(g, kg::CentralityKind::closeness).values, kg::BinScale::linear});
  props.push_back({"betweenness", kg::centrality(g, kg::CentralityKind::betweenness).values, kg::BinScale::linear});
  return props;
}

// histogram_<v>.csv and bins_<v>.csv; returns the knowledgeability histogram.
knowledge::Histogram write_plot_files(const fs::path& dir, const std::string& v, const knowledge::ScoreTable& scores,
                                      const knowledge::HomophilyTable& homophily, std::span<const Property> props) {
  const auto k_hist = knowledge::score_histogram(scores);
  const auto h_hist = knowledge::value_histogram(homophily.values);
  write_file(dir / ("histogram_" + v + ".csv"), [&](std::ostream& o) {
    knowledge::write_histogram_csv(o, "knowledgeability", k_hist);
    knowledge::write_histogram_csv(o, "homophily", h_hist, false);
  });
  write_file(dir / ("bins_" + v + ".csv"), [&](std::ostream& o) {
    bool header = true;
    for (const auto& p : props) {
      knowledge::write_bin_curve_csv(o, p.name, knowledge::bin_by_property(p.values, scores, kCurveBins, p.scale),
                                     header);
      header = false;
    }
  });
  return k_hist;
}

}  // namespace

int cmd_ingest(const RunConfig& c, std::ostream& out) {
  require_file(c.paths.triplets, "triplets");
  auto triplets = kg::read_triplet_file(c.paths.triplets, kg::ColumnSchema::parse(c.columns));
  if (triplets.empty()) throw InputError("no triplets in " + c.paths.triplets.string());
  const auto full = kg::build_graph(std::move(triplets));
  const auto comp = c.component == ComponentMode::none
                        ? full
                        : kg::largest_connected_component(full, c.component == ComponentMode::weak
                                                                    ? kg::Connectivity::weak
                                                                    : kg::Connectivity::strong);
  const auto& dir = c.paths.out_dir;
  write_file(dir / "component.tsv", [&](std::ostream& o) { kg::write_triplets(o, comp.triplets()); });

  const auto full_stats = kg::summarize(full);
  const auto comp_stats = kg::summarize(comp);
  write_file(dir / "component_stats.csv", [&](std::ostream& o) {
    o << "scope,nodes,triplets,relations,avg_degree_triplet,avg_degree_neighbor,avg_clustering\n";
    write_summary_row(o, "input", full_stats);
    write_summary_row(o, "component", comp_stats);
  });

  std::vector<kg::CentralityMap> maps;
  for (auto kind : {kg::CentralityKind::clustering, kg::CentralityKind::pagerank, kg::CentralityKind::katz,
                    kg::CentralityKind::closeness, kg::CentralityKind::betweenness})
    maps.push_back(kg::centrality(comp, kind, c.centrality));
  write_file(dir / "entity_stats.csv", [&](std::ostream& o) {
    o << "entity,deg_triplet,deg_neighbor,clustering,pagerank,katz,closeness,betweenness\n";
    for (kg::EntityId v = 0; v < comp.num_entities(); ++v) {
      o << knowledge::csv_field(comp.entity_name(v)) << ',' << kg::degree(comp, v, kg::DegreeKind::triplet) << ','
        << kg::degree(comp, v, kg::DegreeKind::neighbor);
      for (const auto& m : maps) o << ',' << format_double(m.values[v]);
      o << '\n';
    }
  });

  out << "input: " << full_stats.nodes << " entities, " << full_stats.triplets << " triplets, "
      << full_stats.relations << " relations\n"
      << "component (" << to_string(c.component) << "): " << comp_stats.nodes << " entities, "
      << comp_stats.triplets << " triplets, avg degree " << format_double(comp_stats.avg_degree_triplet)
      << ", avg clustering " << format_double(comp_stats.avg_clustering) << '\n';
  return kExitOk;
}

int cmd_probe(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(c);
  const auto templates = load_templates(c);
  const auto options = probe_options(c, c.temporal);
  auto client = make_client(c);
  prompting::ProbeCache cache(c.cache_path());
  const auto outcome = prompting::probe_batch(g.triplets(), templates, *client, cache, options);
  write_failures(failures_path(c, c.temporal), outcome.failures);

  const auto network = count_network(outcome.failures);
  out << "probed " << g.num_triplets() << " triplets (" << variant_name(c.temporal) << "): " << outcome.fresh
      << " new, " << outcome.cache_hits << " cached, " << outcome.failures.size() << " failed, "
      << outcome.requests << " requests\n";
  if (network > 0) {
    err << "error: " << network << " probes failed after retries; completed verdicts are kept in "
        << c.cache_path().string() << "\n";
    return kExitNetwork;
  }
  if (!outcome.failures.empty())
    err << "warning: " << outcome.failures.size() << " unparseable responses excluded from scoring\n";
  return kExitOk;
}

int cmd_analyze(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(c);
  const auto templates = load_templates(c);
  const auto cache_path = c.cache_path();
  if (!fs::exists(cache_path)) throw InputError("no probe records: " + cache_path.string() + " does not exist");
  const prompting::ProbeCache cache(cache_path);
  const auto tag = model_tag(c);
  const auto& dir = c.paths.out_dir;

  const auto props = structural_properties(g, c.centrality);

  std::optional<knowledge::ScoreTable> tables[2];
  json summary = json::object();
  for (bool temporal : {false, true}) {
    const auto records = prompting::lookup_cached(g.triplets(), templates, cache, tag, temporal);
    if (records.empty()) continue;
    const auto failures = read_failures(failures_path(c, temporal));
    auto scores = knowledge::entity_knowledgeability(records, failures, g,
                                                     temporal ? knowledge::Variant::temporal : knowledge::Variant::plain);
    const auto homophily = knowledge::homophily_table(scores, g);
    const std::string v(variant_name(temporal));

    write_file(dir / ("scores_" + v + ".csv"), [&](std::ostream& o) { knowledge::write_scores_csv(o, scores, homophily); });
    const auto k_hist = write_plot_files(dir, v, scores, homophily, props);

    json s = {{"records", records.size()},
              {"failures", failures.size()},
              {"scored_entities", scores.scored_count()},
              {"homophily_defined", homophily.defined}};
    s["graph_homophily"] = homophily.graph_mean ? json(*homophily.graph_mean) : json(nullptr);
    s["histogram"] = k_hist.counts;
    summary[v] = s;
    out << v << ": " << scores.scored_count() << " scored entities";
    if (homophily.graph_mean) out << ", graph homophily " << format_double(*homophily.graph_mean);
    out << '\n';
    tables[temporal] = std::move(scores);
  }
  if (!tables[0] && !tables[1])
    throw InputError("no probe records for model \"" + tag + "\" in " + cache_path.string());

  if (tables[0] && tables[1]) {
    try {
      const auto delta = knowledge::compare_variants(*tables[0], *tables[1]);
      write_file(dir / "delta.csv", [&](std::ostream& o) { knowledge::write_delta_csv(o, delta); });
      summary["delta"] = {{"entities", delta.entities.size()},
                          {"zero_mass_plain", delta.zero_mass_plain},
                          {"zero_mass_temporal", delta.zero_mass_temporal},
                          {"one_mass_plain", delta.one_mass_plain},
                          {"one_mass_temporal", delta.one_mass_temporal}};
      out << "delta: " << delta.entities.size() << " entities compared\n";
    } catch (const InputError& e) {
      err << "warning: skipping the plain/temporal delta: " << e.what() << '\n';
    }
  }
  write_file(dir / "analysis_summary.json", [&](std::ostream& o) { o << summary.dump(2) << '\n'; });
  return kExitOk;
}

int cmd_train(const RunConfig& c, std::ostream& out) {
  const auto g = load_graph(c);
  const auto scores_path = c.scores_path();
  require_file(scores_path, "scores");
  std::ifstream in(scores_path);
  const auto scores = knowledge::read_scores_csv(in, g);
  const auto feats = load_features(c, g);
  const auto result = gnn::train(g, feats, scores, train_config(c), c.model);
  const auto metrics = gnn::evaluate(result.model, g, feats, scores, result.val_ids);

  const auto& dir = c.paths.out_dir;
  gnn::save_checkpoint(c.checkpoint_path(), {result.model, g.entities()});
  write_file(dir / "history.csv", [&](std::ostream& o) { gnn::write_history_csv(o, result.history); });
  json report = {{"architecture", gnn::to_string(c.model.architecture)},
                 {"aggregation", gnn::to_string(c.model.aggregation)},
                 {"best_epoch", result.best_epoch},
                 {"epochs_run", result.history.size()},
                 {"train_entities", result.train_ids.size()},
                 {"heldout_entities", result.val_ids.size()},
                 {"one_minus_mae", metrics.one_minus_mae},
                 {"mae", metrics.mae},
                 {"mse", metrics.mse}};
  write_file(dir / "train_metrics.json", [&](std::ostream& o) { o << report.dump(2) << '\n'; });
  out << "trained on " << result.train_ids.size() << " entities; held-out 1-MAE "
      << format_double(metrics.one_minus_mae) << " over " << result.val_ids.size() << " entities (best epoch "
      << result.best_epoch << ")\n";
  return kExitOk;
}

int cmd_predict(const RunConfig& c, std::ostream& out) {
  const auto g = load_graph(c);
  const auto path = c.checkpoint_path();
  if (!fs::exists(path)) throw InputError("checkpoint not found: " + path.string() + " (run train first)");
  const auto ckpt = gnn::load_checkpoint(path);
  if (ckpt.entities != g.entities())
    throw InputError("checkpoint " + path.string() + " was trained on a different entity set");
  const auto feats = load_features(c, g);
  if (feats.mode != ckpt.model.feature_mode || feats.dim() != ckpt.model.input_dim)
    throw InputError("feature mode or dimension differs from the checkpoint");
  const auto preds = gnn::forward(ckpt.model, g, feats);
  write_predictions(c.paths.out_dir / "predictions.csv", g, preds);
  out << "predicted knowledgeability for " << preds.size() << " entities\n";
  return kExitOk;
}

int cmd_select(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto g = load_graph(c);
  const auto templates = load_templates(c);
  templates.require_all(g.triplets());
  if (c.select.budget == 0) throw InputError("selection budget is not set (--budget)");
  const auto seed = c.selection_seed();

  selection::PlanOptions opts;
  opts.budget = c.select.budget;
  opts.seed = seed;
  opts.eval_size = c.select.eval_size.value_or(g.num_triplets() / 10);
  opts.allow_eval_overlap = c.select.allow_eval_overlap;
  opts.known_first = c.select.known_first;
  const auto base = selection::prepare_plan(g, opts);

  // Probe the shared initial set and learn knowledgeability for everyone else.
  std::vector<kg::Triplet> initial;
  for (auto id : base.initial_ids) initial.push_back(g.triplet(id));
  auto client = make_client(c);
  prompting::ProbeCache cache(c.cache_path());
  const auto outcome = prompting::probe_batch(initial, templates, *client, cache, probe_options(c, c.temporal));
  if (const auto network = count_network(outcome.failures); network > 0)
    throw NetworkError(std::to_string(network) + " probes of the initial set failed after retries");
  const auto scores = knowledge::entity_knowledgeability(
      outcome.records, outcome.failures, g, c.temporal ? knowledge::Variant::temporal : knowledge::Variant::plain);
  const auto feats = load_features(c, g);
  const auto trained = gnn::train(g, feats, scores, train_config(c), c.model);
  const auto preds = gnn::forward(trained.model, g, feats);
  std::vector<std::optional<double>> predicted(preds.begin(), preds.end());

  const auto graph_plan = selection::finish_graph_plan(g, base, predicted);
  const auto random_plan = selection::finish_random_plan(g, base);

  const auto& dir = c.paths.out_dir;
  write_predictions(dir / "select_predictions.csv", g, preds);
  auto emit = [&](const fs::path& path, const selection::TripletIds& ids, bool corrupt, std::uint64_t emit_seed) {
    selection::EmitOptions eo;
    eo.temporal = c.temporal;
    eo.corrupt = corrupt;
    eo.seed = emit_seed;
    const auto result = selection::emit_finetune_records(g, ids, templates, eo);
    for (const auto& e : result.errors) err << "warning: " << e << '\n';
    write_file(path, [&](std::ostream& o) { selection::write_jsonl(o, result.records); });
    return result.records.size();
  };
  for (const auto* plan : {&graph_plan, &random_plan}) {
    const std::string name(selection::to_string(plan->strategy));
    write_file(dir / ("plan_" + name + ".json"),
               [&](std::ostream& o) { o << selection::plan_to_json(*plan).dump(2) << '\n'; });
    selection::TripletIds ids = plan->initial_ids;
    ids.insert(ids.end(), plan->expansion_ids.begin(), plan->expansion_ids.end());
    std::sort(ids.begin(), ids.end());
    const auto n = emit(dir / ("finetune_" + name + ".jsonl"), ids, c.select.corrupt, seed);
    out << name << ": " << plan->initial_ids.size() << " initial + " << plan->expansion_ids.size()
        << " expansion triplets, " << n << " records\n";
  }
  const auto n_eval = emit(dir / "eval.jsonl", base.eval_ids, c.select.eval_corrupt, selection::derive_seed(seed, 100));
  out << "eval: " << base.eval_ids.size() << " triplets, " << n_eval << " records\n";
  return kExitOk;
}

int cmd_plot_data(const RunConfig& c, std::ostream& out) {
  const auto g = load_graph(c);
  const auto path = c.scores_path();
  require_file(path, "scores");
  std::ifstream in(path);
  const auto scores = knowledge::read_scores_csv(in, g);
  const auto homophily = knowledge::homophily_table(scores, g);
  const std::string v(knowledge::to_string(scores.variant));
  const auto props = structural_properties(g, c.centrality);
  write_plot_files(c.paths.out_dir, v, scores, homophily, props);
  out << "wrote histogram_" << v << ".csv and bins_" << v << ".csv for " << scores.scored_count()
      << " scored entities\n";
  return kExitOk;
}

int cmd_compact_cache(const RunConfig& c, std::ostream& out) {
  const auto path = c.cache_path();
  require_file(path, "probe cache");
  const auto [before, after] = prompting::ProbeCache::compact(path);
  out << "compacted " << path.string() << ": " << before << " -> " << after << " lines\n";
  return kExitOk;
}

}  // namespace kgprobe::cli
