#include "kgprobe/cli/cli.hpp"

#include <functional>
#include <memory>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "kgprobe/error.hpp"

namespace kgprobe::cli {
namespace {

// Flags are collected into holders and applied on top of the config file
// afterwards, so anything given on the command line wins.
class Overrides {
 public:
  explicit Overrides(CLI::App& app) : app_(app) {}

  template <class T, class Fn>
  void option(const std::string& name, const std::string& desc, Fn apply) {
    auto value = std::make_shared<T>();
    auto* opt = app_.add_option(name, *value, desc);
    entries_.push_back([opt, value, apply](RunConfig& c) {
      if (opt->count() > 0) apply(c, *value);
    });
  }

  template <class Fn>
  void flag(const std::string& name, const std::string& desc, Fn apply) {
    auto value = std::make_shared<bool>(false);
    auto* opt = app_.add_flag(name, *value, desc);
    entries_.push_back([opt, value, apply](RunConfig& c) {
      if (opt->count() > 0) apply(c, *value);
    });
  }

  void apply(RunConfig& c) const {
    for (const auto& e : entries_) e(c);
  }

 private:
  CLI::App& app_;
  std::vector<std::function<void(RunConfig&)>> entries_;
};

using Path = std::string;

void add_overrides(Overrides& o) {
  o.option<Path>("--out,-o", "Output directory", [](RunConfig& c, const Path& v) { c.paths.out_dir = v; });
  o.option<Path>("--triplets", "Raw triplet TSV (ingest)", [](RunConfig& c, const Path& v) { c.paths.triplets = v; });
  o.option<Path>("--graph", "Graph TSV (default <out>/component.tsv)",
                 [](RunConfig& c, const Path& v) { c.paths.graph = v; });
  o.option<Path>("--templates", "Relation template JSON", [](RunConfig& c, const Path& v) { c.paths.templates = v; });
  o.option<Path>("--cache", "Probe cache JSONL (default <out>/probe_cache.jsonl)",
                 [](RunConfig& c, const Path& v) { c.paths.cache = v; });
  o.option<Path>("--embeddings", "Entity embedding CSV (external features)",
                 [](RunConfig& c, const Path& v) { c.paths.embeddings = v; });
  o.option<Path>("--scores", "Score CSV used by train", [](RunConfig& c, const Path& v) { c.paths.scores = v; });
  o.option<Path>("--checkpoint", "Checkpoint path (default <out>/checkpoint.json)",
                 [](RunConfig& c, const Path& v) { c.paths.checkpoint = v; });
  o.option<std::string>("--columns", "Column order of the raw TSV, a permutation of hrt",
                        [](RunConfig& c, const std::string& v) { c.columns = v; });
  o.option<std::string>("--component", "none, weak or strong",
                        [](RunConfig& c, const std::string& v) { c.component = parse_component_mode(v); });
  o.flag("--temporal,!--no-temporal", "Use time-stamped statements",
         [](RunConfig& c, bool v) { c.temporal = v; });
  o.option<std::uint64_t>("--seed", "Seed for the mock, training and selection",
                          [](RunConfig& c, std::uint64_t v) { c.seed = v; });
  o.option<double>("--damping", "PageRank damping", [](RunConfig& c, double v) { c.centrality.damping = v; });
  o.option<double>("--katz-alpha", "Katz attenuation", [](RunConfig& c, double v) { c.centrality.katz_alpha = v; });

  o.flag("--mock,!--no-mock", "Answer probes with the offline mock", [](RunConfig& c, bool v) { c.mock.enabled = v; });
  o.option<double>("--mock-rate", "Fraction of mock statements answered True",
                   [](RunConfig& c, double v) { c.mock.rate = v; });
  o.option<std::string>("--endpoint", "Chat-completion URL", [](RunConfig& c, const std::string& v) { c.llm.endpoint = v; });
  o.option<std::string>("--model", "Model name", [](RunConfig& c, const std::string& v) { c.llm.model = v; });
  o.option<std::string>("--api-key-env", "Environment variable holding the API key",
                        [](RunConfig& c, const std::string& v) { c.llm.api_key_env = v; });
  o.option<int>("--max-parallel", "Concurrent requests", [](RunConfig& c, int v) { c.llm.max_parallel = v; });
  o.option<double>("--rps", "Requests per second", [](RunConfig& c, double v) { c.llm.requests_per_second = v; });
  o.option<int>("--max-attempts", "Attempts per statement", [](RunConfig& c, int v) { c.llm.retry.max_attempts = v; });

  o.option<std::string>("--features", "one_hot or external",
                        [](RunConfig& c, const std::string& v) { c.features = gnn::parse_feature_mode(v); });
  o.option<std::string>("--arch", "gnn or mlp",
                        [](RunConfig& c, const std::string& v) { c.model.architecture = gnn::parse_architecture(v); });
  o.option<std::string>("--aggregation", "mean, gcn or sage",
                        [](RunConfig& c, const std::string& v) { c.model.aggregation = gnn::parse_aggregation(v); });
  o.option<std::vector<std::size_t>>("--hidden", "Hidden widths, one per layer",
                                     [](RunConfig& c, const std::vector<std::size_t>& v) { c.model.hidden = v; });
  o.option<std::size_t>("--epochs", "Training epochs", [](RunConfig& c, std::size_t v) { c.train.epochs = v; });
  o.option<double>("--lr", "Learning rate", [](RunConfig& c, double v) { c.train.learning_rate = v; });
  o.option<std::size_t>("--patience", "Early-stopping patience", [](RunConfig& c, std::size_t v) { c.train.patience = v; });
  o.option<double>("--train-fraction", "Share of scored entities used for training",
                   [](RunConfig& c, double v) { c.train.train_fraction = v; });
  o.option<std::string>("--optimizer", "adam or sgd",
                        [](RunConfig& c, const std::string& v) { c.train.optimizer = gnn::parse_optimizer(v); });

  o.option<std::size_t>("--budget", "Fine-tuning budget in triplets",
                        [](RunConfig& c, std::size_t v) { c.select.budget = v; });
  o.option<std::size_t>("--eval-size", "Evaluation triplets (default a tenth)",
                        [](RunConfig& c, std::size_t v) { c.select.eval_size = v; });
  o.flag("--allow-eval-overlap", "Let selected triplets overlap the eval set",
         [](RunConfig& c, bool v) { c.select.allow_eval_overlap = v; });
  o.flag("--known-first", "Rank well-known entities first", [](RunConfig& c, bool v) { c.select.known_first = v; });
  o.flag("--corrupt,!--no-corrupt", "Add corrupted False records to the fine-tune files",
         [](RunConfig& c, bool v) { c.select.corrupt = v; });
  o.flag("--eval-corrupt,!--no-eval-corrupt", "Add corrupted False records to eval.jsonl",
         [](RunConfig& c, bool v) { c.select.eval_corrupt = v; });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probe, analyse and predict LLM knowledge over a knowledge graph"};
  app.require_subcommand(1);
  std::string config_path;
  bool print_config = false;
  app.add_option("--config,-c", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_flag("--print-config", print_config, "Print the effective configuration and exit");
  Overrides overrides(app);
  add_overrides(overrides);

  struct Sub {
    const char* name;
    const char* desc;
  };
  const Sub subs[] = {
      {"ingest", "Parse triplets, extract the largest component and write structural statistics"},
      {"probe", "Probe every triplet of the graph, resuming from the cache"},
      {"analyze", "Entity knowledgeability, homophily, histograms and property bin curves"},
      {"train", "Train the knowledgeability regressor on the scored entities"},
      {"predict", "Predict knowledgeability for every entity from a checkpoint"},
      {"select", "Build Graph-FT and Random-FT fine-tuning sets for a budget"},
      {"plot-data", "Rewrite histogram and bin-curve CSVs from a scores file"},
      {"compact-cache", "Drop superseded records from the probe cache"},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.desc)->fallthrough();

  std::vector<std::string> argv(args.rbegin(), args.rend());  // CLI11 consumes from the back
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    overrides.apply(config);
    if (print_config) {
      out << config_to_json(config).dump(2) << '\n';
      return kExitOk;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "ingest") return cmd_ingest(config, out);
    if (cmd == "probe") return cmd_probe(config, out, err);
    if (cmd == "analyze") return cmd_analyze(config, out, err);
    if (cmd == "train") return cmd_train(config, out);
    if (cmd == "predict") return cmd_predict(config, out);
    if (cmd == "select") return cmd_select(config, out, err);
    if (cmd == "plot-data") return cmd_plot_data(config, out);
    return cmd_compact_cache(config, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NetworkError& e) {
    err << "network error: " << e.what() << '\n';
    return kExitNetwork;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace kgprobe::cli
