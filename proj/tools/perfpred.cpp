#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "perfpred/corpus.hpp"
#include "perfpred/csv.hpp"
#include "perfpred/eval.hpp"
#include "perfpred/features.hpp"
#include "perfpred/gbrt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace perfpred;

namespace {

// Every setting can come from the JSON run-config file or be overridden by a
// flag; flags win.
struct Flags {
  std::string config;
  std::string languages, wals, types_dir, vectors, scores, out;
  std::string families, model, candidates, target;
  std::string mode, protocol, scenario, order;
  int rcase = 0;
  int scale = 0;
  std::uint64_t seed = 0;
  double learning_rate = 0.0, min_gain = 0.0, tie_tolerance = 0.0;
  int max_depth = 0, n_estimators = 0, min_samples_leaf = 0;
  long max_pairs = 0;
  std::int64_t min_type_count = 0;
};

void add_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run-config file");
  sub->add_option("--languages", f.languages, "languages.csv (code,pretraining_tokens)");
  sub->add_option("--wals", f.wals, "wals.csv (code,feature_id,value)");
  sub->add_option("--types-dir", f.types_dir, "directory of <code>.tsv type tables");
  sub->add_option("--vectors", f.vectors, "vectors.csv (code,v0,...)");
  sub->add_option("--scores", f.scores, "score table (.csv single-pivot, .json multi-pivot)");
  sub->add_option("--scale", f.scale, "raw score divisor, 1 or 100")
      ->check(CLI::IsMember({1, 100}));
  sub->add_option("--mode", f.mode, "pivot feature mode")
      ->check(CLI::IsMember({"none", "all", "data-only"}));
  sub->add_option("--protocol", f.protocol, "evaluation protocol")
      ->check(CLI::IsMember({"e1-single", "e2-single", "e1-multi", "e2-multi"}));
  sub->add_option("--case", f.rcase, "relative evaluation case")
      ->check(CLI::IsMember({1, 2}));
  sub->add_option("--scenario", f.scenario, "relative evaluation scenario")
      ->check(CLI::IsMember({"e1", "e2"}));
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--families", f.families, "family grouping csv (code,family)");
  sub->add_option("--order", f.order, "heatmap axis ordering")
      ->check(CLI::IsMember({"resource", "family"}));
  sub->add_option("--model", f.model, "trained model bundle json");
  sub->add_option("--candidates", f.candidates, "candidate configs csv");
  sub->add_option("--target", f.target, "target language code");
  sub->add_option("--learning-rate", f.learning_rate, "boosting learning rate");
  sub->add_option("--max-depth", f.max_depth, "tree depth limit");
  sub->add_option("--n-estimators", f.n_estimators, "number of trees");
  sub->add_option("--min-samples-leaf", f.min_samples_leaf, "minimum rows per leaf");
  sub->add_option("--min-gain", f.min_gain, "minimum split gain");
  sub->add_option("--min-type-count", f.min_type_count,
                  "minimum type count kept for overlap");
  sub->add_option("--tie-tolerance", f.tie_tolerance, "relation tie tolerance");
  sub->add_option("--max-pairs", f.max_pairs, "pair sample cap for relative eval");
}

class Config {
 public:
  Config(const CLI::App* sub, const Flags& flags) : sub_(sub), flags_(flags) {
    if (sub->count("--config") > 0) {
      try {
        doc_ = json::parse(read_file(flags.config));
      } catch (const json::parse_error& e) {
        throw ValidationError(flags.config + ": " + e.what());
      }
      if (!doc_.is_object())
        throw ValidationError(flags.config + ": run config must be a JSON object");
    }
  }

  bool flag_set(const std::string& flag) const { return sub_->count(flag) > 0; }

  std::optional<std::string> str(const std::string& flag, const std::string& key,
                                 const std::string& flag_value) const {
    if (flag_set(flag)) return flag_value;
    if (doc_.contains(key)) {
      if (!doc_[key].is_string())
        throw ValidationError("config key '" + key + "' must be a string");
      return doc_[key].get<std::string>();
    }
    return std::nullopt;
  }

  std::string require_str(const std::string& flag, const std::string& key,
                          const std::string& flag_value) const {
    auto v = str(flag, key, flag_value);
    if (!v)
      throw ValidationError("missing setting '" + key + "' (flag " + flag +
                            " or config key \"" + key + "\")");
    return *v;
  }

  template <typename T>
  std::optional<T> number(const std::string& flag, const std::string& key,
                          T flag_value) const {
    if (flag_set(flag)) return flag_value;
    if (doc_.contains(key)) {
      if (!doc_[key].is_number())
        throw ValidationError("config key '" + key + "' must be a number");
      return doc_[key].get<T>();
    }
    return std::nullopt;
  }

  const json& raw() const { return doc_; }

  std::string existing_path(const std::string& flag, const std::string& key,
                            const std::string& flag_value) const {
    const std::string path = require_str(flag, key, flag_value);
    if (!fs::exists(path))
      throw ValidationError("path for '" + key + "' does not exist: " + path);
    return path;
  }

  LanguageRegistry load_registry() const {
    return load_language_registry(
        existing_path("--languages", "languages", flags_.languages),
        existing_path("--wals", "wals", flags_.wals),
        existing_path("--types-dir", "types_dir", flags_.types_dir),
        existing_path("--vectors", "vectors", flags_.vectors));
  }

  ScoreTable load_table() const {
    const double scale =
        static_cast<double>(number<int>("--scale", "scale", flags_.scale).value_or(1));
    return load_scores(existing_path("--scores", "scores", flags_.scores), scale);
  }

  TrainParams train_params() const {
    TrainParams p;
    if (doc_.contains("params")) {
      const json& cp = doc_["params"];
      if (!cp.is_object()) throw ValidationError("config key 'params' must be an object");
      if (cp.contains("learning_rate")) p.learning_rate = cp["learning_rate"].get<double>();
      if (cp.contains("max_depth")) p.max_depth = cp["max_depth"].get<int>();
      if (cp.contains("n_estimators")) p.n_estimators = cp["n_estimators"].get<int>();
      if (cp.contains("min_samples_leaf"))
        p.min_samples_leaf = cp["min_samples_leaf"].get<int>();
      if (cp.contains("min_gain")) p.min_gain = cp["min_gain"].get<double>();
    }
    if (flag_set("--learning-rate")) p.learning_rate = flags_.learning_rate;
    if (flag_set("--max-depth")) p.max_depth = flags_.max_depth;
    if (flag_set("--n-estimators")) p.n_estimators = flags_.n_estimators;
    if (flag_set("--min-samples-leaf")) p.min_samples_leaf = flags_.min_samples_leaf;
    if (flag_set("--min-gain")) p.min_gain = flags_.min_gain;
    p.seed = seed().value_or(0);
    return p;
  }

  std::optional<std::uint64_t> seed() const {
    return number<std::uint64_t>("--seed", "seed", flags_.seed);
  }

  std::uint64_t require_seed() const {
    auto s = seed();
    if (!s)
      throw ValidationError("this command draws random samples; give an explicit "
                            "--seed (or config key \"seed\")");
    return *s;
  }

  PivotFeatureMode mode() const {
    return parse_pivot_feature_mode(str("--mode", "mode", flags_.mode).value_or("none"));
  }

  EvalOptions eval_options() const {
    EvalOptions o;
    o.params = train_params();
    o.mode = mode();
    o.seed = seed().value_or(0);
    o.min_type_count = number<std::int64_t>("--min-type-count", "min_type_count",
                                            flags_.min_type_count)
                           .value_or(kDefaultMinTypeCount);
    return o;
  }

  fs::path out_dir() const {
    const std::string out = require_str("--out", "out", flags_.out);
    fs::create_directories(out);
    return out;
  }

  const Flags& flags() const { return flags_; }

 private:
  const CLI::App* sub_;
  const Flags& flags_;
  json doc_ = json::object();
};

std::string num(double v) { return json(v).dump(); }

void write_text(const fs::path& path, const std::string& content) {
  write_file(path.string(), content);
  std::cout << "wrote " << path.string() << "\n";
}

// ---------------------------------------------------------------------------
// Model bundle: the trained ensemble plus everything needed to rebuild its
// input features (catalog ranks, normalizer, pivot order, mode).
// ---------------------------------------------------------------------------

struct ModelBundle {
  std::string table_mode;  // "single" or "multi"
  std::string feature_mode;
  std::vector<std::string> pivot_langs;
  std::int64_t min_type_count = kDefaultMinTypeCount;
  TypologicalCatalog ranked;
  Normalizer normalizer;
  GBRTModel model;
};

json bundle_to_json(const ModelBundle& b) {
  json doc;
  doc["table_mode"] = b.table_mode;
  doc["feature_mode"] = b.feature_mode;
  doc["pivot_langs"] = b.pivot_langs;
  doc["min_type_count"] = b.min_type_count;
  doc["catalog_ranks"] = b.ranked.ranks;
  doc["normalizer"] = {{"names", b.normalizer.names}, {"mins", json::array()},
                       {"maxs", json::array()}};
  for (Eigen::Index j = 0; j < b.normalizer.mins.size(); ++j) {
    doc["normalizer"]["mins"].push_back(b.normalizer.mins[j]);
    doc["normalizer"]["maxs"].push_back(b.normalizer.maxs[j]);
  }
  doc["model"] = model_to_json(b.model);
  return doc;
}

ModelBundle bundle_from_json(const json& doc) {
  ModelBundle b;
  try {
    b.table_mode = doc.at("table_mode").get<std::string>();
    b.feature_mode = doc.at("feature_mode").get<std::string>();
    b.pivot_langs = doc.at("pivot_langs").get<std::vector<std::string>>();
    b.min_type_count = doc.at("min_type_count").get<std::int64_t>();
    b.ranked.ranks = doc.at("catalog_ranks").get<std::map<std::string, int>>();
    for (const auto& [id, rank] : b.ranked.ranks) b.ranked.feature_ids.push_back(id);
    std::sort(b.ranked.feature_ids.begin(), b.ranked.feature_ids.end(),
              [](const std::string& x, const std::string& y) {
                const int nx = wals_numeric_id(x), ny = wals_numeric_id(y);
                if (nx != ny) return nx < ny;
                return x < y;
              });
    const json& n = doc.at("normalizer");
    b.normalizer.names = n.at("names").get<std::vector<std::string>>();
    const auto& mins = n.at("mins");
    const auto& maxs = n.at("maxs");
    b.normalizer.mins.resize(static_cast<Eigen::Index>(mins.size()));
    b.normalizer.maxs.resize(static_cast<Eigen::Index>(maxs.size()));
    for (std::size_t j = 0; j < mins.size(); ++j) {
      b.normalizer.mins[static_cast<Eigen::Index>(j)] = mins[j].get<double>();
      b.normalizer.maxs[static_cast<Eigen::Index>(j)] = maxs[j].get<double>();
    }
    b.model = model_from_json(doc.at("model"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model bundle: ") + e.what());
  }
  return b;
}

ModelBundle train_bundle(const Config& cfg, const LanguageRegistry& registry,
                         const ScoreTable& table) {
  const EvalOptions options = cfg.eval_options();
  ModelBundle b;
  b.table_mode = table.mode == ScoreMode::SinglePivot ? "single" : "multi";
  b.feature_mode =
      table.mode == ScoreMode::SinglePivot ? "single" : to_string(options.mode);
  b.pivot_langs = table.pivot_langs;
  b.min_type_count = options.min_type_count;
  b.ranked = rank_typological_features(registry);

  FeatureMatrix raw;
  std::vector<std::string> targets;
  Eigen::VectorXd y(static_cast<Eigen::Index>(table.entries.size()));
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const ScoreEntry& e = table.entries[i];
    FeatureVector fv =
        table.mode == ScoreMode::SinglePivot
            ? assemble_single_pivot(e.key, e.target, registry, b.ranked,
                                    options.min_type_count)
            : assemble_multi_pivot(table.config_of(e.key), e.target, registry, b.ranked,
                                   table.pivot_langs, options.mode,
                                   options.min_type_count);
    if (i == 0) {
      raw.names = fv.names;
      raw.values.resize(static_cast<Eigen::Index>(table.entries.size()), fv.values.size());
    }
    raw.values.row(static_cast<Eigen::Index>(i)) = fv.values.transpose();
    targets.push_back(e.target);
    y[static_cast<Eigen::Index>(i)] = e.score;
  }
  if (table.entries.empty()) throw ProtocolError("score table has no entries");
  b.normalizer = fit_normalizer(raw);
  b.model = train_gbrt(apply_normalizer(b.normalizer, raw), y, options.params);
  return b;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_featurize(const Config& cfg) {
  const LanguageRegistry registry = cfg.load_registry();
  const ScoreTable table = cfg.load_table();
  const EvalOptions options = cfg.eval_options();
  const TypologicalCatalog ranked = rank_typological_features(registry);

  FeatureMatrix m;
  std::vector<std::string> targets;
  Eigen::VectorXd y(static_cast<Eigen::Index>(table.entries.size()));
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const ScoreEntry& e = table.entries[i];
    FeatureVector fv =
        table.mode == ScoreMode::SinglePivot
            ? assemble_single_pivot(e.key, e.target, registry, ranked,
                                    options.min_type_count)
            : assemble_multi_pivot(table.config_of(e.key), e.target, registry, ranked,
                                   table.pivot_langs, options.mode,
                                   options.min_type_count);
    if (i == 0) {
      m.names = fv.names;
      m.values.resize(static_cast<Eigen::Index>(table.entries.size()), fv.values.size());
    }
    m.values.row(static_cast<Eigen::Index>(i)) = fv.values.transpose();
    targets.push_back(e.target);
    y[static_cast<Eigen::Index>(i)] = e.score;
  }
  if (table.entries.empty()) throw ProtocolError("score table has no entries");

  const fs::path out = cfg.out_dir() / "features.csv";
  write_text(out, feature_matrix_csv(m, targets, y));
  std::cout << m.rows() << " rows, " << m.cols() << " feature columns\n";
  return 0;
}

int cmd_train(const Config& cfg) {
  const LanguageRegistry registry = cfg.load_registry();
  const ScoreTable table = cfg.load_table();
  const ModelBundle bundle = train_bundle(cfg, registry, table);

  const fs::path out = cfg.out_dir() / "model.json";
  write_text(out, bundle_to_json(bundle).dump(2) + "\n");
  std::cout << "trained on " << table.entries.size() << " rows\n";
  std::cout << "feature importance:\n";
  for (const auto& [name, share] : feature_importance(bundle.model))
    std::cout << "  " << name << " " << num(share) << "\n";
  return 0;
}

int cmd_evaluate(const Config& cfg) {
  const LanguageRegistry registry = cfg.load_registry();
  const ScoreTable table = cfg.load_table();
  const Protocol protocol =
      parse_protocol(cfg.require_str("--protocol", "protocol", cfg.flags().protocol));
  EvalOptions options = cfg.eval_options();
  if (protocol == Protocol::E1Multi || protocol == Protocol::E2Multi) {
    options.seed = cfg.require_seed();
    options.params.seed = options.seed;
  }

  EvalReport report;
  switch (protocol) {
    case Protocol::E1Single: report = evaluate_e1_single(table, registry, options); break;
    case Protocol::E2Single: report = evaluate_e2_single(table, registry, options); break;
    case Protocol::E1Multi: report = evaluate_e1_multi(table, registry, options); break;
    case Protocol::E2Multi: report = evaluate_e2_multi(table, registry, options); break;
  }

  const fs::path out = cfg.out_dir() / "report.json";
  write_text(out, report_to_json(report).dump(2) + "\n");
  std::cout << "protocol " << protocol_name(report.protocol) << " (mode "
            << report.feature_mode << ", seed " << report.seed << ")\n";
  std::cout << "overall_mae " << num(report.overall_mae) << "\n";
  if (report.baseline_mae) std::cout << "baseline_mae " << num(*report.baseline_mae) << "\n";
  for (const auto& [lang, value] : report.per_language_mae)
    std::cout << "  " << lang << " " << num(value) << "\n";
  for (const auto& lang : report.skipped_languages)
    std::cout << "skipped " << lang << " (not enough rows)\n";
  return 0;
}

int cmd_relative_eval(const Config& cfg) {
  const LanguageRegistry registry = cfg.load_registry();
  const ScoreTable table = cfg.load_table();
  const int rcase_num =
      cfg.number<int>("--case", "case", cfg.flags().rcase).value_or(0);
  if (rcase_num != 1 && rcase_num != 2)
    throw ValidationError("missing or invalid setting 'case' (flag --case, 1 or 2)");
  const std::string scenario_name =
      cfg.require_str("--scenario", "scenario", cfg.flags().scenario);
  if (scenario_name != "e1" && scenario_name != "e2")
    throw ValidationError("scenario must be 'e1' or 'e2'");

  RelativeOptions options;
  options.eval = cfg.eval_options();
  options.eval.seed = cfg.require_seed();
  options.eval.params.seed = options.eval.seed;
  options.tie_tolerance =
      cfg.number<double>("--tie-tolerance", "tie_tolerance", cfg.flags().tie_tolerance)
          .value_or(kDefaultTieTolerance);
  options.max_pairs =
      cfg.number<long>("--max-pairs", "max_pairs", cfg.flags().max_pairs).value_or(10000);

  const RelativeEvalReport report = relative_evaluate(
      table, registry, rcase_num == 1 ? RelativeCase::Case1 : RelativeCase::Case2,
      scenario_name == "e1" ? RelativeScenario::E1 : RelativeScenario::E2, options);

  const fs::path out = cfg.out_dir() / "relative_report.json";
  write_text(out, report_to_json(report).dump(2) + "\n");
  std::cout << "case " << rcase_num << " scenario " << scenario_name << " (mode "
            << report.feature_mode << ", seed " << report.seed << ")\n";
  std::cout << "predictor_accuracy " << num(report.predictor_accuracy) << "\n";
  std::cout << "baseline_accuracy " << num(report.baseline_accuracy) << "\n";
  std::cout << "n_pairs " << report.n_pairs << "\n";
  for (const auto& lang : report.skipped_languages)
    std::cout << "skipped " << lang << " (not enough rows)\n";
  return 0;
}

int cmd_heatmap(const Config& cfg) {
  const LanguageRegistry registry = cfg.load_registry();
  const ScoreTable table = cfg.load_table();
  const std::string order =
      cfg.str("--order", "order", cfg.flags().order).value_or("resource");

  std::map<std::string, std::string> families;
  const std::map<std::string, std::string>* families_ptr = nullptr;
  if (order == "family") {
    auto path = cfg.str("--families", "families", cfg.flags().families);
    if (!path)
      throw ValidationError("family ordering requires --families (or config key "
                            "\"families\")");
    families = load_family_file(*path);
    families_ptr = &families;
  } else if (order != "resource") {
    throw ValidationError("order must be 'resource' or 'family'");
  }

  const HeatmapMatrix m = build_heatmap(
      table, registry,
      order == "family" ? HeatmapOrdering::Family : HeatmapOrdering::Resource,
      families_ptr);
  const fs::path out = cfg.out_dir() / "heatmap.csv";
  write_text(out, heatmap_to_csv(m));
  std::cout << m.pivots.size() << " pivot rows x " << m.targets.size()
            << " target columns\n";
  return 0;
}

int cmd_rank_configs(const Config& cfg) {
  const LanguageRegistry registry = cfg.load_registry();
  ModelBundle bundle;
  if (cfg.str("--model", "model", cfg.flags().model)) {
    const std::string path = cfg.existing_path("--model", "model", cfg.flags().model);
    try {
      bundle = bundle_from_json(json::parse(read_file(path)));
    } catch (const json::parse_error& e) {
      throw ValidationError(path + ": " + e.what());
    }
  } else {
    bundle = train_bundle(cfg, registry, cfg.load_table());
  }
  if (bundle.table_mode != "multi")
    throw ProtocolError("rank-configs needs a multi-pivot model bundle");
  const std::string target = cfg.require_str("--target", "target", cfg.flags().target);
  const PivotFeatureMode mode = parse_pivot_feature_mode(bundle.feature_mode);

  const std::string cand_path =
      cfg.existing_path("--candidates", "candidates", cfg.flags().candidates);
  const auto rows = read_csv(cand_path);
  const std::size_t p = bundle.pivot_langs.size();
  if (rows.empty() || rows.front().fields.empty() ||
      rows.front().fields[0] != "config_id" || rows.front().fields.size() != p + 1)
    throw ValidationError(cand_path + ": expected header 'config_id' plus " +
                          std::to_string(p) + " amount columns");

  struct Candidate {
    std::string id;
    double prediction = 0.0;
  };
  std::vector<Candidate> ranked_list;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string ctx = cand_path + ":" + std::to_string(row.line);
    if (row.fields.size() != p + 1)
      throw ValidationError(ctx + ": expected " + std::to_string(p + 1) +
                            " fields, got " + std::to_string(row.fields.size()));
    Eigen::VectorXd config(static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
      config[static_cast<Eigen::Index>(j)] = parse_double(row.fields[j + 1], ctx);
      if (config[static_cast<Eigen::Index>(j)] < 0.0)
        throw ValidationError(ctx + ": negative data amount");
    }
    const FeatureVector raw =
        assemble_multi_pivot(config, target, registry, bundle.ranked,
                             bundle.pivot_langs, mode, bundle.min_type_count);
    const FeatureVector x = apply_normalizer(bundle.normalizer, raw);
    ranked_list.push_back({row.fields[0], predict(bundle.model, x)});
  }
  if (ranked_list.empty()) throw ValidationError(cand_path + ": no candidate rows");

  // Descending by prediction; stable keeps file order on ties.
  std::stable_sort(ranked_list.begin(), ranked_list.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.prediction > b.prediction;
                   });

  std::string csv = csv_line({"rank", "config_id", "prediction"});
  for (std::size_t i = 0; i < ranked_list.size(); ++i)
    csv += csv_line({std::to_string(i + 1), ranked_list[i].id,
                     format_double(ranked_list[i].prediction)});
  const fs::path out = cfg.out_dir() / "ranked_configs.csv";
  write_text(out, csv);
  for (std::size_t i = 0; i < ranked_list.size(); ++i)
    std::cout << (i + 1) << ". " << ranked_list[i].id << " "
              << num(ranked_list[i].prediction) << "\n";
  return 0;
}

int cmd_validate(const Config& cfg) {
  const LanguageRegistry registry = cfg.load_registry();
  std::cout << "languages: " << registry.languages.size() << "\n";
  std::cout << "typological features: " << registry.catalog.feature_ids.size() << "\n";
  std::size_t with_types = 0, with_vectors = 0;
  for (const auto& [code, rec] : registry.languages) {
    if (!rec.type_counts.empty()) ++with_types;
    if (rec.syntax) ++with_vectors;
  }
  std::cout << "languages with type tables: " << with_types << "\n";
  std::cout << "languages with syntax vectors: " << with_vectors << "\n";

  if (cfg.str("--scores", "scores", cfg.flags().scores)) {
    const ScoreTable table = cfg.load_table();
    std::cout << "score table: "
              << (table.mode == ScoreMode::SinglePivot ? "single-pivot" : "multi-pivot")
              << ", " << table.pivot_langs.size()
              << (table.mode == ScoreMode::SinglePivot ? " pivots, " : " pivot slots, ");
    if (table.mode == ScoreMode::MultiPivot)
      std::cout << table.configs.size() << " configs, ";
    std::cout << table.target_langs.size() << " targets, " << table.entries.size()
              << " entries\n";
    for (const auto& code : table.target_langs)
      if (!registry.has(code))
        throw ValidationError("score table target '" + code + "' is not in the registry");
    for (const auto& code : table.pivot_langs)
      if (!registry.has(code))
        throw ValidationError("score table pivot '" + code + "' is not in the registry");
  }
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"performance prediction for multilingual models over (pivot, target) "
               "language combinations"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* featurize = app.add_subcommand(
      "featurize", "write the assembled feature matrix as csv");
  CLI::App* train = app.add_subcommand(
      "train", "train a predictor on the full score table and save the bundle");
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "run an error protocol and write the report");
  CLI::App* relative = app.add_subcommand(
      "relative-eval", "pairwise ranking accuracy against the naive baselines");
  CLI::App* heatmap = app.add_subcommand(
      "heatmap", "export the pivot x target score matrix as csv");
  CLI::App* rank = app.add_subcommand(
      "rank-configs", "rank candidate training configs for a target language");
  CLI::App* validate = app.add_subcommand(
      "validate", "load and validate the registry and score table");
  for (CLI::App* sub : {featurize, train, evaluate, relative, heatmap, rank, validate})
    add_options(sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (featurize->parsed()) return cmd_featurize(Config(featurize, flags));
    if (train->parsed()) return cmd_train(Config(train, flags));
    if (evaluate->parsed()) return cmd_evaluate(Config(evaluate, flags));
    if (relative->parsed()) return cmd_relative_eval(Config(relative, flags));
    if (heatmap->parsed()) return cmd_heatmap(Config(heatmap, flags));
    if (rank->parsed()) return cmd_rank_configs(Config(rank, flags));
    if (validate->parsed()) return cmd_validate(Config(validate, flags));
  } catch (const ProtocolError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
