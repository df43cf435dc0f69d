#include "perfpred/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "perfpred/csv.hpp"

namespace perfpred {

namespace fs = std::filesystem;
using nlohmann::json;

bool TypologicalCatalog::contains(const std::string& id) const {
  if (!ranks.empty()) return ranks.count(id) > 0;
  return std::find(feature_ids.begin(), feature_ids.end(), id) != feature_ids.end();
}

int TypologicalCatalog::rank_of(const std::string& id) const {
  auto it = ranks.find(id);
  if (it == ranks.end())
    throw ValidationError("feature '" + id + "' has no rank (catalog not ranked or feature unknown)");
  return it->second;
}

int wals_numeric_id(const std::string& feature_id) {
  std::size_t i = 0;
  while (i < feature_id.size() && feature_id[i] >= '0' && feature_id[i] <= '9') ++i;
  if (i == 0)
    throw ValidationError("malformed WALS feature id (no leading integer): '" + feature_id + "'");
  return static_cast<int>(parse_int(feature_id.substr(0, i), "WALS id"));
}

const LanguageRecord& LanguageRegistry::at(const std::string& code) const {
  auto it = languages.find(code);
  if (it == languages.end()) throw ValidationError("unknown language code: '" + code + "'");
  return it->second;
}

const Eigen::VectorXd& ScoreTable::config_of(const std::string& id) const {
  auto it = configs.find(id);
  if (it == configs.end()) throw ValidationError("unknown config id: '" + id + "'");
  return it->second;
}

int ScoreTable::pivot_index(const std::string& code) const {
  for (std::size_t i = 0; i < pivot_langs.size(); ++i)
    if (pivot_langs[i] == code) return static_cast<int>(i);
  return -1;
}

namespace {

void require_header(const std::vector<CsvRow>& rows, const std::string& path,
                    const std::vector<std::string>& expected) {
  if (rows.empty() || rows.front().fields != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) want.push_back(',');
      want += expected[i];
    }
    throw ValidationError(path + ": expected header '" + want + "'");
  }
}

std::string row_context(const std::string& path, long line) {
  return path + ":" + std::to_string(line);
}

// Catalog order: numeric WALS id, then the full id string.
bool catalog_less(const std::string& a, const std::string& b) {
  const int na = wals_numeric_id(a);
  const int nb = wals_numeric_id(b);
  if (na != nb) return na < nb;
  return a < b;
}

}  // namespace

TypologicalCatalog make_catalog(std::vector<std::string> feature_ids) {
  std::sort(feature_ids.begin(), feature_ids.end(), catalog_less);
  feature_ids.erase(std::unique(feature_ids.begin(), feature_ids.end()),
                    feature_ids.end());
  TypologicalCatalog catalog;
  catalog.feature_ids = std::move(feature_ids);
  return catalog;
}

WalsData load_wals_binary(const std::string& path, int min_wals_id) {
  const auto rows = read_csv(path);
  require_header(rows, path, {"code", "feature_id", "value"});

  WalsData out;
  std::set<std::pair<std::string, std::string>> seen;  // (code, feature_id)
  std::vector<std::string> ids;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string ctx = row_context(path, row.line);
    if (row.fields.size() != 3)
      throw ValidationError(ctx + ": expected 3 fields, got " + std::to_string(row.fields.size()));
    const std::string& code = row.fields[0];
    const std::string& fid = row.fields[1];
    const std::string& value = row.fields[2];
    if (code.empty()) throw ValidationError(ctx + ": empty language code");
    if (value.empty()) throw ValidationError(ctx + ": empty feature value");
    int numeric;
    try {
      numeric = wals_numeric_id(fid);
    } catch (const ValidationError& e) {
      throw ValidationError(ctx + ": " + e.what());
    }
    if (!seen.insert({code, fid}).second)
      throw ValidationError(ctx + ": duplicate entry for language '" + code +
                            "', feature '" + fid + "'");
    if (numeric < min_wals_id) continue;  // phonology band excluded
    const std::string binary_id = fid + "=" + value;
    out.features_by_language[code].insert(binary_id);
    ids.push_back(binary_id);
  }
  std::sort(ids.begin(), ids.end(), catalog_less);
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  out.catalog.feature_ids = std::move(ids);
  return out;
}

LanguageRegistry load_language_registry(const std::string& languages_csv,
                                        const std::string& wals_csv,
                                        const std::string& types_dir,
                                        const std::string& vectors_csv) {
  LanguageRegistry reg;

  const auto lang_rows = read_csv(languages_csv);
  require_header(lang_rows, languages_csv, {"code", "pretraining_tokens"});
  for (std::size_t i = 1; i < lang_rows.size(); ++i) {
    const auto& row = lang_rows[i];
    const std::string ctx = row_context(languages_csv, row.line);
    if (row.fields.size() != 2)
      throw ValidationError(ctx + ": expected 2 fields, got " + std::to_string(row.fields.size()));
    LanguageRecord rec;
    rec.code = row.fields[0];
    if (rec.code.empty()) throw ValidationError(ctx + ": empty language code");
    rec.pretraining_tokens = parse_int(row.fields[1], ctx);
    if (rec.pretraining_tokens <= 0)
      throw ValidationError(ctx + ": language '" + rec.code +
                            "' has non-positive pretraining_tokens");
    if (!reg.languages.emplace(rec.code, std::move(rec)).second)
      throw ValidationError(ctx + ": duplicate language code '" + row.fields[0] + "'");
  }

  WalsData wals = load_wals_binary(wals_csv, 20);
  for (auto& [code, feats] : wals.features_by_language) {
    auto it = reg.languages.find(code);
    if (it == reg.languages.end())
      throw ValidationError(wals_csv + ": language '" + code +
                            "' is not declared in " + languages_csv);
    it->second.wals_features = std::move(feats);
  }
  reg.catalog = std::move(wals.catalog);

  for (auto& [code, rec] : reg.languages) {
    const fs::path tpath = fs::path(types_dir) / (code + ".tsv");
    if (!fs::exists(tpath)) continue;  // absent file means empty type table
    const auto trows = read_tsv(tpath.string());
    for (const auto& row : trows) {
      const std::string ctx = row_context(tpath.string(), row.line);
      if (row.fields.size() != 2)
        throw ValidationError(ctx + ": expected 'type<TAB>count'");
      const std::int64_t count = parse_int(row.fields[1], ctx);
      if (count <= 0) throw ValidationError(ctx + ": non-positive type count");
      if (!rec.type_counts.emplace(row.fields[0], count).second)
        throw ValidationError(ctx + ": duplicate type '" + row.fields[0] + "'");
    }
  }

  const auto vec_rows = read_csv(vectors_csv);
  if (vec_rows.empty() || vec_rows.front().fields.empty() ||
      vec_rows.front().fields[0] != "code")
    throw ValidationError(vectors_csv + ": expected header 'code,v0,v1,...'");
  const std::size_t dim = vec_rows.front().fields.size() - 1;
  for (std::size_t d = 0; d < dim; ++d) {
    if (vec_rows.front().fields[d + 1] != "v" + std::to_string(d))
      throw ValidationError(vectors_csv + ": expected header column 'v" +
                            std::to_string(d) + "'");
  }
  for (std::size_t i = 1; i < vec_rows.size(); ++i) {
    const auto& row = vec_rows[i];
    const std::string ctx = row_context(vectors_csv, row.line);
    if (row.fields.size() != dim + 1)
      throw ValidationError(ctx + ": expected " + std::to_string(dim + 1) + " fields");
    auto it = reg.languages.find(row.fields[0]);
    if (it == reg.languages.end())
      throw ValidationError(ctx + ": language '" + row.fields[0] +
                            "' is not declared in " + languages_csv);
    if (it->second.syntax)
      throw ValidationError(ctx + ": duplicate vector row for '" + row.fields[0] + "'");
    SyntaxVector sv;
    sv.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    sv.present = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(
        static_cast<Eigen::Index>(dim), false);
    for (std::size_t d = 0; d < dim; ++d) {
      const std::string& cell = row.fields[d + 1];
      if (cell == "--") continue;
      const double v = parse_double(cell, ctx);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw ValidationError(ctx + ": component v" + std::to_string(d) +
                              " outside [0,1]: '" + cell + "'");
      sv.values[static_cast<Eigen::Index>(d)] = v;
      sv.present[static_cast<Eigen::Index>(d)] = true;
    }
    it->second.syntax = std::move(sv);
  }

  validate_registry(reg);
  return reg;
}

void validate_registry(const LanguageRegistry& registry) {
  for (const auto& [code, rec] : registry.languages) {
    if (rec.code != code)
      throw ValidationError("registry key '" + code + "' does not match record code '" +
                            rec.code + "'");
    if (rec.pretraining_tokens <= 0)
      throw ValidationError("language '" + code + "' has non-positive pretraining_tokens");
    for (const auto& f : rec.wals_features) {
      if (!registry.catalog.contains(f))
        throw ValidationError("language '" + code + "' exhibits feature '" + f +
                              "' that is not in the typological catalog");
    }
    for (const auto& [type, count] : rec.type_counts) {
      if (count <= 0)
        throw ValidationError("language '" + code + "' has non-positive count for type '" +
                              type + "'");
    }
    if (rec.syntax) {
      for (Eigen::Index d = 0; d < rec.syntax->dim(); ++d) {
        if (rec.syntax->present[d] && !std::isfinite(rec.syntax->values[d]))
          throw ValidationError("language '" + code + "' has a non-finite vector component");
      }
    }
  }
}

namespace {

void check_divisor(double scale_divisor) {
  if (scale_divisor != 1.0 && scale_divisor != 100.0)
    throw ValidationError("scale divisor must be 1 or 100, got " +
                          format_double(scale_divisor));
}

void check_score(double scaled, const std::string& ctx) {
  if (!std::isfinite(scaled) || scaled < 0.0 || scaled > 1.0)
    throw ValidationError(ctx + ": score outside [0,1] after scaling: " +
                          format_double(scaled));
}

}  // namespace

ScoreTable load_scores(const std::string& path, double scale_divisor) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".csv") return load_scores_single(path, scale_divisor);
  if (ext == ".json") return load_scores_multi(path, scale_divisor);
  throw ValidationError(path + ": unknown score-table extension '" + ext +
                        "' (expected .csv or .json)");
}

ScoreTable load_scores_single(const std::string& path, double scale_divisor) {
  check_divisor(scale_divisor);
  const auto rows = read_csv(path);
  require_header(rows, path, {"pivot", "target", "score"});

  ScoreTable table;
  table.mode = ScoreMode::SinglePivot;
  std::set<std::pair<std::string, std::string>> seen;
  std::set<std::string> pivots, targets;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string ctx = row_context(path, row.line);
    if (row.fields.size() != 3)
      throw ValidationError(ctx + ": expected 3 fields, got " + std::to_string(row.fields.size()));
    ScoreEntry e;
    e.key = row.fields[0];
    e.target = row.fields[1];
    if (e.key.empty() || e.target.empty())
      throw ValidationError(ctx + ": empty pivot or target code");
    e.score = parse_double(row.fields[2], ctx) / scale_divisor;
    check_score(e.score, ctx);
    if (!seen.insert({e.key, e.target}).second)
      throw ValidationError(ctx + ": duplicate (pivot, target) pair ('" + e.key +
                            "', '" + e.target + "')");
    pivots.insert(e.key);
    targets.insert(e.target);
    table.entries.push_back(std::move(e));
  }
  table.pivot_langs.assign(pivots.begin(), pivots.end());
  table.target_langs.assign(targets.begin(), targets.end());
  return table;
}

ScoreTable load_scores_multi(const std::string& path, double scale_divisor) {
  check_divisor(scale_divisor);
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("pivots") || !doc.contains("configs") ||
      !doc.contains("entries"))
    throw ValidationError(path + ": expected object with 'pivots', 'configs', 'entries'");

  ScoreTable table;
  table.mode = ScoreMode::MultiPivot;
  if (!doc["pivots"].is_array() || doc["pivots"].empty())
    throw ValidationError(path + ": 'pivots' must be a non-empty array");
  std::set<std::string> pivot_set;
  for (const auto& p : doc["pivots"]) {
    if (!p.is_string()) throw ValidationError(path + ": pivot codes must be strings");
    const std::string code = p.get<std::string>();
    if (!pivot_set.insert(code).second)
      throw ValidationError(path + ": duplicate pivot code '" + code + "'");
    table.pivot_langs.push_back(code);
  }
  const auto p = static_cast<Eigen::Index>(table.pivot_langs.size());

  if (!doc["configs"].is_object())
    throw ValidationError(path + ": 'configs' must be an object");
  for (const auto& [id, arr] : doc["configs"].items()) {
    if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != p)
      throw ValidationError(path + ": config '" + id + "' must list " +
                            std::to_string(p) + " amounts");
    Eigen::VectorXd v(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!arr[static_cast<std::size_t>(j)].is_number())
        throw ValidationError(path + ": config '" + id + "' component " +
                              std::to_string(j) + " is not a number");
      const double a = arr[static_cast<std::size_t>(j)].get<double>();
      if (!std::isfinite(a) || a < 0.0)
        throw ValidationError(path + ": config '" + id + "' component " +
                              std::to_string(j) + " must be finite and >= 0");
      v[j] = a;
    }
    table.configs.emplace(id, std::move(v));
  }

  if (!doc["entries"].is_array())
    throw ValidationError(path + ": 'entries' must be an array");
  std::set<std::pair<std::string, std::string>> seen;
  std::set<std::string> targets;
  std::size_t index = 0;
  for (const auto& item : doc["entries"]) {
    const std::string ctx = path + ": entries[" + std::to_string(index) + "]";
    ++index;
    if (!item.is_array() || item.size() != 3 || !item[0].is_string() ||
        !item[1].is_string() || !item[2].is_number())
      throw ValidationError(ctx + ": expected [config_id, target, score]");
    ScoreEntry e;
    e.key = item[0].get<std::string>();
    e.target = item[1].get<std::string>();
    if (table.configs.find(e.key) == table.configs.end())
      throw ValidationError(ctx + ": unknown config id '" + e.key + "'");
    e.score = item[2].get<double>() / scale_divisor;
    check_score(e.score, ctx);
    if (!seen.insert({e.key, e.target}).second)
      throw ValidationError(ctx + ": duplicate (config, target) pair ('" + e.key +
                            "', '" + e.target + "')");
    targets.insert(e.target);
    table.entries.push_back(std::move(e));
  }
  table.target_langs.assign(targets.begin(), targets.end());
  return table;
}

void save_language_registry(const LanguageRegistry& registry,
                            const std::string& languages_csv,
                            const std::string& wals_csv,
                            const std::string& types_dir,
                            const std::string& vectors_csv) {
  std::string langs = csv_line({"code", "pretraining_tokens"});
  for (const auto& [code, rec] : registry.languages)
    langs += csv_line({code, std::to_string(rec.pretraining_tokens)});
  write_file(languages_csv, langs);

  // Binary ids split back into (feature_id, value) at the first '='.
  std::string wals = csv_line({"code", "feature_id", "value"});
  for (const auto& [code, rec] : registry.languages) {
    std::vector<std::string> feats(rec.wals_features.begin(), rec.wals_features.end());
    std::sort(feats.begin(), feats.end(), catalog_less);
    for (const auto& f : feats) {
      const std::size_t eq = f.find('=');
      if (eq == std::string::npos)
        throw ValidationError("binary feature id without '=': '" + f + "'");
      wals += csv_line({code, f.substr(0, eq), f.substr(eq + 1)});
    }
  }
  write_file(wals_csv, wals);

  fs::create_directories(types_dir);
  for (const auto& [code, rec] : registry.languages) {
    if (rec.type_counts.empty()) continue;
    std::string tsv;
    for (const auto& [type, count] : rec.type_counts)
      tsv += type + "\t" + std::to_string(count) + "\n";
    write_file((fs::path(types_dir) / (code + ".tsv")).string(), tsv);
  }

  Eigen::Index dim = 0;
  for (const auto& [code, rec] : registry.languages)
    if (rec.syntax) dim = std::max(dim, rec.syntax->dim());
  std::vector<std::string> header{"code"};
  for (Eigen::Index d = 0; d < dim; ++d) header.push_back("v" + std::to_string(d));
  std::string vectors = csv_line(header);
  for (const auto& [code, rec] : registry.languages) {
    if (!rec.syntax) continue;
    std::vector<std::string> fields{code};
    for (Eigen::Index d = 0; d < dim; ++d) {
      if (d < rec.syntax->dim() && rec.syntax->present[d])
        fields.push_back(format_double(rec.syntax->values[d]));
      else
        fields.push_back("--");
    }
    vectors += csv_line(fields);
  }
  write_file(vectors_csv, vectors);
}

void save_scores(const ScoreTable& table, const std::string& path) {
  std::vector<const ScoreEntry*> order;
  order.reserve(table.entries.size());
  for (const auto& e : table.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const ScoreEntry* a, const ScoreEntry* b) {
    if (a->key != b->key) return a->key < b->key;
    return a->target < b->target;
  });

  if (table.mode == ScoreMode::SinglePivot) {
    std::string out = csv_line({"pivot", "target", "score"});
    for (const ScoreEntry* e : order)
      out += csv_line({e->key, e->target, format_double(e->score)});
    write_file(path, out);
    return;
  }

  json doc;
  doc["pivots"] = table.pivot_langs;
  doc["configs"] = json::object();
  for (const auto& [id, v] : table.configs) {
    json arr = json::array();
    for (Eigen::Index j = 0; j < v.size(); ++j) arr.push_back(v[j]);
    doc["configs"][id] = std::move(arr);
  }
  doc["entries"] = json::array();
  for (const ScoreEntry* e : order)
    doc["entries"].push_back(json::array({e->key, e->target, e->score}));
  write_file(path, doc.dump(2) + "\n");
}

std::map<std::string, std::string> load_family_file(const std::string& path) {
  const auto rows = read_csv(path);
  require_header(rows, path, {"code", "family"});
  std::map<std::string, std::string> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string ctx = row_context(path, row.line);
    if (row.fields.size() != 2) throw ValidationError(ctx + ": expected 2 fields");
    if (!out.emplace(row.fields[0], row.fields[1]).second)
      throw ValidationError(ctx + ": duplicate code '" + row.fields[0] + "'");
  }
  return out;
}

HeatmapMatrix build_heatmap(const ScoreTable& table,
                            const LanguageRegistry& registry,
                            HeatmapOrdering ordering,
                            const std::map<std::string, std::string>* families) {
  if (table.mode != ScoreMode::SinglePivot)
    throw ProtocolError("heatmap requires a single-pivot score table");

  auto order_codes = [&](std::vector<std::string> codes) {
    if (ordering == HeatmapOrdering::Resource) {
      std::sort(codes.begin(), codes.end(), [&](const std::string& a, const std::string& b) {
        const auto ta = registry.at(a).pretraining_tokens;
        const auto tb = registry.at(b).pretraining_tokens;
        if (ta != tb) return ta > tb;
        return a < b;
      });
    } else {
      if (families == nullptr)
        throw ValidationError("family ordering requires a family grouping file");
      auto family_of = [&](const std::string& code) -> const std::string& {
        auto it = families->find(code);
        if (it == families->end())
          throw ValidationError("no family grouping for language '" + code + "'");
        return it->second;
      };
      std::sort(codes.begin(), codes.end(), [&](const std::string& a, const std::string& b) {
        const std::string& fa = family_of(a);
        const std::string& fb = family_of(b);
        if (fa != fb) return fa < fb;
        return a < b;
      });
    }
    return codes;
  };

  HeatmapMatrix m;
  m.pivots = order_codes(table.pivot_langs);
  m.targets = order_codes(table.target_langs);
  std::map<std::string, std::size_t> prow, tcol;
  for (std::size_t i = 0; i < m.pivots.size(); ++i) prow[m.pivots[i]] = i;
  for (std::size_t j = 0; j < m.targets.size(); ++j) tcol[m.targets[j]] = j;
  m.cells.assign(m.pivots.size(),
                 std::vector<std::optional<double>>(m.targets.size(), std::nullopt));
  for (const auto& e : table.entries)
    m.cells[prow.at(e.key)][tcol.at(e.target)] = e.score;
  return m;
}

std::string heatmap_to_csv(const HeatmapMatrix& m) {
  std::vector<std::string> header{""};
  header.insert(header.end(), m.targets.begin(), m.targets.end());
  std::string out = csv_line(header);
  for (std::size_t i = 0; i < m.pivots.size(); ++i) {
    std::vector<std::string> fields{m.pivots[i]};
    for (std::size_t j = 0; j < m.targets.size(); ++j)
      fields.push_back(m.cells[i][j] ? format_double(*m.cells[i][j]) : "");
    out += csv_line(fields);
  }
  return out;
}

}  // namespace perfpred
