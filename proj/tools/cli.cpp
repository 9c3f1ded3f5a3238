#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "accsams/errors.hpp"
#include "accsams/export.hpp"
#include "accsams/metrics.hpp"
#include "accsams/service.hpp"

namespace accsams::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view bytes, const std::string& what) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw SyntaxError(what + ": " + e.what());
  }
}

void print_violations(const ValidationError& e, const fs::path& file, std::ostream& err) {
  err << file.string() << ": " << e.what() << "\n";
  for (const auto& v : e.violations()) {
    err << "  " << v.code;
    if (v.block_id) err << " [" << *v.block_id << "]";
    err << " " << v.message << "\n";
  }
}

void print_diagnostics(const std::vector<Diagnostic>& ds, const fs::path& file, std::ostream& err) {
  for (const auto& d : ds) {
    err << file.string() << ": " << d.code;
    if (d.block_id) err << " [" << *d.block_id << "]";
    err << " " << d.message << "\n";
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<std::string> order_from(const std::map<std::string, int>& ranks) {
  std::vector<std::pair<int, std::string>> v;
  for (const auto& [id, r] : ranks) v.emplace_back(r, id);
  std::sort(v.begin(), v.end());
  std::vector<std::string> out;
  for (auto& [r, id] : v) out.push_back(std::move(id));
  return out;
}

std::vector<std::string> gold_order(const ExamDocument& gold) {
  if (gold.annotations && !gold.annotations->order.empty()) return order_from(gold.annotations->order);
  return reading_order(gold.blocks);
}

struct ConvertOne {
  const ConvertOptions& opts;
  const FileConfig& cfg;
  const PipelineConfig& pipeline;
  const std::map<std::string, std::string>& alt_map;
  std::ostream& out;
  std::ostream& err;

  int operator()(const fs::path& input) const {
    const std::string bytes = read_file(input);
    ExamDocument doc;
    DocTree tree;
    bool from_state = false;
    const json probe = parse_json(bytes, input.string());
    if (probe.is_object() && probe.contains("document") && probe.contains("tree")) {
      service::Session s = service::session_from_json(bytes);
      doc = std::move(s.document);
      tree = std::move(s.tree);
      from_state = true;
    } else {
      doc = parse_block_file(bytes);
    }

    for (const auto& [id, alt] : alt_map) {
      if (ContentBlock* b = doc.find_block(id)) {
        b->alt_text = alt;
      }
    }
    if (opts.placeholder_alt_text) fill_placeholder_alt_text(doc);
    if (!from_state) tree = run_pipeline(doc, pipeline);
    print_diagnostics(tree.diagnostics, input, err);

    ExportOptions eo;
    eo.solutions = pipeline.solutions;
    const std::string layout_name = opts.layout.value_or(cfg.layout.value_or("inline"));
    const std::string format_name = opts.format.value_or(cfg.format.value_or("markdown"));
    const auto layout = parse_layout(layout_name);
    if (!layout) throw ConfigError("unknown layout '" + layout_name + "'");
    const auto format = parse_format(format_name);
    if (!format) throw ConfigError("unknown format '" + format_name + "'");
    eo.layout = *layout;
    eo.format = *format;
    if (auto depth = opts.max_heading_depth ? opts.max_heading_depth : cfg.max_heading_depth) {
      eo.max_heading_depth = *depth;
    }

    ExportResult result;
    try {
      result = export_document(tree, doc, eo);
    } catch (const MissingAltText& e) {
      err << input.string() << ": missing alt text for";
      for (const auto& id : e.block_ids()) err << " " << id;
      err << "\n  supply it with --alt-text-file, --placeholder-alt-text or the review service\n";
      return kExitContent;
    }
    print_diagnostics(result.warnings, input, err);

    const fs::path dir = opts.output_dir.value_or(cfg.output_dir.value_or("out"));
    fs::create_directories(dir);
    std::string stem = input.stem().string();
    if (from_state) {
      const std::string s = fs::path(doc.source.filename).stem().string();
      stem = s.empty() ? "exam" : s;
    }
    const std::string ext(file_extension(eo.format));
    std::vector<fs::path> written;
    if (result.solutions) {
      written.push_back(dir / (stem + ".questions." + ext));
      write_file_atomic(written.back(), result.primary);
      written.push_back(dir / (stem + ".solutions." + ext));
      write_file_atomic(written.back(), *result.solutions);
    } else {
      written.push_back(dir / (stem + "." + ext));
      write_file_atomic(written.back(), result.primary);
    }
    if (opts.write_assets) {
      for (auto& p : write_figure_assets(doc, input.parent_path(), dir / eo.asset_dir, err)) {
        written.push_back(std::move(p));
      }
    }
    for (const auto& p : written) out << p.string() << "\n";
    return kExitOk;
  }
};

}  // namespace

FileConfig parse_config(std::string_view bytes) {
  json j;
  try {
    j = parse_json(bytes, "config");
  } catch (const SyntaxError& e) {
    throw ConfigError(e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  FileConfig cfg;
  auto str = [](const json& v, const char* key) {
    if (!v.is_string()) throw ConfigError(std::string("config: ") + key + " must be a string");
    return v.get<std::string>();
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    if (key == "layout") {
      cfg.layout = str(v, "layout");
      if (!parse_layout(*cfg.layout)) throw ConfigError("config: unknown layout '" + *cfg.layout + "'");
    } else if (key == "format") {
      cfg.format = str(v, "format");
      if (!parse_format(*cfg.format)) throw ConfigError("config: unknown format '" + *cfg.format + "'");
    } else if (key == "output_dir") {
      cfg.output_dir = str(v, "output_dir");
    } else if (key == "max_heading_depth") {
      if (!v.is_number_integer()) throw ConfigError("config: max_heading_depth must be an integer");
      cfg.max_heading_depth = v.get<int>();
    } else if (key == "heading_keywords") {
      cfg.pipeline.structure = parse_heading_keywords(v.dump());
    } else if (key == "solutions") {
      cfg.pipeline.solutions = parse_solution_config(v.dump());
    } else if (key == "filter") {
      cfg.filter = parse_filter_config(v.dump());
    } else if (key == "service") {
      if (!v.is_object()) throw ConfigError("config: service must be an object");
      for (auto s = v.begin(); s != v.end(); ++s) {
        if (s.key() == "data_dir") {
          cfg.data_dir = str(s.value(), "service.data_dir");
        } else if (s.key() == "bind") {
          cfg.bind = str(s.value(), "service.bind");
        } else if (s.key() == "max_upload") {
          if (!s.value().is_number_unsigned()) throw ConfigError("config: service.max_upload must be a byte count");
          cfg.max_upload = s.value().get<std::size_t>();
        } else {
          throw ConfigError("config: unknown key service." + s.key());
        }
      }
    } else {
      throw ConfigError("config: unknown key " + key);
    }
  }
  return cfg;
}

FileConfig load_config(const fs::path& path) { return parse_config(read_file(path)); }

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

int cmd_convert(const ConvertOptions& opts, const FileConfig& cfg, std::ostream& out, std::ostream& err) {
  PipelineConfig pipeline = cfg.pipeline;
  std::map<std::string, std::string> alt_map;
  try {
    if (opts.heading_keywords) pipeline.structure = parse_heading_keywords(read_file(*opts.heading_keywords));
    if (opts.solution_config) pipeline.solutions = parse_solution_config(read_file(*opts.solution_config));
    if (opts.solution_keywords) {
      pipeline.solutions.keywords = split_list(*opts.solution_keywords);
      check_solution_config(pipeline.solutions);
    }
    if (opts.alt_text_file) {
      const json j = parse_json(read_file(*opts.alt_text_file), opts.alt_text_file->string());
      if (!j.is_object()) throw ConfigError("alt text file must map block ids to strings");
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string()) throw ConfigError("alt text for '" + it.key() + "' must be a string");
        alt_map[it.key()] = it.value().get<std::string>();
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  int worst = kExitOk;
  ConvertOne one{opts, cfg, pipeline, alt_map, out, err};
  for (const auto& input : opts.inputs) {
    int code = kExitOk;
    try {
      code = one(input);
    } catch (const ValidationError& e) {
      print_violations(e, input, err);
      code = kExitInput;
    } catch (const Error& e) {
      err << input.string() << ": " << e.what() << "\n";
      code = kExitInput;
    } catch (const fs::filesystem_error& e) {
      err << input.string() << ": " << e.what() << "\n";
      code = kExitInternal;
    }
    worst = std::max(worst, code);
  }
  return worst;
}

int cmd_evaluate(const EvaluateOptions& opts, const FileConfig& cfg, std::ostream& out, std::ostream& err) {
  if (opts.preds.empty() || opts.preds.size() != opts.golds.size()) {
    err << "error: give --pred and --gold the same number of times\n";
    return kExitInput;
  }
  if (opts.mode != "detection" && opts.mode != "order" && opts.mode != "hierarchy") {
    err << "error: unknown mode '" << opts.mode << "'\n";
    return kExitInput;
  }
  EvalReport report;
  try {
    std::vector<Detection> preds;
    std::vector<GroundTruth> gts;
    std::vector<double> ard_norm, ard_raw, lvl_abs, lvl_rel;
    for (std::size_t i = 0; i < opts.preds.size(); ++i) {
      const ExamDocument pred = load_block_file(opts.preds[i].string());
      const ExamDocument gold = load_block_file(opts.golds[i].string());
      const std::string label = opts.preds[i].filename().string();
      if (opts.mode == "detection") {
        // Keep documents apart: matching never crosses pages.
        const int offset = static_cast<int>(i) * 1000000;
        for (const auto& b : pred.blocks) {
          Detection d{b.id, b.bbox, b.category, b.confidence.value_or(1.0)};
          d.bbox.page += offset;
          preds.push_back(d);
        }
        for (const auto& b : gold.blocks) {
          GroundTruth g{b.id, b.bbox, b.category};
          g.bbox.page += offset;
          gts.push_back(g);
        }
      } else if (opts.mode == "order") {
        OrderAnnotation a;
        if (!gold.annotations || gold.annotations->order.empty()) {
          throw MismatchedIdSets(opts.golds[i].string() + " has no gold reading order");
        }
        a.gold = order_from(gold.annotations->order);
        a.predicted = pred.annotations && !pred.annotations->order.empty() ? order_from(pred.annotations->order)
                                                                           : reading_order(pred.blocks);
        const double raw = ard_sum(a);
        const double norm = ard(a);
        ard_raw.push_back(raw);
        ard_norm.push_back(norm);
        char line[160];
        std::snprintf(line, sizeof line, "%s: ARD %.4f (sum %.1f over %zu blocks)\n", label.c_str(), norm, raw,
                      a.gold.size());
        out << line;
      } else {
        if (!gold.annotations || gold.annotations->level.empty()) {
          throw MismatchedIdSets(opts.golds[i].string() + " has no gold levels");
        }
        LevelAnnotation a;
        a.gold = gold.annotations->level;
        a.predicted = pred.annotations && !pred.annotations->level.empty()
                          ? pred.annotations->level
                          : block_levels(run_pipeline(pred, cfg.pipeline));
        for (const auto& id : gold_order(gold)) {
          if (a.gold.count(id)) a.order.push_back(id);
        }
        const HierarchyDistances d = hierarchy_distances(a);
        lvl_abs.push_back(d.abs_mean);
        lvl_rel.push_back(d.rel_mean);
        char line[160];
        std::snprintf(line, sizeof line, "%s: level distance abs %.4f rel %.4f\n", label.c_str(), d.abs_mean,
                      d.rel_mean);
        out << line;
      }
    }
    report.documents = opts.preds.size();
    if (opts.mode == "detection") {
      EvalReport det = detection_report(preds, gts);
      report.rows = std::move(det.rows);
    } else if (opts.mode == "order") {
      report.ard = summarize(ard_norm);
      report.ard_raw = summarize(ard_raw);
    } else {
      report.level_abs = summarize(lvl_abs);
      report.level_rel = summarize(lvl_rel);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  out << format_report_table(report);
  try {
    if (opts.json_out.has_parent_path()) fs::create_directories(opts.json_out.parent_path());
    write_file_atomic(opts.json_out, report_to_json(report));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

int cmd_filter(const FilterOptions& opts, const FileConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<ManifestEntry> entries;
  FilterConfig fc = cfg.filter.value_or(FilterConfig::defaults());
  try {
    if (opts.filter_config) fc = load_filter_config(opts.filter_config->string());
    std::ifstream in(opts.manifest, std::ios::binary);
    if (!in) throw Error("cannot read " + opts.manifest.string());
    entries = parse_manifest(in);
  } catch (const ManifestError& e) {
    err << opts.manifest.string() << ": " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  const auto after_url = filter_urls(entries, fc);
  const auto kept = filter_false_positives(after_url, fc);
  std::string lines;
  std::size_t needs_text = 0;
  for (const auto& e : kept) {
    json j = json::parse(serialize_manifest_entry(e));
    const FieldSuggestion s = suggest_study_field(e.text.value_or(""), fc);
    j["study_field"] = s.field ? json(*s.field) : json(nullptr);
    j["field_score"] = s.score;
    lines += j.dump() + "\n";
    needs_text += e.needs_text ? 1 : 0;
  }
  const json stats = {{"total", entries.size()},
                      {"dropped_url", entries.size() - after_url.size()},
                      {"dropped_false_positive", after_url.size() - kept.size()},
                      {"kept", kept.size()},
                      {"needs_text", needs_text}};
  if (opts.output) {
    if (opts.output->has_parent_path()) fs::create_directories(opts.output->parent_path());
    write_file_atomic(*opts.output, lines);
    out << stats.dump(2) << "\n";
  } else {
    out << lines;
    err << stats.dump(2) << "\n";
  }
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exam document accessibility conversion", "accsams"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");

  ConvertOptions conv;
  auto* convert = app.add_subcommand("convert", "Convert block files to accessible Markdown or HTML");
  convert->add_option("inputs", conv.inputs, "Block files or saved session states")->required()->check(CLI::ExistingFile);
  convert->add_option("--layout", conv.layout, "inline | end | separate");
  convert->add_option("--format", conv.format, "markdown | html");
  convert->add_option("-o,--output", conv.output_dir, "Output directory");
  convert->add_option("--alt-text-file", conv.alt_text_file, "JSON object mapping block ids to alt text")
      ->check(CLI::ExistingFile);
  convert->add_flag("--placeholder-alt-text", conv.placeholder_alt_text,
                    "Fill missing alt text with generated placeholders");
  convert->add_option("--heading-keywords", conv.heading_keywords, "JSON list of heading keywords")
      ->check(CLI::ExistingFile);
  convert->add_option("--solution-config", conv.solution_config, "Solution config JSON")->check(CLI::ExistingFile);
  convert->add_option("--solution-keywords", conv.solution_keywords, "Comma-separated solution keywords");
  convert->add_option("--max-heading-depth", conv.max_heading_depth, "Deepest heading level emitted (1-6)");
  bool no_assets = false;
  convert->add_flag("--no-assets", no_assets, "Do not crop figure assets from page rasters");

  EvaluateOptions eval;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold annotations");
  evaluate->add_option("--pred", eval.preds, "Predicted block file (repeatable)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--gold", eval.golds, "Gold block file (repeatable, paired with --pred)")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--mode", eval.mode, "detection | order | hierarchy")
      ->check(CLI::IsMember({"detection", "order", "hierarchy"}));
  evaluate->add_option("--json", eval.json_out, "Where to write the JSON report");

  FilterOptions filt;
  auto* filter = app.add_subcommand("filter", "Filter a crawl manifest down to exam candidates");
  filter->add_option("--manifest", filt.manifest, "JSON Lines manifest")->required();
  filter->add_option("--filter-config", filt.filter_config, "Filter config JSON")->check(CLI::ExistingFile);
  filter->add_option("-o,--output", filt.output, "Where to write kept entries (default stdout)");

  std::optional<std::string> data_dir, bind;
  std::optional<std::size_t> max_upload;
  auto* serve = app.add_subcommand("serve", "Run the review service");
  serve->add_option("--data-dir", data_dir, "Session storage directory");
  serve->add_option("--bind", bind, "host:port");
  serve->add_option("--max-upload", max_upload, "Upload limit in bytes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  FileConfig cfg;
  try {
    if (config_path) cfg = load_config(*config_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  if (*convert) {
    conv.write_assets = !no_assets;
    return cmd_convert(conv, cfg, out, err);
  }
  if (*evaluate) return cmd_evaluate(eval, cfg, out, err);
  if (*filter) return cmd_filter(filt, cfg, out, err);

  service::ServiceConfig sc;
  try {
    sc = service::ServiceConfig::from_env();
    if (cfg.data_dir) sc.data_dir = *cfg.data_dir;
    if (cfg.max_upload) sc.max_upload = *cfg.max_upload;
    if (data_dir) sc.data_dir = *data_dir;
    if (max_upload) sc.max_upload = *max_upload;
    if (auto b = bind ? bind : cfg.bind) {
      auto colon = b->rfind(':');
      if (colon == std::string::npos) {
        sc.port = std::stoi(*b);
      } else {
        sc.host = b->substr(0, colon);
        sc.port = std::stoi(b->substr(colon + 1));
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  sc.pipeline = cfg.pipeline;
  try {
    service::SessionStore store(sc);
    service::HttpServer server(store);
    err << "accsams: serving " << sc.data_dir.string() << " on " << sc.host << ":" << sc.port << "\n";
    server.run(sc.host, sc.port);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace accsams::cli
