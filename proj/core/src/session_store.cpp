#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#include "accsams/errors.hpp"
#include "accsams/export.hpp"
#include "accsams/ingest.hpp"
#include "accsams/service.hpp"
#include "json_io.hpp"

namespace accsams::service {

namespace fs = std::filesystem;
using json_io::json;

namespace {

std::string now_iso() {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::string new_token() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

ApiResponse json_response(int status, const json& body) { return {status, "application/json", body.dump(2) + "\n", {}}; }

ApiResponse error_response(int status, std::string_view type, const std::string& message, json extra = json::object()) {
  extra["error"] = type;
  extra["message"] = message;
  return json_response(status, extra);
}

ApiResponse not_found(const std::string& what) { return error_response(404, "NotFound", what + " not found"); }

SolutionOverrides overrides_of(const Session& s) {
  SolutionOverrides out;
  for (const auto& [bid, field] : s.pins) {
    if (field != "is_solution") continue;
    if (const ContentBlock* b = s.document.find_block(bid)) out[bid] = b->is_solution;
  }
  return out;
}

void sync_categories(TreeNode& n, const ExamDocument& doc) {
  if (!n.synthetic()) {
    if (const ContentBlock* b = doc.find_block(n.block_id)) n.category = b->category;
  }
  for (TreeNode& c : n.children) sync_categories(c, doc);
}

void clear_flags(TreeNode& n) {
  n.is_solution = false;
  for (TreeNode& c : n.children) clear_flags(c);
}

bool set_flag(TreeNode& n, const std::string& bid, bool value) {
  if (!n.synthetic() && (n.block_id == bid || (n.symbol_id && *n.symbol_id == bid))) {
    n.is_solution = value;
    return true;
  }
  for (TreeNode& c : n.children) {
    if (set_flag(c, bid, value)) return true;
  }
  return false;
}

// --- mutations; shared by the live path and log replay ---------------------

Session apply_create(ExamDocument doc, const std::string& id, const std::string& at, const PipelineConfig& cfg) {
  Session s;
  s.id = id;
  s.tree = run_pipeline(doc, cfg);
  s.document = std::move(doc);
  s.version = 1;
  s.created = at;
  s.updated = at;
  return s;
}

void apply_patch(Session& s, const std::string& bid, const json& fields, const std::string& at) {
  ContentBlock* b = s.document.find_block(bid);
  if (b == nullptr) throw Error("unknown block " + bid);
  for (auto it = fields.begin(); it != fields.end(); ++it) {
    const std::string& key = it.key();
    if (key == "category") {
      b->category = *parse_category(it.value().get<std::string>());
    } else if (key == "text") {
      b->text = it.value().is_null() ? std::nullopt : std::optional(it.value().get<std::string>());
    } else if (key == "alt_text") {
      b->alt_text = it.value().is_null() ? std::nullopt : std::optional(it.value().get<std::string>());
    } else if (key == "is_solution") {
      b->is_solution = it.value().get<bool>();
      set_flag(s.tree.root, bid, b->is_solution);
    }
    s.pins.insert({bid, key});
  }
  sync_categories(s.tree.root, s.document);
  ++s.version;
  s.updated = at;
}

void apply_hierarchy(Session& s, DocTree tree, const std::string& at, const PipelineConfig& cfg) {
  sync_categories(tree.root, s.document);
  refresh_order(tree);
  s.tree = detect_solutions(std::move(tree), s.document, cfg.solutions, overrides_of(s));
  s.hierarchy_pinned = true;
  ++s.version;
  s.updated = at;
}

void apply_recompute(Session& s, const std::string& at, const PipelineConfig& cfg) {
  if (s.hierarchy_pinned) {
    DocTree tree = std::move(s.tree);
    sync_categories(tree.root, s.document);
    clear_flags(tree.root);
    s.tree = detect_solutions(std::move(tree), s.document, cfg.solutions, overrides_of(s));
  } else {
    s.tree = run_pipeline(s.document, cfg, overrides_of(s));
  }
  ++s.version;
  s.updated = at;
}

json state_json(const Session& s) {
  json pins = json::array();
  for (const auto& [bid, field] : s.pins) pins.push_back({bid, field});
  json suggestions = json::object();
  const auto missing = missing_alt_text(s.tree, s.document);
  for (const auto& bid : missing) suggestions[bid] = placeholder_alt_text(bid, s.document);
  return {{"id", s.id},
          {"version", s.version},
          {"created", s.created},
          {"updated", s.updated},
          {"hierarchy_pinned", s.hierarchy_pinned},
          {"pins", pins},
          {"document", json_io::document_to_json(s.document)},
          {"tree", json_io::tree_to_json(s.tree)},
          {"missing_alt_text", missing},
          {"alt_text_suggestions", suggestions}};
}

std::optional<long long> expected_version(const json& body) {
  auto it = body.find("expected_version");
  if (it == body.end() || !it->is_number_integer()) return std::nullopt;
  return it->get<long long>();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& p, const std::string& content) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, p);
}

std::string mime_for(const fs::path& p) {
  std::string ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".tif" || ext == ".tiff") return "image/tiff";
  if (ext == ".webp") return "image/webp";
  return "application/octet-stream";
}

std::string file_stem(const ExamDocument& doc) {
  std::string stem = fs::path(doc.source.filename).stem().string();
  return stem.empty() ? "exam" : stem;
}

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig cfg;
  if (const char* dir = std::getenv("ACCSAMS_DATA_DIR"); dir && *dir) cfg.data_dir = dir;
  if (const char* max = std::getenv("ACCSAMS_MAX_UPLOAD"); max && *max) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(max, &end, 10);
    if (end == max || *end != '\0' || v == 0) throw ConfigError("ACCSAMS_MAX_UPLOAD must be a positive byte count");
    cfg.max_upload = static_cast<std::size_t>(v);
  }
  if (const char* bind = std::getenv("ACCSAMS_BIND"); bind && *bind) {
    std::string b = bind;
    auto colon = b.rfind(':');
    try {
      if (colon == std::string::npos) {
        cfg.port = std::stoi(b);
      } else {
        cfg.host = b.substr(0, colon);
        cfg.port = std::stoi(b.substr(colon + 1));
      }
    } catch (const std::exception&) {
      throw ConfigError("ACCSAMS_BIND must be host:port or port");
    }
  }
  return cfg;
}

std::string session_to_json(const Session& s) { return state_json(s).dump(2) + "\n"; }

Session session_from_json(std::string_view bytes) {
  const json j = json_io::parse(bytes);
  if (!j.is_object()) throw SchemaError("session state must be an object");
  Session s;
  try {
    s.id = j.at("id").get<std::string>();
    s.version = j.at("version").get<long long>();
    s.created = j.at("created").get<std::string>();
    s.updated = j.at("updated").get<std::string>();
    s.hierarchy_pinned = j.at("hierarchy_pinned").get<bool>();
    for (const auto& p : j.at("pins")) s.pins.insert({p.at(0).get<std::string>(), p.at(1).get<std::string>()});
  } catch (const json::exception& e) {
    throw SchemaError(std::string("session state: ") + e.what());
  }
  s.document = json_io::document_from_json(j.at("document"));
  s.tree = json_io::tree_from_json(j.at("tree"));
  if (auto d = j["tree"].find("diagnostics"); d != j["tree"].end()) {
    for (const auto& dj : *d) {
      s.tree.diagnostics.push_back({dj.value("code", ""),
                                    dj["block_id"].is_string() ? std::optional(dj["block_id"].get<std::string>()) : std::nullopt,
                                    dj.value("message", "")});
    }
  }
  return s;
}

SessionStore::SessionStore(ServiceConfig cfg) : cfg_(std::move(cfg)) {
  fs::create_directories(cfg_.data_dir);
  for (const auto& entry : fs::directory_iterator(cfg_.data_dir)) {
    const fs::path state = entry.path() / "state.json";
    if (!entry.is_directory() || !fs::exists(state)) continue;
    auto slot = std::make_shared<Slot>();
    slot->session = session_from_json(read_file(state));
    sessions_[slot->session.id] = slot;
  }
}

std::shared_ptr<SessionStore::Slot> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

fs::path SessionStore::session_dir(const std::string& id) const { return cfg_.data_dir / id; }

void SessionStore::persist(const Session& s, const std::string& log_line) const {
  const fs::path dir = session_dir(s.id);
  fs::create_directories(dir);
  {
    std::ofstream log(dir / "log.jsonl", std::ios::binary | std::ios::app);
    if (!log) throw Error("cannot append to session log");
    log << log_line << "\n";
  }
  write_atomic(dir / "state.json", session_to_json(s));
}

ApiResponse SessionStore::create(std::string_view body) {
  if (body.size() > cfg_.max_upload) {
    return error_response(413, "PayloadTooLarge", "upload exceeds " + std::to_string(cfg_.max_upload) + " bytes");
  }
  ExamDocument doc;
  try {
    doc = parse_block_file(body);
  } catch (const SyntaxError& e) {
    return error_response(400, "SyntaxError", e.what());
  } catch (const SchemaError& e) {
    return error_response(400, "SchemaError", e.what());
  } catch (const ValidationError& e) {
    json violations = json::array();
    for (const auto& v : e.violations()) violations.push_back(json_io::violation_to_json(v));
    return error_response(400, "ValidationError", e.what(), {{"violations", violations}});
  }

  const std::string at = now_iso();
  auto slot = std::make_shared<Slot>();
  {
    std::unique_lock lock(mutex_);
    std::string id;
    do {
      id = new_token();
    } while (sessions_.count(id) || fs::exists(session_dir(id)));
    slot->session = apply_create(doc, id, at, cfg_.pipeline);
    sessions_[id] = slot;
  }
  std::unique_lock lock(slot->mutex);
  const Session& s = slot->session;
  const fs::path pages = session_dir(s.id) / "pages";
  fs::create_directories(pages);
  for (const Page& p : s.document.pages) {
    if (!p.image) continue;
    std::error_code ec;
    const fs::path src = *p.image;
    if (fs::is_regular_file(src, ec)) {
      fs::copy_file(src, pages / (std::to_string(p.index) + src.extension().string()),
                    fs::copy_options::overwrite_existing, ec);
    }
  }
  json entry = {{"op", "create"}, {"at", at}, {"id", s.id}, {"document", json_io::document_to_json(s.document)}};
  persist(s, entry.dump());
  return json_response(201, state_json(s));
}

ApiResponse SessionStore::list() const {
  json out = json::array();
  std::shared_lock lock(mutex_);
  for (const auto& [id, slot] : sessions_) {
    std::shared_lock slock(slot->mutex);
    out.push_back({{"id", id},
                   {"filename", slot->session.document.source.filename},
                   {"version", slot->session.version},
                   {"updated", slot->session.updated}});
  }
  return json_response(200, out);
}

ApiResponse SessionStore::get(const std::string& id) const {
  auto slot = find(id);
  if (!slot) return not_found("session " + id);
  std::shared_lock lock(slot->mutex);
  return json_response(200, state_json(slot->session));
}

ApiResponse SessionStore::patch_block(const std::string& id, const std::string& block_id, std::string_view body) {
  auto slot = find(id);
  if (!slot) return not_found("session " + id);
  json j;
  try {
    j = json_io::parse(body);
  } catch (const SyntaxError& e) {
    return error_response(400, "SyntaxError", e.what());
  }
  if (!j.is_object()) return error_response(400, "SchemaError", "body must be a JSON object");
  const auto expected = expected_version(j);
  if (!expected) return error_response(400, "SchemaError", "expected_version (integer) is required");

  json fields = json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "expected_version") continue;
    const json& v = it.value();
    if (key == "category") {
      if (!v.is_string()) return error_response(400, "SchemaError", "category must be a string");
      if (!parse_category(v.get<std::string>())) {
        return error_response(422, "InvalidCategory", "unknown category '" + v.get<std::string>() + "'");
      }
    } else if (key == "text" || key == "alt_text") {
      if (!v.is_string() && !v.is_null()) return error_response(400, "SchemaError", key + " must be a string or null");
    } else if (key == "is_solution") {
      if (!v.is_boolean()) return error_response(400, "SchemaError", "is_solution must be a boolean");
    } else {
      return error_response(400, "SchemaError", "field '" + key + "' cannot be patched");
    }
    fields[key] = v;
  }
  if (fields.empty()) return error_response(400, "SchemaError", "no patchable fields given");

  std::unique_lock lock(slot->mutex);
  Session& s = slot->session;
  if (s.document.find_block(block_id) == nullptr) return not_found("block " + block_id);
  if (*expected != s.version) {
    return error_response(409, "VersionConflict", "session is at version " + std::to_string(s.version),
                          {{"version", s.version}});
  }
  const std::string at = now_iso();
  apply_patch(s, block_id, fields, at);
  json entry = {{"op", "patch"}, {"at", at}, {"block_id", block_id}, {"fields", fields}};
  persist(s, entry.dump());
  return json_response(200, state_json(s));
}

ApiResponse SessionStore::put_hierarchy(const std::string& id, std::string_view body) {
  auto slot = find(id);
  if (!slot) return not_found("session " + id);
  json j;
  try {
    j = json_io::parse(body);
  } catch (const SyntaxError& e) {
    return error_response(400, "SyntaxError", e.what());
  }
  if (!j.is_object()) return error_response(400, "SchemaError", "body must be a JSON object");
  const auto expected = expected_version(j);
  if (!expected) return error_response(400, "SchemaError", "expected_version (integer) is required");
  DocTree tree;
  try {
    tree = json_io::tree_from_json(j.contains("tree") ? j["tree"] : j);
  } catch (const SchemaError& e) {
    return error_response(400, "SchemaError", e.what());
  }

  std::unique_lock lock(slot->mutex);
  Session& s = slot->session;
  if (*expected != s.version) {
    return error_response(409, "VersionConflict", "session is at version " + std::to_string(s.version),
                          {{"version", s.version}});
  }
  try {
    std::function<void(const TreeNode&)> no_synthetic = [&](const TreeNode& n) {
      if (n.synthetic()) throw InvalidTree("hierarchy may only contain document blocks");
      for (const auto& c : n.children) no_synthetic(c);
    };
    for (const auto& c : tree.root.children) no_synthetic(c);
    check_tree(tree, s.document);
  } catch (const InvalidTree& e) {
    return error_response(422, "InvalidTree", e.what());
  }
  const std::string at = now_iso();
  tree.diagnostics.clear();
  apply_hierarchy(s, std::move(tree), at, cfg_.pipeline);
  json entry = {{"op", "hierarchy"}, {"at", at}, {"tree", json_io::tree_to_json(s.tree)}};
  persist(s, entry.dump());
  return json_response(200, state_json(s));
}

ApiResponse SessionStore::recompute(const std::string& id, std::string_view body) {
  auto slot = find(id);
  if (!slot) return not_found("session " + id);
  json j;
  try {
    j = json_io::parse(body);
  } catch (const SyntaxError& e) {
    return error_response(400, "SyntaxError", e.what());
  }
  const auto expected = j.is_object() ? expected_version(j) : std::nullopt;
  if (!expected) return error_response(400, "SchemaError", "expected_version (integer) is required");

  std::unique_lock lock(slot->mutex);
  Session& s = slot->session;
  if (*expected != s.version) {
    return error_response(409, "VersionConflict", "session is at version " + std::to_string(s.version),
                          {{"version", s.version}});
  }
  const std::string at = now_iso();
  apply_recompute(s, at, cfg_.pipeline);
  json entry = {{"op", "recompute"}, {"at", at}};
  persist(s, entry.dump());
  return json_response(200, state_json(s));
}

ApiResponse SessionStore::export_session(const std::string& id, std::string_view body) const {
  auto slot = find(id);
  if (!slot) return not_found("session " + id);
  ExportOptions opts;
  opts.solutions = cfg_.pipeline.solutions;
  if (!body.empty()) {
    json j;
    try {
      j = json_io::parse(body);
    } catch (const SyntaxError& e) {
      return error_response(400, "SyntaxError", e.what());
    }
    if (!j.is_object()) return error_response(400, "SchemaError", "body must be a JSON object");
    if (auto it = j.find("layout"); it != j.end()) {
      auto layout = it->is_string() ? parse_layout(it->get<std::string>()) : std::nullopt;
      if (!layout) return error_response(400, "SchemaError", "unknown layout");
      opts.layout = *layout;
    }
    if (auto it = j.find("format"); it != j.end()) {
      auto format = it->is_string() ? parse_format(it->get<std::string>()) : std::nullopt;
      if (!format) return error_response(400, "SchemaError", "unknown format");
      opts.format = *format;
    }
  }

  std::shared_lock lock(slot->mutex);
  const Session& s = slot->session;
  ExportResult result;
  try {
    result = export_document(s.tree, s.document, opts);
  } catch (const MissingAltText& e) {
    return error_response(422, "MissingAltText", e.what(), {{"block_ids", e.block_ids()}});
  }
  const std::string ext(file_extension(opts.format));
  ApiResponse r;
  if (result.solutions) {
    r.content_type = "application/x-tar";
    r.body = make_tar({{"questions." + ext, result.primary}, {"solutions." + ext, *result.solutions}});
    r.headers["Content-Disposition"] = "attachment; filename=\"" + file_stem(s.document) + ".tar\"";
  } else {
    r.content_type = opts.format == ExportFormat::html ? "text/html; charset=utf-8" : "text/markdown; charset=utf-8";
    r.body = result.primary;
    r.headers["Content-Disposition"] = "attachment; filename=\"" + file_stem(s.document) + "." + ext + "\"";
  }
  if (!result.warnings.empty()) {
    std::string codes;
    for (const auto& w : result.warnings) codes += (codes.empty() ? "" : ",") + w.code;
    r.headers["X-Accsams-Warnings"] = codes;
  }
  return r;
}

ApiResponse SessionStore::page_image(const std::string& id, int page) const {
  auto slot = find(id);
  if (!slot) return not_found("session " + id);
  const fs::path dir = session_dir(id) / "pages";
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().stem() == std::to_string(page)) {
        return {200, mime_for(entry.path()), read_file(entry.path()), {}};
      }
    }
  }
  return not_found("raster for page " + std::to_string(page));
}

std::optional<Session> SessionStore::snapshot(const std::string& id) const {
  auto slot = find(id);
  if (!slot) return std::nullopt;
  std::shared_lock lock(slot->mutex);
  return slot->session;
}

Session SessionStore::replay(const std::string& id) const {
  std::ifstream in(session_dir(id) / "log.jsonl", std::ios::binary);
  if (!in) throw Error("no log for session " + id);
  std::optional<Session> s;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json e = json::parse(line);
    const std::string op = e.at("op").get<std::string>();
    const std::string at = e.at("at").get<std::string>();
    if (op == "create") {
      s = apply_create(json_io::document_from_json(e.at("document")), e.at("id").get<std::string>(), at, cfg_.pipeline);
      continue;
    }
    if (!s) throw Error("session log does not start with create");
    if (op == "patch") {
      apply_patch(*s, e.at("block_id").get<std::string>(), e.at("fields"), at);
    } else if (op == "hierarchy") {
      DocTree t = json_io::tree_from_json(e.at("tree"));
      apply_hierarchy(*s, std::move(t), at, cfg_.pipeline);
    } else if (op == "recompute") {
      apply_recompute(*s, at, cfg_.pipeline);
    } else {
      throw Error("unknown log op '" + op + "'");
    }
  }
  if (!s) throw Error("empty session log");
  return *s;
}

std::string make_tar(const std::vector<std::pair<std::string, std::string>>& files) {
  std::string out;
  for (const auto& [name, content] : files) {
    std::array<char, 512> h{};
    auto put = [&](std::size_t off, std::size_t len, const std::string& v) {
      std::copy_n(v.data(), std::min(len, v.size()), h.data() + off);
    };
    auto octal = [](unsigned long long v, int width) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%0*llo", width, v);
      return std::string(buf);
    };
    put(0, 100, name);
    put(100, 8, octal(0644, 7));
    put(108, 8, octal(0, 7));
    put(116, 8, octal(0, 7));
    put(124, 12, octal(content.size(), 11));
    put(136, 12, octal(0, 11));
    std::fill_n(h.data() + 148, 8, ' ');
    h[156] = '0';
    put(257, 6, std::string("ustar\0", 6));
    put(263, 2, "00");
    unsigned sum = 0;
    for (char c : h) sum += static_cast<unsigned char>(c);
    put(148, 8, octal(sum, 6));
    h[154] = '\0';
    h[155] = ' ';
    out.append(h.data(), h.size());
    out += content;
    out.append((512 - content.size() % 512) % 512, '\0');
  }
  out.append(1024, '\0');
  return out;
}

}  // namespace accsams::service
