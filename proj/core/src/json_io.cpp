#include "json_io.hpp"

#include <cmath>
#include <string>

#include "accsams/errors.hpp"

namespace accsams::json_io {

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  throw SchemaError(where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) schema(where, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) schema(where, std::string("field '") + key + "' must be a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) schema(where, std::string("field '") + key + "' must be finite");
  return d;
}

int get_int(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) schema(where, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

// Nullable fields may be absent or null.
std::optional<std::string> opt_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) schema(where, std::string("field '") + key + "' must be a string or null");
  return it->get<std::string>();
}

std::optional<double> opt_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) schema(where, std::string("field '") + key + "' must be a number or null");
  return it->get<double>();
}

bool opt_bool(const json& obj, const char* key, const std::string& where, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) schema(where, std::string("field '") + key + "' must be a boolean");
  return it->get<bool>();
}

json nullable(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }
json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::map<std::string, int> id_int_map(const json& j, const std::string& where) {
  std::map<std::string, int> out;
  if (j.is_null()) return out;
  if (!j.is_object()) schema(where, "must be an object mapping block id to integer");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number_integer()) schema(where, "value for '" + it.key() + "' must be an integer");
    out[it.key()] = it.value().get<int>();
  }
  return out;
}

Marker marker_from_json(const json& j, const std::string& where) {
  Marker m;
  if (j.is_null()) return m;
  if (!j.is_object()) schema(where, "marker must be an object");
  auto style = parse_marker_style(get_string(j, "style", where));
  if (!style) schema(where, "unknown marker style");
  m.style = *style;
  if (auto it = j.find("value"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) schema(where, "marker value must be an integer");
    m.value = it->get<int>();
  }
  if (j.contains("depth")) m.depth = get_int(j, "depth", where);
  m.literal = opt_string(j, "literal", where).value_or("");
  return m;
}

TreeNode node_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) schema(where, "tree node must be an object");
  TreeNode n;
  n.block_id = opt_string(j, "block_id", where).value_or("");
  n.symbol_id = opt_string(j, "symbol_id", where);
  if (auto cat = opt_string(j, "category", where)) {
    auto parsed = parse_category(*cat);
    if (!parsed) schema(where, "unknown category '" + *cat + "'");
    n.category = *parsed;
  } else {
    n.category = BlockCategory::heading;
  }
  n.level = get_int(j, "level", where);
  n.is_solution = opt_bool(j, "is_solution", where, false);
  n.label = opt_string(j, "label", where);
  if (auto it = j.find("marker"); it != j.end()) n.marker = marker_from_json(*it, where);
  if (auto it = j.find("children"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) schema(where, "children must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      n.children.push_back(node_from_json((*it)[i], where + ".children[" + std::to_string(i) + "]"));
    }
  }
  return n;
}

}  // namespace

json parse(std::string_view bytes) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw SyntaxError(e.what());
  }
}

json document_to_json(const ExamDocument& doc) {
  json pages = json::array();
  for (const Page& p : doc.pages) {
    pages.push_back({{"index", p.index}, {"width", p.width}, {"height", p.height}, {"image", nullable(p.image)}});
  }
  json blocks = json::array();
  for (const ContentBlock& b : doc.blocks) {
    blocks.push_back({{"id", b.id},
                      {"page", b.bbox.page},
                      {"bbox", {b.bbox.x0, b.bbox.y0, b.bbox.x1, b.bbox.y1}},
                      {"category", to_string(b.category)},
                      {"text", nullable(b.text)},
                      {"confidence", nullable(b.confidence)},
                      {"color_accent", b.color_accent},
                      {"font_size", nullable(b.font_size)},
                      {"alt_text", nullable(b.alt_text)},
                      {"is_solution", b.is_solution}});
  }
  json annotations = nullptr;
  if (doc.annotations) {
    annotations = {{"order", doc.annotations->order}, {"level", doc.annotations->level}};
  }
  return {{"version", doc.version},
          {"source", {{"filename", doc.source.filename}, {"language", doc.source.language}}},
          {"pages", pages},
          {"blocks", blocks},
          {"annotations", annotations}};
}

ExamDocument document_from_json(const json& j) {
  const std::string top = "document";
  if (!j.is_object()) schema(top, "top level must be an object");
  ExamDocument doc;
  doc.version = get_int(j, "version", top);
  if (doc.version != 1) schema(top, "unsupported version " + std::to_string(doc.version));

  const json& src = field(j, "source", top);
  if (!src.is_object()) schema("source", "must be an object");
  doc.source.filename = get_string(src, "filename", "source");
  doc.source.language = get_string(src, "language", "source");

  const json& pages = field(j, "pages", top);
  if (!pages.is_array()) schema(top, "field 'pages' must be an array");
  for (std::size_t i = 0; i < pages.size(); ++i) {
    const std::string where = "pages[" + std::to_string(i) + "]";
    const json& pj = pages[i];
    if (!pj.is_object()) schema(where, "must be an object");
    Page p;
    p.index = get_int(pj, "index", where);
    p.width = get_number(pj, "width", where);
    p.height = get_number(pj, "height", where);
    p.image = opt_string(pj, "image", where);
    doc.pages.push_back(std::move(p));
  }

  const json& blocks = field(j, "blocks", top);
  if (!blocks.is_array()) schema(top, "field 'blocks' must be an array");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    std::string where = "blocks[" + std::to_string(i) + "]";
    const json& bj = blocks[i];
    if (!bj.is_object()) schema(where, "must be an object");
    ContentBlock b;
    b.id = get_string(bj, "id", where);
    where += " (" + b.id + ")";
    b.bbox.page = get_int(bj, "page", where);
    const json& box = field(bj, "bbox", where);
    if (!box.is_array() || box.size() != 4) schema(where, "bbox must be an array [x0, y0, x1, y1]");
    for (const json& v : box) {
      if (!v.is_number()) schema(where, "bbox entries must be numbers");
    }
    b.bbox.x0 = box[0].get<double>();
    b.bbox.y0 = box[1].get<double>();
    b.bbox.x1 = box[2].get<double>();
    b.bbox.y1 = box[3].get<double>();
    const std::string cat = get_string(bj, "category", where);
    auto parsed = parse_category(cat);
    if (!parsed) schema(where, "unknown category '" + cat + "'");
    b.category = *parsed;
    b.text = opt_string(bj, "text", where);
    b.confidence = opt_number(bj, "confidence", where);
    if (b.confidence && (*b.confidence < 0.0 || *b.confidence > 1.0)) schema(where, "confidence must lie in [0, 1]");
    b.color_accent = opt_bool(bj, "color_accent", where, false);
    b.font_size = opt_number(bj, "font_size", where);
    if (b.font_size && !(*b.font_size > 0.0)) schema(where, "font_size must be positive");
    b.alt_text = opt_string(bj, "alt_text", where);
    b.is_solution = opt_bool(bj, "is_solution", where, false);
    doc.blocks.push_back(std::move(b));
  }

  if (auto it = j.find("annotations"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) schema("annotations", "must be an object or null");
    Annotations a;
    if (auto o = it->find("order"); o != it->end()) a.order = id_int_map(*o, "annotations.order");
    if (auto l = it->find("level"); l != it->end()) a.level = id_int_map(*l, "annotations.level");
    doc.annotations = std::move(a);
  }
  return doc;
}

json violation_to_json(const Violation& v) {
  return {{"code", v.code}, {"block_id", nullable(v.block_id)}, {"message", v.message}};
}

json diagnostic_to_json(const Diagnostic& d) {
  return {{"code", d.code}, {"block_id", nullable(d.block_id)}, {"message", d.message}};
}

json marker_to_json(const Marker& m) {
  return {{"style", to_string(m.style)},
          {"value", m.value ? json(*m.value) : json(nullptr)},
          {"depth", m.depth},
          {"literal", m.literal}};
}

json node_to_json(const TreeNode& n) {
  json children = json::array();
  for (const TreeNode& c : n.children) children.push_back(node_to_json(c));
  return {{"block_id", n.synthetic() ? json(nullptr) : json(n.block_id)},
          {"symbol_id", nullable(n.symbol_id)},
          {"category", to_string(n.category)},
          {"level", n.level},
          {"is_solution", n.is_solution},
          {"marker", marker_to_json(n.marker)},
          {"label", nullable(n.label)},
          {"children", children}};
}

json tree_to_json(const DocTree& t) {
  json children = json::array();
  for (const TreeNode& c : t.root.children) children.push_back(node_to_json(c));
  json diags = json::array();
  for (const Diagnostic& d : t.diagnostics) diags.push_back(diagnostic_to_json(d));
  return {{"children", children}, {"ordered", t.ordered}, {"diagnostics", diags}};
}

DocTree tree_from_json(const json& j) {
  if (!j.is_object()) schema("tree", "must be an object");
  DocTree t;
  const json* children = nullptr;
  if (auto it = j.find("root"); it != j.end()) {
    if (!it->is_object()) schema("tree.root", "must be an object");
    auto c = it->find("children");
    if (c == it->end()) schema("tree.root", "missing field 'children'");
    children = &*c;
  } else {
    children = &field(j, "children", "tree");
  }
  if (!children->is_array()) schema("tree", "children must be an array");
  for (std::size_t i = 0; i < children->size(); ++i) {
    t.root.children.push_back(node_from_json((*children)[i], "tree.children[" + std::to_string(i) + "]"));
  }
  refresh_order(t);
  return t;
}

}  // namespace accsams::json_io
