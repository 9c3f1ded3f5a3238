#pragma once

// nlohmann/json bindings for the domain types. Internal to the core and
// service libraries; public headers stay free of the JSON dependency.

#include <string_view>

#include <json.hpp>

#include "accsams/model.hpp"
#include "accsams/structure.hpp"

namespace accsams::json_io {

using nlohmann::json;

/// Throws SyntaxError.
json parse(std::string_view bytes);

json document_to_json(const ExamDocument& doc);
/// Throws SchemaError; does not run validate_document().
ExamDocument document_from_json(const json& j);

json violation_to_json(const Violation& v);
json diagnostic_to_json(const Diagnostic& d);

json marker_to_json(const Marker& m);
json node_to_json(const TreeNode& n);
json tree_to_json(const DocTree& t);
/// Throws SchemaError. Accepts {"children": [...]} or {"root": {...}}.
DocTree tree_from_json(const json& j);

}  // namespace accsams::json_io
