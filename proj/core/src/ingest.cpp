#include "accsams/ingest.hpp"

#include <fstream>
#include <sstream>

#include "accsams/errors.hpp"
#include "json_io.hpp"

namespace accsams {

ExamDocument parse_block_file(std::string_view bytes) {
  ExamDocument doc = json_io::document_from_json(json_io::parse(bytes));
  auto violations = validate_document(doc);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return doc;
}

std::string serialize_block_file(const ExamDocument& doc) {
  return json_io::document_to_json(doc).dump(2) + "\n";
}

ExamDocument load_block_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read block file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_block_file(ss.str());
}

}  // namespace accsams
