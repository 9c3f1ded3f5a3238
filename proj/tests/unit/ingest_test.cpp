#include <gtest/gtest.h>

#include <random>

#include "accsams/errors.hpp"
#include "accsams/ingest.hpp"
#include "helpers.hpp"
#include "synthetic.hpp"

namespace accsams {
namespace {

constexpr const char* kMinimal = R"({
  "version": 1,
  "source": {"filename": "a.pdf", "language": "en"},
  "pages": [{"index": 0, "width": 595, "height": 842, "image": null}],
  "blocks": [{"id": "p1", "page": 0, "bbox": [10, 10, 100, 30], "category": "paragraph",
              "text": "Hello", "confidence": 0.9, "color_accent": false, "font_size": 11,
              "alt_text": null, "is_solution": false}],
  "annotations": null
})";

std::string with_block(const std::string& block_json) {
  return R"({"version": 1, "source": {"filename": "a.pdf", "language": "en"},
    "pages": [{"index": 0, "width": 595, "height": 842, "image": null}],
    "blocks": [)" +
         block_json + R"(], "annotations": null})";
}

TEST(ParseBlockFile, MinimalDocument) {
  const ExamDocument doc = parse_block_file(kMinimal);
  ASSERT_EQ(doc.pages.size(), 1u);
  ASSERT_EQ(doc.blocks.size(), 1u);
  const ContentBlock& b = doc.blocks[0];
  EXPECT_EQ(b.id, "p1");
  EXPECT_EQ(b.category, BlockCategory::paragraph);
  EXPECT_EQ(b.bbox, (BBox{0, 10, 10, 100, 30}));
  EXPECT_EQ(b.text, "Hello");
  EXPECT_EQ(b.confidence, 0.9);
  EXPECT_EQ(b.font_size, 11.0);
  EXPECT_FALSE(b.alt_text);
  EXPECT_FALSE(doc.annotations);
  EXPECT_EQ(doc.source.language, "en");
}

TEST(ParseBlockFile, UnknownCategoryIsSchemaErrorNamingValue) {
  const std::string bad = with_block(
      R"({"id": "x", "page": 0, "bbox": [1, 1, 2, 2], "category": "image", "text": null, "confidence": null,
          "color_accent": false, "font_size": null, "alt_text": null, "is_solution": false})");
  try {
    parse_block_file(bad);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("image"), std::string::npos);
  }
}

TEST(ParseBlockFile, MalformedJsonIsSyntaxError) {
  EXPECT_THROW(parse_block_file("{\"version\": 1,"), SyntaxError);
  EXPECT_THROW(parse_block_file(""), SyntaxError);
}

TEST(ParseBlockFile, WrongTypesAreSchemaErrors) {
  EXPECT_THROW(parse_block_file(R"({"version": 1})"), SchemaError);
  EXPECT_THROW(parse_block_file(with_block(R"({"id": 3, "page": 0, "bbox": [1, 1, 2, 2], "category": "paragraph"})")),
               SchemaError);
  EXPECT_THROW(parse_block_file(with_block(R"({"id": "a", "page": 0, "bbox": [1, 1, 2], "category": "paragraph"})")),
               SchemaError);
  EXPECT_THROW(
      parse_block_file(with_block(R"({"id": "a", "page": 0, "bbox": [1, 1, 2, 2], "category": "paragraph", "confidence": 2})")),
      SchemaError);
}

TEST(ParseBlockFile, DuplicateIdsAreValidationError) {
  const std::string blk =
      R"({"id": "b1", "page": 0, "bbox": [1, 1, 20, 20], "category": "paragraph", "text": "a", "confidence": null,
          "color_accent": false, "font_size": null, "alt_text": null, "is_solution": false})";
  try {
    parse_block_file(with_block(blk + "," + blk));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_FALSE(e.violations().empty());
    EXPECT_EQ(e.violations()[0].code, violation::kDuplicateId);
  }
}

TEST(ParseBlockFile, NullableFieldsMayBeOmitted) {
  const ExamDocument doc =
      parse_block_file(with_block(R"({"id": "a", "page": 0, "bbox": [1, 1, 20, 20], "category": "figure"})"));
  EXPECT_FALSE(doc.blocks[0].text);
  EXPECT_FALSE(doc.blocks[0].color_accent);
  EXPECT_FALSE(doc.blocks[0].is_solution);
}

TEST(SerializeBlockFile, RoundTripsFixtures) {
  for (const char* name : {"exam_basic.json", "exam_multilevel.json", "exam_bare_figure.json", "order_gold.json"}) {
    const ExamDocument doc = load_block_file(testing::fixture(name));
    const std::string bytes = serialize_block_file(doc);
    EXPECT_EQ(parse_block_file(bytes), doc) << name;
    EXPECT_EQ(serialize_block_file(parse_block_file(bytes)), bytes) << name;
    EXPECT_EQ(bytes.back(), '\n');
  }
}

TEST(SerializeBlockFile, RoundTripsGeneratedDocuments) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const auto ex = testing::generate_exam(rng);
    EXPECT_EQ(parse_block_file(serialize_block_file(ex.doc)), ex.doc);
  }
}

TEST(SerializeBlockFile, KeepsNonAsciiText) {
  auto doc = testing::make_doc({testing::para("a", "Lösung für Übung ½", 100)}, 1, "de");
  EXPECT_EQ(parse_block_file(serialize_block_file(doc)).blocks[0].text, "Lösung für Übung ½");
}

}  // namespace
}  // namespace accsams
