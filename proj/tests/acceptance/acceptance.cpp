// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "accsams/export.hpp"
#include "accsams/ingest.hpp"
#include "accsams/metrics.hpp"
#include "accsams/pipeline.hpp"
#include "accsams/service.hpp"
#include "cli.hpp"
#include "support/oracles.hpp"
#include "support/properties.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace accsams;

namespace {

// Tolerances.
constexpr double kApFixture = 0.8350;
constexpr double kApTolerance = 0.0005;
constexpr double kReportTolerance = 1e-9;
constexpr double kPermutationBudgetSeconds = 1.0;
constexpr int kPermutations = 1000;
constexpr int kMaxPermutationLength = 10;
constexpr int kSyntheticExams = 240;

const std::string kFixtures = ACCSAMS_FIXTURE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

int failures = 0;

void report(const std::string& name, const Outcome& o) {
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << (o.detail.empty() ? "" : "  (" + o.detail + ")")
            << std::endl;
  if (!o.pass) ++failures;
}

fs::path scratch_dir() {
  std::random_device rd;
  fs::path p = fs::temp_directory_path() / ("accsams-acceptance-" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

// --- metric oracles --------------------------------------------------------

Outcome metric_oracles() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  const auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (int i = 0; i < kPermutations; ++i) {
    const int n = std::uniform_int_distribution<int>(1, kMaxPermutationLength)(rng);
    std::vector<std::string> gold;
    for (int k = 0; k < n; ++k) gold.push_back("b" + std::to_string(k));
    auto pred = gold;
    std::shuffle(pred.begin(), pred.end(), rng);
    if (ard_sum({gold, pred}) != testing::oracle_ard_sum(gold, pred)) ++mismatches;
    if (ard({gold, pred}) != testing::oracle_ard_sum(gold, pred) / n) ++mismatches;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (mismatches) o.fail(std::to_string(mismatches) + " ARD mismatches against the displacement oracle");
  if (secs >= kPermutationBudgetSeconds) o.fail("permutation run took " + std::to_string(secs) + " s");

  const std::vector<BBox> gts{{0, 0, 0, 10, 10}, {0, 20, 0, 30, 10}};
  const std::vector<Detection> preds{{"a", gts[0], BlockCategory::table, 0.9},
                                     {"b", {0, 50, 50, 60, 60}, BlockCategory::table, 0.8},
                                     {"c", gts[1], BlockCategory::table, 0.7}};
  const double ap = average_precision(preds, gts, 0.5);
  const double hand = (51 * 1.0 + 50 * (2.0 / 3.0)) / 101.0;
  if (std::abs(ap - kApFixture) > kApTolerance) o.fail("AP " + std::to_string(ap));
  if (std::abs(ap - hand) > kReportTolerance) o.fail("AP differs from the hand envelope");

  // Ten ground-truth boxes over three categories with shifted, missing and
  // spurious predictions.
  std::vector<GroundTruth> g;
  std::vector<Detection> p;
  const BlockCategory cats[] = {BlockCategory::heading, BlockCategory::paragraph, BlockCategory::figure};
  for (int i = 0; i < 10; ++i) {
    const double x = 20.0 * i, y = 15.0 * (i % 4);
    const BBox b{i % 2, x, y, x + 18, y + 12};
    g.push_back({"g" + std::to_string(i), b, cats[i % 3]});
    if (i % 5 != 4) {
      const double dx = (i % 3) * 2.5;
      p.push_back({"p" + std::to_string(i), {b.page, x + dx, y + 1, x + 18 + dx, y + 13}, cats[i % 3],
                   0.95 - 0.07 * i});
    }
  }
  p.push_back({"x1", {0, 300, 300, 320, 320}, BlockCategory::heading, 0.85});
  p.push_back({"x2", {1, 2, 2, 19, 13}, BlockCategory::figure, 0.6});
  p.push_back({"x3", {0, 0, 0, 5, 5}, BlockCategory::table, 0.4});
  testing::OracleRow all;
  const auto want = testing::oracle_detection_rows(p, g, all);
  const auto got = detection_report(p, g);
  if (got.rows.size() != want.size() + 1) {
    o.fail("report has " + std::to_string(got.rows.size()) + " rows");
  } else {
    double worst = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) {
      for (auto [a, b] : {std::pair{got.rows[i].precision, want[i].precision}, {got.rows[i].recall, want[i].recall},
                          {got.rows[i].ap50, want[i].ap50}, {got.rows[i].ap50_95, want[i].ap50_95}}) {
        worst = std::max(worst, std::abs(a - b));
      }
    }
    const auto& last = got.rows.back();
    for (auto [a, b] : {std::pair{last.precision, all.precision}, {last.recall, all.recall}, {last.ap50, all.ap50},
                        {last.ap50_95, all.ap50_95}}) {
      worst = std::max(worst, std::abs(a - b));
    }
    if (worst > kReportTolerance) o.fail("detection report deviates by " + std::to_string(worst));
  }
  if (o.pass) {
    std::ostringstream d;
    d << kPermutations << " permutations in " << secs << " s, AP " << ap;
    o.detail = d.str();
  }
  return o;
}

// --- synthetic property suite ---------------------------------------------

std::vector<testing::SyntheticExam> exams() {
  std::vector<testing::SyntheticExam> out;
  std::mt19937_64 rng(7);
  for (int i = 0; i < kSyntheticExams; ++i) {
    testing::GeneratorOptions o;
    if (i % 4 == 3) {
      o.keyword_solution_probability = 0.9;
      o.color_solution_probability = 0.7;
      o.distractor_probability = 0.5;
    }
    out.push_back(testing::generate_exam(rng, o));
  }
  return out;
}

Outcome property_suite(const std::vector<testing::SyntheticExam>& all) {
  Outcome o;
  std::size_t seeded = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    seeded += all[i].gold_solutions.size();
    for (auto part : {testing::check_structure(all[i]), testing::check_solutions(all[i]),
                      testing::check_reposition(all[i])}) {
      if (!part.empty()) o.fail("exam " + std::to_string(i) + ": " + part.front());
    }
  }
  if (o.pass) o.detail = std::to_string(all.size()) + " exams, " + std::to_string(seeded) + " seeded solution blocks";
  return o;
}

// --- Markdown round trip --------------------------------------------------

Outcome round_trip(const std::vector<testing::SyntheticExam>& all) {
  Outcome o;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto f = testing::check_markdown_round_trip(all[i]);
    if (!f.empty()) o.fail("exam " + std::to_string(i) + ": " + f.front());
  }
  for (const char* name : {"exam_basic.json", "exam_multilevel.json", "exam_bare_figure.json"}) {
    testing::SyntheticExam ex;
    ex.doc = load_block_file(kFixtures + "/" + name);
    const auto f = testing::check_markdown_round_trip(ex);
    if (!f.empty()) o.fail(std::string(name) + ": " + f.front());
  }
  if (o.pass) o.detail = std::to_string(all.size()) + " synthetic exams and 3 fixtures, 3 layouts each";
  return o;
}

// --- grid reading order ---------------------------------------------------

Outcome grid_order() {
  Outcome o;
  std::mt19937_64 rng(42);
  int grids = 0;
  for (int rows = 1; rows <= 12; rows += 3) {
    for (int cols = 1; cols <= 4; ++cols) {
      for (int pages = 1; pages <= 3; ++pages) {
        const auto ex = testing::generate_grid(rng, rows, cols, pages);
        const double d = ard({ex.gold_order, reading_order(ex.doc.blocks)});
        ++grids;
        if (d != 0.0) o.fail(std::to_string(rows) + "x" + std::to_string(cols) + " grid: ARD " + std::to_string(d));
      }
    }
  }
  if (o.pass) o.detail = std::to_string(grids) + " jittered grids";
  return o;
}

// --- corpus filter --------------------------------------------------------

std::vector<std::string> nonempty_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

Outcome corpus_filter(const fs::path& dir) {
  Outcome o;
  cli::FilterOptions opts;
  opts.manifest = kFixtures + "/manifest_20.jsonl";
  opts.output = dir / "kept.jsonl";
  std::ostringstream out, err;
  if (cli::cmd_filter(opts, {}, out, err) != cli::kExitOk) {
    o.fail("filter exited with an error: " + err.str());
    return o;
  }
  std::vector<std::string> kept;
  for (const auto& line : nonempty_lines(slurp(*opts.output))) kept.push_back(json::parse(line)["url"]);
  const auto expected = nonempty_lines(slurp(kFixtures + "/manifest_20.expected"));
  if (kept != expected) o.fail("kept " + std::to_string(kept.size()) + " entries, expected " +
                               std::to_string(expected.size()));
  if (o.pass) o.detail = "20 entries -> " + std::to_string(kept.size()) + " kept";
  return o;
}

// --- determinism ----------------------------------------------------------

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

Outcome determinism(const fs::path& dir) {
  Outcome o;
  int runs = 0;
  for (const char* name : {"exam_basic.json", "exam_multilevel.json", "exam_bare_figure.json"}) {
    for (const char* layout : {"inline", "end", "separate"}) {
      for (const char* format : {"markdown", "html"}) {
        std::map<std::string, std::string> outputs[2];
        for (int r = 0; r < 2; ++r) {
          cli::ConvertOptions c;
          c.inputs = {kFixtures + "/" + name};
          c.layout = layout;
          c.format = format;
          c.placeholder_alt_text = true;
          c.output_dir = dir / ("run" + std::to_string(r));
          std::ostringstream out, err;
          if (cli::cmd_convert(c, {}, out, err) != cli::kExitOk) o.fail(std::string(name) + ": " + err.str());
          outputs[r] = dir_contents(*c.output_dir);
          fs::remove_all(*c.output_dir);
        }
        ++runs;
        if (outputs[0] != outputs[1] || outputs[0].empty()) {
          o.fail(std::string(name) + " " + layout + " " + format + " differs between runs");
        }
      }
    }
  }

  service::ServiceConfig cfg;
  cfg.data_dir = dir / "data";
  service::SessionStore store(cfg);
  int compared = 0;
  for (const char* name : {"exam_basic.json", "exam_multilevel.json"}) {
    const auto created = store.create(slurp(kFixtures + "/" + name));
    if (created.status != 201) {
      o.fail(std::string("service rejected ") + name);
      continue;
    }
    const std::string id = json::parse(created.body)["id"];
    for (const char* layout : {"inline", "end"}) {
      for (const char* format : {"markdown", "html"}) {
        const auto exported = store.export_session(id, json{{"layout", layout}, {"format", format}}.dump());
        cli::ConvertOptions c;
        c.inputs = {cfg.data_dir / id / "state.json"};
        c.layout = layout;
        c.format = format;
        c.output_dir = dir / "cli";
        std::ostringstream out, err;
        if (cli::cmd_convert(c, {}, out, err) != cli::kExitOk) o.fail("convert of state.json failed: " + err.str());
        const auto files = dir_contents(*c.output_dir);
        fs::remove_all(*c.output_dir);
        ++compared;
        if (exported.status != 200 || files.size() != 1 || files.begin()->second != exported.body) {
          o.fail(std::string("service export differs from CLI for ") + name + " " + layout + " " + format);
        }
      }
    }
  }
  if (o.pass) {
    o.detail = std::to_string(runs) + " repeated conversions, " + std::to_string(compared) + " service/CLI comparisons";
  }
  return o;
}

}  // namespace

int main() {
  const fs::path dir = scratch_dir();
  const auto synthetic = exams();
  report("metric oracles (ARD permutations, AP fixture, 10-box report)", metric_oracles());
  report("pipeline property suite (" + std::to_string(kSyntheticExams) + " synthetic exams)", property_suite(synthetic));
  report("markdown round trip", round_trip(synthetic));
  report("grid reading order ARD = 0", grid_order());
  report("corpus filter on 20-entry manifest", corpus_filter(dir));
  report("determinism (repeat convert, service vs CLI)", determinism(dir));
  fs::remove_all(dir);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures;
}
