#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qmerl/cli.hpp"
#include "qmerl/scenario_io.hpp"
#include "qmerl/scenarios.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = qmerl::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scenario_file(const std::string& name) { return std::string(QMERL_SCENARIO_DIR) + "/" + name; }

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qmerl_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_doc(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "doc.json";
  std::ofstream(path) << text;
  return path.string();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) lines.push_back(line);
  return lines;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("analyze reports spectrum and verdict", "[cli]") {
  const auto r = run({"analyze", scenario_file("ghz4.json"), "-q"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["splitCount"] == 3);
  CHECK(doc["verdict"]["genuinelyEntangled"] == true);

  const auto product = run({"analyze", scenario_file("product_0000.json"), "-q"});
  REQUIRE(product.code == 0);
  CHECK(json::parse(product.out)["splitCount"] == 0);

  const auto chatty = run({"analyze", scenario_file("ghz4.json")});
  CHECK(chatty.out.find("splitCount 3 of 3") != std::string::npos);
}

TEST_CASE("analyze csv and best order", "[cli]") {
  const auto csv = run({"analyze", scenario_file("ghz3_x_0.json"), "-q", "-f", "csv", "--best-order"});
  REQUIRE(csv.code == 0);
  const auto lines = split_lines(csv.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == qmerl::spectrum_csv_header(3));

  const auto j = run({"analyze", scenario_file("ghz3_x_0.json"), "-q", "--best-order"});
  const json doc = json::parse(j.out);
  CHECK(doc["splitCount"] == 2);
  CHECK(doc["bestOrder"]["splitCount"] == 2);

  CHECK(run({"analyze", scenario_file("ghz4.json"), "-f", "xml"}).code == qmerl::cli::kExitParse);
}

TEST_CASE("analyze honours split tolerance and output file", "[cli]") {
  const fs::path dir = scratch_dir("analyze");
  const auto r = run({"analyze", scenario_file("ghz4.json"), "--tolerance-split", "4", "-o",
                      (dir / "out" / "ghz4.json").string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(read_all(dir / "out" / "ghz4.json"))["splitCount"] == 0);
  CHECK(run({"analyze", scenario_file("ghz4.json"), "--tolerance-split", "-1"}).code ==
        qmerl::cli::kExitParse);
}

TEST_CASE("mixed states are analyzed without a verdict", "[cli]") {
  const auto r = run({"analyze", scenario_file("mixed_qubit_qutrit.json"), "-q"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["verdict"].is_null());
  CHECK(doc["notes"].dump().find("mixed") != std::string::npos);
}

TEST_CASE("document errors exit 2 and name the field", "[cli]") {
  const fs::path dir = scratch_dir("errors");
  json doc = json::parse(read_all(scenario_file("ghz4.json")));
  doc["register"][2] = 0;
  const auto bad_dims = run({"analyze", write_doc(dir, doc.dump())});
  CHECK(bad_dims.code == qmerl::cli::kExitParse);
  CHECK(bad_dims.err.find("/register/2") != std::string::npos);

  const auto syntax = run({"analyze", write_doc(dir, "{\"version\": 1,\n \"register\": [2,,2]}")});
  CHECK(syntax.code == qmerl::cli::kExitParse);
  CHECK(syntax.err.find("line 2") != std::string::npos);

  CHECK(run({"analyze", (dir / "missing.json").string()}).code == qmerl::cli::kExitParse);
  CHECK(run({"frobnicate"}).code == qmerl::cli::kExitParse);
  CHECK(run({}).code == qmerl::cli::kExitParse);
}

TEST_CASE("sweep tabulates the qutrit GHZ family", "[cli]") {
  const auto r = run({"sweep", scenario_file("oam_ghz.json"), "mu", "0", "0.7071067811865476", "50", "-q"});
  REQUIRE(r.code == 0);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() == 51);
  CHECK(lines[0] == "mu,L0,L1,L2,splitCount");
  CHECK(lines[1].substr(lines[1].rfind(',') + 1) == "0");
  // mu = 1/sqrt(3) sits between rows 40 and 41 of the grid
  CHECK(lines[41].substr(lines[41].rfind(',') + 1) == "2");

  const auto one = run({"sweep", scenario_file("oam_ghz.json"), "mu", "0.4", "0.9", "1", "-q"});
  REQUIRE(one.code == 0);
  const auto one_lines = split_lines(one.out);
  REQUIRE(one_lines.size() == 2);

  const fs::path dir = scratch_dir("sweep");
  json doc = json::parse(read_all(scenario_file("oam_ghz.json")));
  doc["state"]["params"]["mu"] = 0.4;
  const auto single = run({"analyze", write_doc(dir, doc.dump()), "-q"});
  const json expected_doc = json::parse(single.out);
  std::string expected = "0.40000000000000002";
  for (const auto& l : expected_doc["lines"]) expected += "," + qmerl::format_real(l.get<double>());
  expected += "," + std::to_string(expected_doc["splitCount"].get<int>());
  CHECK(one_lines[1] == expected);
}

TEST_CASE("sweep over lTra and inside composite blocks", "[cli]") {
  const auto l = run({"sweep", scenario_file("ghz4.json"), "lTra", "6", "8", "3", "-q"});
  REQUIRE(l.code == 0);
  CHECK(split_lines(l.out).size() == 4);

  const auto blocks = run({"sweep", scenario_file("ghz3_x_0.json"), "n", "3", "3", "2", "-q"});
  CHECK(blocks.code == 0);
}

TEST_CASE("sweep rejects unknown parameters", "[cli]") {
  const auto r = run({"sweep", scenario_file("ghz4.json"), "theta", "0", "1", "5"});
  CHECK(r.code == qmerl::cli::kExitParse);
  CHECK(r.err.find("theta") != std::string::npos);
  CHECK(run({"sweep", scenario_file("ghz4.json"), "lTra", "0", "1", "0"}).code == qmerl::cli::kExitParse);
}

TEST_CASE("audit is deterministic for a fixed seed", "[cli]") {
  const auto a = run({"audit", "-n", "20", "--seed", "42", "-q"});
  const auto b = run({"audit", "-n", "20", "--seed", "42", "-q"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(split_lines(a.out)[0] == "check,passed,failed,worst");
  CHECK(run({"audit", "-n", "5"}).code == 0);
}

TEST_CASE("figures writes plot-ready tables", "[cli]") {
  const fs::path dir = scratch_dir("figures");
  REQUIRE(run({"figures", "fig2", "-o", dir.string(), "-q"}).code == 0);
  const auto verdicts = split_lines(read_all(dir / "fig2_verdicts.csv"));
  REQUIRE(verdicts.size() == 5);
  CHECK(verdicts[1].rfind("ghz4,3,", 0) == 0);
  CHECK(verdicts[4].rfind("product_0000,0,", 0) == 0);
  CHECK(split_lines(read_all(dir / "fig2_lines.csv")).size() == 17);

  REQUIRE(run({"figures", "fig3", "-o", (dir / "nested").string(), "-q"}).code == 0);
  CHECK(split_lines(read_all(dir / "nested" / "fig3_lines.csv")).size() == 101);
  CHECK(split_lines(read_all(dir / "nested" / "fig3_verdicts.csv")).size() == 9);

  CHECK(run({"figures", "fig9"}).code == qmerl::cli::kExitParse);
}
