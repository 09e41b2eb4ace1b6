#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cflab/cli.hpp"

using Json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cflab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Json json_of(std::vector<std::string> args) {
  const Outcome o = run(std::move(args));
  REQUIRE(o.code == 0);
  return Json::parse(o.out);
}

// Minimal RFC 4180 reader; throws on malformed input.
std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  std::size_t i = 0;
  bool quoted_cell = false;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '"') {
      if (!cell.empty() || quoted_cell) throw std::runtime_error("stray quote");
      quoted_cell = true;
      ++i;
      for (;;) {
        if (i >= text.size()) throw std::runtime_error("unterminated quote");
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            cell += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        cell += text[i++];
      }
    } else if (c == ',') {
      row.push_back(cell);
      cell.clear();
      quoted_cell = false;
      ++i;
    } else if (c == '\r') {
      if (i + 1 >= text.size() || text[i + 1] != '\n') throw std::runtime_error("bare CR");
      row.push_back(cell);
      rows.push_back(row);
      row.clear();
      cell.clear();
      quoted_cell = false;
      i += 2;
    } else {
      if (quoted_cell || c == '\n') throw std::runtime_error("bad character");
      cell += c;
      ++i;
    }
  }
  if (!row.empty() || !cell.empty()) throw std::runtime_error("missing final CRLF");
  return rows;
}

const std::vector<std::vector<std::string>> kCommands = {
    {"expand", "--x", "3/7"},
    {"convergents", "--x", "13/31"},
    {"convergents", "--seq", "exp_floor", "--n", "30"},
    {"cylinder", "--prefix", "1,2,3"},
    {"tau", "--seq", "power:2", "--N", "1000"},
    {"construct", "--alpha", "2", "--terms", "10", "--perturb", "alternating"},
    {"splice", "--prefix-seq", "const:5", "--cut", "3", "--tail-seq", "power:1"},
    {"spectrum", "--set", "all", "--alpha", "3"},
    {"xi", "--seq", "scaled_power:3:2", "--N", "1000"},
    {"bgrowth", "--phi", "exp:2:3", "--N", "200"},
    {"bhirst", "--phi", "dexp:2:3", "--N", "200"},
    {"tseq", "--phi", "power:1:2", "--N", "50"},
    {"count", "--n", "3", "--family", "C:2:0.5"},
    {"enumerate", "--family", "box:1:3", "--n", "2"},
    {"falconer", "--seq", "scaled_power:3:2", "--N", "200"},
    {"critical", "--family", "box:1:2", "--n-max", "8"},
    {"ergodic", "--seed", "5", "--samples", "20", "--orbit", "50", "--t", "0.5", "--t", "1", "--threads", "2"},
    {"ephi-table", "--N", "200"},
};

}  // namespace

TEST_CASE("documented examples") {
  const Json s = json_of({"spectrum", "--set", "lambda", "--alpha", "0.5"});
  CHECK(s["alpha"] == 0.5);
  CHECK(s["dim"] == 0.25);
  const Json c = json_of({"count", "--n", "2", "--L", "3"});
  CHECK(c["count"] == "6");
  CHECK(c["exact_fields"] == Json::array({"count"}));
  const Json e = json_of({"expand", "--x", "3/7"});
  CHECK(e["quotients"] == Json::array({2, 3}));
  CHECK(e["x"] == "3/7");
}

TEST_CASE("every subcommand emits valid JSON and CSV, byte-identical on rerun") {
  for (const auto& cmd : kCommands) {
    INFO(cmd[0]);
    const Outcome a = run(cmd);
    REQUIRE(a.code == 0);
    CHECK(a.err.empty());
    CHECK_NOTHROW(static_cast<void>(Json::parse(a.out)));
    CHECK(run(cmd).out == a.out);

    auto csv_cmd = cmd;
    csv_cmd.insert(csv_cmd.end(), {"--format", "csv"});
    const Outcome b = run(csv_cmd);
    REQUIRE(b.code == 0);
    const auto rows = read_csv(b.out);
    REQUIRE(!rows.empty());
    for (const auto& r : rows) CHECK(r.size() == rows.front().size());
    CHECK(run(csv_cmd).out == b.out);
  }
}

TEST_CASE("exact values become strings only when needed") {
  const Json big = json_of({"convergents", "--seq", "exp_floor", "--n", "40"});
  CHECK(big["convergents"][39]["q"].is_string());
  const Json cyl = json_of({"cylinder", "--prefix", "1,1"});
  CHECK(cyl["lo"] == "1/2");
  CHECK(cyl["hi"] == "2/3");
  CHECK(cyl["length"] == "1/6");
  const Json inf = json_of({"spectrum", "--set", "all", "--alpha", "inf"});
  CHECK(inf["trichotomy"].is_null());
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cflab::cli::kExitUsage);
  CHECK(run({"nonsense"}).code == cflab::cli::kExitUsage);
  CHECK(run({"expand"}).code == cflab::cli::kExitUsage);
  CHECK(run({"expand", "--x", "1/3", "--bogus", "1"}).code == cflab::cli::kExitUsage);
  CHECK(run({"expand", "--x", "x/3"}).code == cflab::cli::kExitUsage);
  CHECK(run({"tau", "--seq", "power:2", "--N", "0"}).code == cflab::cli::kExitUsage);
  CHECK(run({"count", "--n", "2", "--family", "hexagon:3"}).code == cflab::cli::kExitUsage);
  CHECK(run({"spectrum", "--alpha", "-1"}).code == cflab::cli::kExitUsage);

  const Outcome bumpy = run({"tau", "--seq", "list:2,3,5,4,9", "--N", "5"});
  CHECK(bumpy.code == cflab::cli::kExitViolation);
  CHECK(bumpy.out.empty());
  CHECK(!bumpy.err.empty());
  CHECK(run({"expand", "--x", "3/7", "--max-terms", "1"}).code == cflab::cli::kExitViolation);
  CHECK(run({"enumerate", "--family", "box:1:100", "--n", "5", "--cap", "1000"}).code ==
        cflab::cli::kExitViolation);

  const Outcome help = run({"--help"});
  CHECK(help.code == cflab::cli::kExitOk);
  CHECK(help.out.find("expand") != std::string::npos);
}

TEST_CASE("--output resolves relative paths under the output directory") {
  const auto dir = std::filesystem::temp_directory_path() / "cflab_cli_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  ::setenv(cflab::cli::kOutputDirEnv, dir.c_str(), 1);
  const Outcome o = run({"expand", "--x", "3/7", "--output", "e.json"});
  ::unsetenv(cflab::cli::kOutputDirEnv);
  REQUIRE(o.code == 0);
  CHECK(o.out.empty());
  std::ifstream in(dir / "e.json");
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(Json::parse(buf.str())["quotients"] == Json::array({2, 3}));

  CHECK(run({"expand", "--x", "3/7", "--output", (dir / "missing" / "x.json").string()}).code ==
        cflab::cli::kExitViolation);
  std::filesystem::remove_all(dir);
}

TEST_CASE("spec-string parsers") {
  CHECK(cflab::cli::parse_seq("power:2").a(9) == 3);
  CHECK(cflab::cli::parse_seq("list:4,5").a(2) == 5);
  CHECK(cflab::cli::parse_family("monotone:3").name().size() > 0);
  CHECK_THROWS_AS(cflab::cli::parse_seq("power"), std::invalid_argument);
  CHECK_THROWS_AS(cflab::cli::parse_phi("exp:1"), std::invalid_argument);
  CHECK_THROWS_AS(cflab::cli::parse_family("box:a:3"), std::invalid_argument);
}
