#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include <json.hpp>

#include "../tools/cli.hpp"
#include "cpgates/io.hpp"

using namespace cpg;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cpgates_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

bool has(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
  CHECK(invoke({"catalog"}).code == cli::kExitUsage);
  CHECK(invoke({"landscape", "X5a", "--bogus"}).code == cli::kExitUsage);
  CHECK(invoke({"--threads", "-1", "catalog", "list"}).code == cli::kExitUsage);
  const auto help = invoke({"--help"});
  CHECK(help.code == cli::kExitOk);
  CHECK(has(help.out, "landscape"));
}

TEST_CASE("catalog list") {
  const auto all = invoke({"catalog", "list"});
  CHECK(all.code == 0);
  CHECK(has(all.out, "X5a\n"));
  CHECK(has(all.out, "H15\n"));
  const auto h = invoke({"catalog", "list", "--target", "rx90"});
  CHECK(has(h.out, "H3\n"));
  CHECK_FALSE(has(h.out, "X5a"));
  const auto bad = invoke({"catalog", "list", "--target", "y"});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(has(bad.err, "--target"));
}

TEST_CASE("catalog show") {
  const auto r = invoke({"catalog", "show", "X5a"});
  CHECK(r.code == 0);
  CHECK(has(r.out, "(2/3, -1/6, 1/3, -1/6, 2/3)pi"));
  CHECK(has(r.out, "provenance:"));
  CHECK(has(r.out, "D1,0 D0,1 D1,1"));

  const auto h = invoke({"catalog", "show", "H3"});
  CHECK(has(h.out, "tabulated 1.9440 pi"));

  const auto missing = invoke({"catalog", "show", "X5z"});
  CHECK(missing.code == cli::kExitUsage);
  CHECK(has(missing.err, "X5z"));
  CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

  TempDir dir;
  const auto ex = invoke({"catalog", "show", "BB1", "--export", dir / "bb1.json"});
  CHECK(ex.code == 0);
  const auto f = sequence_from_json(read_text_file(dir / "bb1.json"));
  CHECK(f.sequence == catalog_get("BB1").sequence);
  CHECK(invoke({"catalog", "show", "BB1", "--export", dir / "no/such/dir/x.json"}).code == cli::kExitFailure);
}

TEST_CASE("verify") {
  const auto r = invoke({"verify", "X5a", "--max-order", "2"});
  CHECK(r.code == 0);
  for (const char* row : {"D1,0", "D0,1", "D1,1"}) {
    const auto line = r.out.substr(r.out.find(std::string("  ") + row));
    CHECK(has(line.substr(0, line.find('\n')), "vanishes"));
  }
  for (const char* row : {"D2,0", "D0,2"}) {
    const auto line = r.out.substr(r.out.find(std::string("  ") + row));
    CHECK_FALSE(has(line.substr(0, line.find('\n')), "vanishes"));
  }
  CHECK(has(r.out, "confirmed"));
  CHECK(has(r.out, "five-pulse bracket check"));

  TempDir dir;
  CHECK(invoke({"verify", "--sequence", "X9a", "--out", dir / "v.json"}).code == 0);
  const auto j = nlohmann::json::parse(read_text_file(dir / "v.json"));
  CHECK(j.at("claims_confirmed") == true);
  CHECK(j.at("derivatives").size() == 9);

  // a file claiming an order that does not vanish is a runtime failure
  auto sf = to_sequence_file(catalog_get("X5a"));
  sf.claimed_orders = {{2, 0}};
  write_file_atomic(dir / "claim.json", sequence_to_json(sf));
  const auto bad = invoke({"verify", "--file", dir / "claim.json"});
  CHECK(bad.code == cli::kExitFailure);
  CHECK(has(bad.out, "NOT confirmed"));

  CHECK(invoke({"verify", "X5a", "--max-order", "9"}).code == cli::kExitUsage);
  CHECK(invoke({"verify"}).code == cli::kExitUsage);
  CHECK(invoke({"verify", "X5a", "--file", dir / "claim.json"}).code == cli::kExitUsage);
  write_file_atomic(dir / "broken.json", "{\"schema_version\": 1");
  const auto broken = invoke({"verify", "--file", dir / "broken.json"});
  CHECK(broken.code == cli::kExitUsage);
  CHECK(has(broken.err, "--file"));
}

TEST_CASE("landscape writes grid and contours") {
  TempDir dir;
  const auto r = invoke({"landscape", "--sequence", "X5a", "--target", "x", "--box", "0.5", "--resolution", "201",
                      "--levels", "1e-4,1e-3,1e-2,1e-1", "--out", dir / "grid.csv", "--contours", dir / "c.json",
                      "--svg", dir / "c.svg"});
  CHECK(r.code == 0);
  const auto g = grid_from_csv(read_text_file(dir / "grid.csv"));
  REQUIRE(g.values.rows() == 201);
  CHECK(g.values(100, 100) < 1e-12);
  const auto c = nlohmann::json::parse(read_text_file(dir / "c.json"));
  CHECK(c.at("contours").size() == 4);
  CHECK(has(read_text_file(dir / "c.svg"), "<svg"));

  const auto h = invoke({"landscape", "H3", "--target", "h", "--resolution", "21x31", "--eps-range", "-0.2,0.3"});
  CHECK(h.code == 0);
  CHECK(has(h.out, "grid 21x31"));
}

TEST_CASE("landscape validation") {
  CHECK(invoke({"landscape", "X5a", "--resolution", "1"}).code == cli::kExitUsage);
  CHECK(invoke({"landscape", "X5a", "--resolution", "3x"}).code == cli::kExitUsage);
  CHECK(invoke({"landscape", "X5a", "--eps-range", "0.2,0.1"}).code == cli::kExitUsage);
  CHECK(invoke({"landscape", "X5a", "--levels", "0,1e-2"}).code == cli::kExitUsage);
  CHECK(invoke({"landscape", "X5a", "--levels", "a"}).code == cli::kExitUsage);
  CHECK(invoke({"landscape", "X5a", "--box", "-1"}).code == cli::kExitUsage);
  const auto r = invoke({"landscape", "X5a", "--resolution", "5", "--out", "/nonexistent/dir/g.csv"});
  CHECK(r.code == cli::kExitFailure);
  CHECK(has(r.err, "--out"));
}

TEST_CASE("design") {
  TempDir dir;
  const auto r = invoke({"design", "--pulses", "5", "--starts", "64", "--seed", "3", "--rank-resolution", "21",
                      "--out-dir", dir / "sols"});
  CHECK(r.code == 0);
  CHECK(has(r.out, "distinct solution(s) for 5 pulses, conditions D0,1 D1,0 D1,1"));
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir / "sols")) {
    const auto f = sequence_from_json(read_text_file(e.path()));
    CHECK(sequence_infidelity(f.sequence, GateKind::X, {}) < 1e-12);
    ++files;
  }
  CHECK(files >= 2);
  // reproducible per seed, independent of the thread count
  const auto a = invoke({"--threads", "1", "design", "--starts", "32", "--seed", "5", "--rank-resolution", "11"});
  const auto b = invoke({"--threads", "3", "design", "--starts", "32", "--seed", "5", "--rank-resolution", "11"});
  CHECK(a.out == b.out);

  CHECK(invoke({"design", "--pulses", "4"}).code == cli::kExitUsage);
  CHECK(invoke({"design", "--conditions", "1-0"}).code == cli::kExitUsage);
  CHECK(invoke({"design", "--conditions", "0:0"}).code == cli::kExitUsage);
  CHECK(invoke({"design", "--starts", "0"}).code == cli::kExitUsage);
}

TEST_CASE("optimize") {
  TempDir dir;
  const std::vector<std::string> base = {"optimize", "--pulses", "3", "--starts", "3", "--max-iters", "60",
                                         "--seed", "9", "--grid", "4"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> v = base;
    v.insert(v.end(), extra.begin(), extra.end());
    return invoke(v);
  };
  const auto r = with({"--out", dir / "best.json", "--report", dir / "report.json"});
  CHECK(r.code == 0);
  const auto best = sequence_from_json(read_text_file(dir / "best.json"));
  CHECK(best.sequence.size() == 3);
  const auto rep = nlohmann::json::parse(read_text_file(dir / "report.json"));
  CHECK(rep.at("per_start").size() == 3);
  CHECK(rep.at("spec").at("grid")[0] == 4);

  auto v1 = base;
  v1.insert(v1.begin(), {"--threads", "1"});
  auto v3 = base;
  v3.insert(v3.begin(), {"--threads", "3"});
  CHECK(invoke(v1).out == invoke(v3).out);

  CHECK(with({"--target", "h", "--symmetric"}).code == 0);
  CHECK(with({"--fixed-amplitude", "--tau", "0.5"}).code == 0);
  CHECK(with({"--lr", "0"}).code == cli::kExitUsage);
  CHECK(with({"--amplitude-bounds", "1,0.5"}).code == cli::kExitUsage);
  CHECK(with({"--target", "i"}).code == cli::kExitUsage);
  CHECK(with({"--grid", "0"}).code == cli::kExitUsage);
}

TEST_CASE("scan-duration") {
  const auto r = invoke({"scan-duration", "pi", "--samples", "5", "--eta-range", "-0.2,0.2"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("eta,infidelity\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 6);
  CHECK(has(r.out, "0.000000000000e+00,0.000000000000e+00"));
  CHECK(invoke({"scan-duration", "pi", "--samples", "1"}).code == cli::kExitUsage);
  CHECK(invoke({"scan-duration", "pi", "--eta-range", "0.1"}).code == cli::kExitUsage);
}

TEST_CASE("config precedence: flags over file over defaults") {
  TempDir dir;
  write_file_atomic(dir / "cfg.txt", "# landscape settings\nresolution = 11\nlevels=1e-2\n\n");
  const auto from_file = invoke({"--config", dir / "cfg.txt", "landscape", "X5a"});
  CHECK(from_file.code == 0);
  CHECK(has(from_file.out, "grid 11x11"));
  CHECK(has(from_file.out, "level 0.01:"));
  CHECK_FALSE(has(from_file.out, "level 0.0001:"));

  const auto flag = invoke({"--config", dir / "cfg.txt", "landscape", "X5a", "--resolution", "7"});
  CHECK(has(flag.out, "grid 7x7"));

  const auto defaults = invoke({"landscape", "X5a", "--resolution", "5"});
  CHECK(has(defaults.out, "level 0.0001:"));

  write_file_atomic(dir / "bad.txt", "no-such-option = 3\n");
  CHECK(invoke({"--config", dir / "bad.txt", "landscape", "X5a"}).code == cli::kExitUsage);
  write_file_atomic(dir / "junk.txt", "just words\n");
  CHECK(invoke({"--config", dir / "junk.txt", "landscape", "X5a"}).code == cli::kExitUsage);
  write_file_atomic(dir / "type.txt", "resolution = 11\nbox = wide\n");
  CHECK(invoke({"--config", dir / "type.txt", "landscape", "X5a"}).code == cli::kExitUsage);
  CHECK(invoke({"--config", dir / "missing.txt", "catalog", "list"}).code == cli::kExitUsage);
}
