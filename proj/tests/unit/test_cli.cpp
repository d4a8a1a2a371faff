#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "xrauthor/bundle/bundle.hpp"

using namespace xrauthor;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> run_args(const fs::path& out, const std::string& fixtures = "mock") {
  return {"run",
          "--prompt",
          "Show a 3D model of the human heart with labeled chambers for grade 7 biology",
          "--grade",
          "6-8",
          "--subject",
          "Biology",
          "--provider-mode",
          "mock",
          "--fixtures",
          testing::fixtures_dir(fixtures).string(),
          "--prompts-dir",
          (testing::source_dir() / "prompts").string(),
          "--out",
          out.string()};
}

std::vector<std::string> with(std::vector<std::string> args, const std::vector<std::string>& extra) {
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

TEST_CASE("a mock run writes a valid bundle and exits 0") {
  testing::TempDir dir;
  const auto r = testing::run_process(testing::cli_path(), run_args(dir / "out"));
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("bundle written to") != std::string::npos);
  CHECK(r.out.find("Complete") != std::string::npos);
  const auto m = bundle::read_bundle(dir / "out");
  CHECK(m.verdicts.size() == 1);
  CHECK(m.verdicts.back().approved);

  const auto inspect = testing::run_process(testing::cli_path(), {"inspect", (dir / "out").string()});
  CHECK(inspect.exit_code == 0);
  CHECK(inspect.out.find("verdicts: 1, last approved") != std::string::npos);
  const auto as_json = testing::run_process(testing::cli_path(), {"inspect", "--json", (dir / "out").string()});
  CHECK(json::parse(as_json.out)["bundle_id"] == m.bundle_id);
}

TEST_CASE("exhausting safety attempts exits 2 with the verdict history") {
  testing::TempDir dir;
  const auto r = testing::run_process(testing::cli_path(),
                                      with(run_args(dir / "out", "mock-reject"), {"--max-attempts", "2"}));
  REQUIRE(r.exit_code == 2);
  const auto verdicts = json::parse(testing::read_text(dir / "out" / "verdicts.json"));
  REQUIRE(verdicts.size() == 2);
  for (const auto& v : verdicts) CHECK(v["approved"] == false);
  CHECK_FALSE(fs::exists(dir / "out" / "manifest.json"));
}

TEST_CASE("approval on stdin") {
  testing::TempDir dir;
  SUBCASE("approve") {
    const auto r = testing::run_process(testing::cli_path(), with(run_args(dir / "out"), {"--approval"}), "y\n");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("approve? [y/N]") != std::string::npos);
  }
  SUBCASE("anything else rejects") {
    const auto r = testing::run_process(testing::cli_path(), with(run_args(dir / "out"), {"--approval"}), "no\n");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("TeacherRejected") != std::string::npos);
  }
}

TEST_CASE("usage and input errors exit 1") {
  testing::TempDir dir;
  CHECK(testing::run_process(testing::cli_path(), {}).exit_code == 1);
  CHECK(testing::run_process(testing::cli_path(), {"run", "--grade", "6-8"}).exit_code == 1);
  auto args = run_args(dir / "out");
  *std::next(std::find(args.begin(), args.end(), "--grade")) = "13";
  const auto bad_grade = testing::run_process(testing::cli_path(), args);
  CHECK(bad_grade.exit_code == 1);
  CHECK(bad_grade.err.find("grade_band") != std::string::npos);
  CHECK(testing::run_process(testing::cli_path(), with(run_args(dir / "out"), {"--max-attempts", "0"})).exit_code ==
        1);
  CHECK(testing::run_process(testing::cli_path(), with(run_args(dir / "out"), {"--provider-mode", "other"}))
            .exit_code == 1);
  CHECK(testing::run_process(testing::cli_path(), {"--help"}).exit_code == 0);
}

TEST_CASE("inspect reports a damaged bundle") {
  testing::TempDir dir;
  REQUIRE(testing::run_process(testing::cli_path(), run_args(dir / "out")).exit_code == 0);
  fs::remove(dir / "out" / "tutor.json");
  const auto r = testing::run_process(testing::cli_path(), {"inspect", (dir / "out").string()});
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("MissingFile") != std::string::npos);
}

TEST_CASE("seeded runs are byte-identical") {
  testing::TempDir dir;
  for (const char* name : {"a", "b"}) {
    const auto r = testing::run_process(testing::cli_path(), with(run_args(dir / name), {"--seed", "42"}));
    REQUIRE(r.exit_code == 0);
  }
  for (const char* file : {"manifest.json", "tutor.json", "model.glb"}) {
    CHECK(testing::read_bytes(dir / "a" / file) == testing::read_bytes(dir / "b" / file));
  }
  const auto other = testing::run_process(testing::cli_path(), with(run_args(dir / "c"), {"--seed", "43"}));
  REQUIRE(other.exit_code == 0);
  CHECK(testing::read_bytes(dir / "a" / "manifest.json") != testing::read_bytes(dir / "c" / "manifest.json"));
}

TEST_CASE("json event lines and resume of a finished job") {
  testing::TempDir dir;
  const auto data = (dir / "data").string();
  const auto r =
      testing::run_process(testing::cli_path(), with(run_args(dir / "out"), {"--json", "--data-dir", data}));
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line, job_id;
  int events = 0;
  while (std::getline(lines, line)) {
    if (line.starts_with("job ")) job_id = line.substr(4);
    if (line.starts_with("{")) {
      const auto e = json::parse(line);
      CHECK(e.contains("stage"));
      ++events;
    }
  }
  CHECK(events > 10);
  REQUIRE_FALSE(job_id.empty());
  const auto again = testing::run_process(
      testing::cli_path(), {"resume", job_id, "--data-dir", data, "--provider-mode", "mock", "--fixtures",
                            testing::fixtures_dir().string(), "--out", (dir / "again").string()});
  CHECK(again.exit_code == 0);
  CHECK(testing::read_bytes(dir / "again" / "manifest.json") == testing::read_bytes(dir / "out" / "manifest.json"));
}
