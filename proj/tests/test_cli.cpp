#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "nestlie/io.hpp"

namespace {

struct RunResult {
  int code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(NESTLIE_CLI_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, out};
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "nestlie_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_scratch(const std::string& name, const std::string& text) {
  const auto path = scratch_dir() / name;
  std::ofstream out(path, std::ios::binary);
  REQUIRE(bool(out));
  out << text;
  out.close();
  return path.string();
}

bool has(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("cli close-lie computes the closure dimension") {
  const std::string path = write_scratch(
      "lower.json",
      R"({"label":"lower","nest":[0,1,2],"generators":[[[[0,0],[0,0]],[[1,0],[0,0]]]]})");
  const auto res = run_cli("close-lie --input " + path);
  CHECK(res.code == 0);
  CHECK(has(res.out, "\"command\":\"close-lie\""));
  CHECK(has(res.out, "\"label\":\"lower\""));
  CHECK(has(res.out, "\"seed_dimension\":1"));
  CHECK(has(res.out, "\"dimension\":3"));
  CHECK(!res.out.empty());
  CHECK(res.out.back() == '\n');

  // Bases are opt-in.
  CHECK(!has(res.out, "\"basis\""));
  const auto with_bases = run_cli("close-lie --input " + path + " --bases");
  CHECK(with_bases.code == 0);
  CHECK(has(with_bases.out, "\"basis\":[[["));
}

TEST_CASE("cli close-lie of an empty generator list is zero") {
  const std::string path = write_scratch(
      "empty.json", R"({"label":"empty","nest":[0,1,2],"generators":[]})");
  const auto res = run_cli("close-lie --input " + path);
  CHECK(res.code == 0);
  CHECK(has(res.out, "\"seed_dimension\":0"));
  CHECK(has(res.out, "\"dimension\":0"));
}

TEST_CASE("cli close-bimodule of a single upper unit stays one dimensional") {
  const std::string path = write_scratch(
      "upper.json",
      R"({"label":"upper","nest":[0,1,2],"generators":[[[[0,0],[1,0]],[[0,0],[0,0]]]]})");
  const auto res = run_cli("close-bimodule --input " + path);
  CHECK(res.code == 0);
  CHECK(has(res.out, "\"dimension\":1"));
}

TEST_CASE("cli rejects malformed input with exit 2") {
  const std::string bad_nest = write_scratch(
      "badnest.json", R"({"label":"bad","nest":[0,3,2],"generators":[]})");
  CHECK(run_cli("close-lie --input " + bad_nest).code == 2);
  CHECK(run_cli("verify --input " + bad_nest).code == 2);

  const std::string not_json = write_scratch("notjson.json", "pqr{");
  CHECK(run_cli("largest-bimodule --input " + not_json).code == 2);

  CHECK(run_cli("close-lie --input /nonexistent/file.json").code == 2);
  // No input source at all.
  CHECK(run_cli("close-lie").code == 2);
  // Two input sources.
  CHECK(run_cli("close-lie --example --random 3 2 1 5").code == 2);
  // Unknown flag and unknown subcommand.
  CHECK(run_cli("close-lie --example --frobnicate").code == 2);
  CHECK(run_cli("explode").code == 2);
  CHECK(run_cli("").code == 2);
  // Out-of-range random parameters.
  CHECK(run_cli("close-lie --random 40 2 1 5").code == 2);
  CHECK(run_cli("verify --random 4 2 1 5 0").code == 2);
}

TEST_CASE("cli d-algebra demands a bimodule") {
  const std::string path = write_scratch(
      "notbimodule.json",
      R"({"label":"notbim","nest":[0,1,2],"generators":[[[[0,0],[0,0]],[[1,0],[0,0]]]]})");
  const auto res = run_cli("d-algebra --input " + path);
  CHECK(res.code == 3);
  CHECK(has(res.out, "\"error\":\"input span is not a bimodule"));
  CHECK(has(res.out, "\"witness\":[[["));

  // The full diagonal comes back for a genuine bimodule.
  const std::string ok = write_scratch(
      "bimodule.json",
      R"({"label":"bim","nest":[0,1,2],"generators":[[[[0,0],[1,0]],[[0,0],[0,0]]]]})");
  const auto good = run_cli("d-algebra --input " + ok);
  CHECK(good.code == 0);
  CHECK(has(good.out, "\"dimension\":2"));
  CHECK(has(good.out, "\"bands\":[]"));
}

TEST_CASE("cli k-decompose demands a commutator-closed span") {
  const std::string path = write_scratch(
      "notclosed.json",
      R"({"label":"notclosed","nest":[0,1,2],"generators":[[[[0,0],[0,0]],[[1,0],[0,0]]]]})");
  const auto res = run_cli("k-decompose --input " + path);
  CHECK(res.code == 3);
  CHECK(has(res.out, "\"error\":\"input span is not commutator-closed\""));
  CHECK(has(res.out, "\"witness\":[[["));
}

TEST_CASE("cli k-decompose of the worked example") {
  const auto res = run_cli("k-decompose --example");
  CHECK(res.code == 0);
  CHECK(has(res.out, "\"label\":\"paper_example\""));
  CHECK(has(res.out,
            "\"dimensions\":{\"k_v\":10,\"k_l\":3,\"k_d\":8,\"k_delta\":4,\"total\":16}"));
}

TEST_CASE("cli phi of the worked example") {
  const auto res = run_cli("phi --example");
  CHECK(res.code == 0);
  CHECK(has(res.out, "\"input_dimension\":18"));
  CHECK(has(res.out, "\"phi\":[0,1,2,5,5,5]"));
}

TEST_CASE("cli largest-bimodule of the worked example") {
  const auto res = run_cli("largest-bimodule --example");
  CHECK(res.code == 0);
  // The generator span contains the top-left unit (identity minus the other
  // diagonal units), so the whole span is already a two-sided module.
  CHECK(has(res.out, "\"input_dimension\":18"));
  CHECK(has(res.out, "\"dimension\":18"));
}

TEST_CASE("cli verify on the worked example passes and reports the flags") {
  const auto res = run_cli("verify --example");
  CHECK(res.code == 0);
  CHECK(has(res.out, "\"command\":\"verify\""));
  CHECK(has(res.out,
            "\"dimensions\":{\"L\":18,\"J\":18,\"K_V\":10,\"K_L\":3,\"K_D\":8,"
            "\"K_Delta\":4,\"K\":16,\"D_K\":5}"));
  CHECK(has(res.out,
            "\"clauses\":{\"j_subseteq_l\":true,\"l_subseteq_k_plus_dk\":true,"
            "\"commutator_in_l\":true,\"kv_subseteq_j\":true,\"k_is_bimodule\":true,"
            "\"dk_closed\":true,\"band_annihilation\":true}"));
  CHECK(has(res.out, "\"j_not_included_in_k\":true"));
  CHECK(has(res.out, "\"l_not_included_in_k\":true"));
  CHECK(has(res.out, "\"witnesses\":[]"));
  CHECK(has(res.out, "\"passed\":true"));
  // The example is not inside the upper-triangular pattern, so the ideal
  // refinement clause must be absent.
  CHECK(!has(res.out, "lie_ideal_refinement"));
}

TEST_CASE("cli verify random trials pass and are byte-identical across runs") {
  const auto a = run_cli("verify --random 4 2 2 11 3");
  const auto b = run_cli("verify --random 4 2 2 11 3");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(has(a.out, "\"random\":{\"n\":4,\"m\":2,\"g\":2,\"seed\":11,\"trials\":3}"));
  CHECK(has(a.out, "\"rng_seed\":11"));
  CHECK(has(a.out, "\"rng_seed\":12"));
  CHECK(has(a.out, "\"rng_seed\":13"));
  CHECK(has(a.out, "\"passed\":true"));
}

TEST_CASE("cli verify inside the algebra reports the refinement clause") {
  const std::string path = write_scratch(
      "ideal.json",
      R"({"label":"ideal","nest":[0,1,2],"generators":[[[[0,0],[1,0]],[[0,0],[0,0]]]]})");
  const auto res = run_cli("verify --input " + path);
  CHECK(res.code == 0);
  CHECK(has(res.out, "\"lie_ideal_refinement\":true"));
}

TEST_CASE("cli reports are byte-identical across reruns") {
  const auto a = run_cli("verify --example");
  const auto b = run_cli("verify --example");
  CHECK(a.out == b.out);
  const auto c = run_cli("k-decompose --example --bases");
  const auto d = run_cli("k-decompose --example --bases");
  CHECK(c.out == d.out);
}

TEST_CASE("cli output flag writes the same bytes to a file") {
  const auto direct = run_cli("verify --example");
  const auto out_path = (scratch_dir() / "report.json").string();
  const auto res = run_cli("verify --example --output " + out_path);
  CHECK(res.code == 0);
  CHECK(res.out.empty());
  std::ifstream in(out_path, std::ios::binary);
  REQUIRE(bool(in));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == direct.out);
}

TEST_CASE("cli gen emits a parseable canonical instance") {
  const auto res = run_cli("gen --random 4 2 1 7");
  CHECK(res.code == 0);
  const auto doc = nestlie::parse_instance(res.out);
  CHECK(doc.label == "random_n4_m2_g1_s7");
  CHECK(doc.nest_boundaries.size() == 3);
  CHECK(doc.generators.size() == 1);
  REQUIRE(doc.rng_seed.has_value());
  CHECK(*doc.rng_seed == 7);
  // Canonical: re-serializing reproduces the bytes.
  CHECK(nestlie::write_instance(doc) == res.out);

  // The emitted instance feeds back into the other subcommands.
  const auto path = (scratch_dir() / "gen.json").string();
  const auto gen_to_file = run_cli("gen --random 4 2 1 7 --output " + path);
  CHECK(gen_to_file.code == 0);
  const auto closed = run_cli("close-lie --input " + path);
  CHECK(closed.code == 0);
  CHECK(has(closed.out, "\"label\":\"random_n4_m2_g1_s7\""));
  CHECK(has(closed.out, "\"rng_seed\":7"));

  const auto example = run_cli("gen --example");
  CHECK(example.code == 0);
  const auto example_doc = nestlie::parse_instance(example.out);
  CHECK(example_doc.label == "paper_example");
  CHECK(example_doc.generators.size() == 18);
}

TEST_CASE("cli help exits cleanly") {
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("verify --help").code == 0);
}
