#include <doctest.h>

#ifdef KG_EXE

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Invocation {
  int status = -1;
  std::string out;
};

Invocation kg_run(const std::string& args) {
  const std::string cmd = std::string(KG_EXE) + " " + args + " 2>/dev/null";
  Invocation r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) r.out += buf.data();
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

}  // namespace

TEST_CASE("cli spectrum") {
  const Invocation r = kg_run("spectrum --tau 0");
  CHECK(r.status == 0);
  CHECK(r.out.find("index,eigenvalue_re") == 0);
  CHECK(r.out.find("0,-1.732050807568877,0,negative") != std::string::npos);

  const Invocation h = kg_run("spectrum --alpha 0.3 --grid-points 40 --half-width 6 --optimize-shift");
  CHECK(h.status == 0);
}

TEST_CASE("cli is deterministic") {
  const Invocation a = kg_run("sweep --tau 0 --sweep-range 0:2.2 --steps 12");
  const Invocation b = kg_run("sweep --tau 0 --sweep-range 0:2.2 --steps 12");
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("cli exit codes") {
  CHECK(kg_run("").status == 1);
  CHECK(kg_run("spectrum").status == 1);
  CHECK(kg_run("spectrum --tau 1 --shift 0 --paper-shift").status == 1);
  CHECK(kg_run("sweep --tau 0 --sweep-range nonsense").status == 1);
  CHECK(kg_run("spectrum --tau=-1").status == 3);
  CHECK(kg_run("bounds --tau 2 --eta 0.1").status == 4);

  const auto path = std::filesystem::temp_directory_path() / "kg_cli_asym.json";
  std::ofstream(path) << R"({"u_squared": [[2, 0], [0, 2]], "v": [[0, 1], [0.5, 0]]})";
  CHECK(kg_run("spectrum --model " + path.string()).status == 3);
  std::ofstream(path) << "{ not json";
  CHECK(kg_run("spectrum --model " + path.string()).status == 2);
  std::filesystem::remove(path);
}

TEST_CASE("cli verify and bounds") {
  const Invocation v = kg_run("verify --tau 1 --eta 0.1 --paper-shift");
  CHECK(v.status == 0);
  CHECK(v.out.find("0.13409") != std::string::npos);
  const Invocation b = kg_run("bounds --tau 1 --eta 0.1 --format report");
  CHECK(b.status == 0);
  CHECK(b.out.find('{') == 0);
}

TEST_CASE("cli writes output files") {
  const auto path = std::filesystem::temp_directory_path() / "kg_cli_out.csv";
  std::filesystem::remove(path);
  CHECK(kg_run("spectrum --tau 1 --out " + path.string()).status == 0);
  CHECK(std::filesystem::exists(path));
  std::filesystem::remove(path);
}

#endif
