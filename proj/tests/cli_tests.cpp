// End-to-end tests that drive the dmc-infer binary (path in $DMC_INFER_BIN).

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dmc/csv.hpp"
#include "dmc/text_io.hpp"
#include "support/helpers.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("DMC_INFER_BIN");
  REQUIRE(p != nullptr);
  return p;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dmc_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const int rc = std::system((cli_path() + " " + args).c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

int run_capture(const std::string& args, const std::string& stdout_path) {
  return run(args + " > " + stdout_path + " 2>/dev/null");
}

std::string slurp(const std::string& path) { return dmc::read_text_file(path); }

void write_triangle(const TempDir& dir) {
  dmc::write_text_file(dir.file("g.txt"),
                       dmc::serialize_graph(testsupport::triangle_graph()));
  dmc::write_text_file(dir.file("f.txt"),
                       dmc::serialize_forest(testsupport::triangle_forest()));
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += (c == '\n');
  return n;
}

}  // namespace

TEST_CASE("simulate writes the full prefix trail") {
  TempDir dir;
  const int rc = run("simulate --nodes 40 --p 0.7 --pc 0.7 --seed 7 --save-prefixes --out " +
                     dir.file("sim"));
  REQUIRE(rc == 0);

  // final pair parses and validates
  const auto g = dmc::parse_graph(slurp(dir.file("sim_graph.txt")));
  const auto f = dmc::parse_forest(slurp(dir.file("sim_forest.txt")));
  REQUIRE(g.vertex_count() == 40);
  REQUIRE(dmc::validate_pair(g, f).ok());

  // 39 saved prefixes: t = 0 (seed) through t = 38
  for (int t = 0; t <= 38; ++t) {
    REQUIRE(fs::exists(dir.file("sim_t" + std::to_string(t) + "_graph.txt")));
    REQUIRE(fs::exists(dir.file("sim_t" + std::to_string(t) + "_forest.txt")));
  }
  REQUIRE_FALSE(fs::exists(dir.file("sim_t39_graph.txt")));
  REQUIRE(count_lines(slurp(dir.file("sim_steps.txt"))) == 38);
  REQUIRE(fs::exists(dir.file("sim_manifest.json")));
}

TEST_CASE("simulate with two nodes emits just the seed") {
  TempDir dir;
  REQUIRE(run("simulate --nodes 2 --seed 1 --out " + dir.file("s")) == 0);
  const auto g = dmc::parse_graph(slurp(dir.file("s_graph.txt")));
  REQUIRE(g.vertex_count() == 2);
}

TEST_CASE("simulate rejects a single node") {
  TempDir dir;
  REQUIRE(run("simulate --nodes 1 --out " + dir.file("s") + " 2>/dev/null") == 2);
}

TEST_CASE("exact prints the triangle value") {
  TempDir dir;
  write_triangle(dir);
  REQUIRE(run_capture("exact --graph " + dir.file("g.txt") + " --forest " + dir.file("f.txt") +
                          " --p 0.7 --pc 0.7",
                      dir.file("out.txt")) == 0);
  const double v = std::stod(slurp(dir.file("out.txt")));
  REQUIRE_THAT(v, Catch::Matchers::WithinAbs(std::log(0.49), 1e-12));
}

TEST_CASE("exact refuses an instance beyond the size guard") {
  TempDir dir;
  REQUIRE(run("simulate --nodes 20 --seed 2 --out " + dir.file("big") + " > /dev/null") == 0);
  REQUIRE(run("exact --graph " + dir.file("big_graph.txt") + " --forest " +
              dir.file("big_forest.txt") + " 2>/dev/null") == 3);
}

TEST_CASE("malformed input files exit with the validation code") {
  TempDir dir;
  dmc::write_text_file(dir.file("bad.txt"), "e A B\n");
  dmc::write_text_file(dir.file("f.txt"), "n A -\nn B -\n");
  REQUIRE(run("exact --graph " + dir.file("bad.txt") + " --forest " + dir.file("f.txt") +
              " 2>/dev/null") == 3);
  // leaf set mismatch between well-formed files
  dmc::write_text_file(dir.file("g2.txt"), "v A\nv Z\ne A Z\n");
  REQUIRE(run("exact --graph " + dir.file("g2.txt") + " --forest " + dir.file("f.txt") +
              " 2>/dev/null") == 3);
}

TEST_CASE("grid-posterior masses sum to one") {
  TempDir dir;
  write_triangle(dir);
  REQUIRE(run("grid-posterior --graph " + dir.file("g.txt") + " --forest " + dir.file("f.txt") +
              " --grid-size 64 --out " + dir.file("gp") + " > /dev/null") == 0);
  std::istringstream csv(slurp(dir.file("gp_grid.csv")));
  std::string line;
  std::getline(csv, line);
  REQUIRE(line == "p,pc,mass");
  double total = 0.0;
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    const auto last_comma = line.rfind(',');
    total += std::stod(line.substr(last_comma + 1));
    ++rows;
  }
  REQUIRE(rows == 64 * 64);
  REQUIRE_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-10));
}

TEST_CASE("infer with zero iterations emits a one-row chain") {
  TempDir dir;
  write_triangle(dir);
  REQUIRE(run("infer --graph " + dir.file("g.txt") + " --forest " + dir.file("f.txt") +
              " --particles 16 --iters 0 --seed 3 --out " + dir.file("inf") +
              " > /dev/null") == 0);
  const std::string chain = slurp(dir.file("inf_chain.csv"));
  REQUIRE(count_lines(chain) == 2);  // header + one sample
  REQUIRE(chain.rfind("iter,p,pc,loglik,accepted\n", 0) == 0);
  REQUIRE(fs::exists(dir.file("inf_summary.csv")));
  REQUIRE(fs::exists(dir.file("inf_manifest.json")));
}

TEST_CASE("infer records histories when asked") {
  TempDir dir;
  write_triangle(dir);
  REQUIRE(run("infer --graph " + dir.file("g.txt") + " --forest " + dir.file("f.txt") +
              " --particles 8 --iters 5 --seed 3 --out " + dir.file("inf") +
              " --histories-out " + dir.file("hist.txt") + " > /dev/null") == 0);
  const std::string hist = slurp(dir.file("hist.txt"));
  REQUIRE(count_lines(hist) == 6);  // one per sample
  // the triangle's only duplicates are A or C
  std::istringstream lines(hist);
  std::string line;
  while (std::getline(lines, line)) {
    REQUIRE((line == "A" || line == "C"));
  }
}

TEST_CASE("infer rejects an inverted prior") {
  TempDir dir;
  write_triangle(dir);
  REQUIRE(run("infer --graph " + dir.file("g.txt") + " --forest " + dir.file("f.txt") +
              " --prior-low 0.9 --prior-high 0.1 --iters 1 --particles 4 --out " +
              dir.file("x") + " 2>/dev/null") == 2);
}

TEST_CASE("variance-study rejects reps < 2") {
  TempDir dir;
  REQUIRE(run("variance-study --nodes 6 --reps 1 --out " + dir.file("v") +
              " 2>/dev/null") == 2);
}

TEST_CASE("unknown flags exit with the usage code") {
  TempDir dir;
  REQUIRE(run("simulate --frobnicate --out " + dir.file("s") + " 2>/dev/null") == 2);
  REQUIRE(run("2>/dev/null") == 2);
}

TEST_CASE("reruns and thread counts do not change command output") {
  TempDir dir;
  const std::string base = "variance-study --nodes 8 --multipliers 2,3 --reps 3 --seed 11 "
                           "--deterministic ";
  REQUIRE(run(base + "--threads 1 --out " + dir.file("a") + " > /dev/null") == 0);
  REQUIRE(run(base + "--threads 1 --out " + dir.file("b") + " > /dev/null") == 0);
  REQUIRE(run(base + "--threads 2 --out " + dir.file("c") + " > /dev/null") == 0);

  const auto runs_a = slurp(dir.file("a_runs.csv"));
  REQUIRE(runs_a == slurp(dir.file("b_runs.csv")));
  REQUIRE(runs_a == slurp(dir.file("c_runs.csv")));
  REQUIRE(slurp(dir.file("a_summary.csv")) == slurp(dir.file("c_summary.csv")));

  // env variable supplies the default thread count
  REQUIRE(std::system(("DMC_INFER_THREADS=2 " + cli_path() + " " + base + "--out " +
                       dir.file("d") + " > /dev/null")
                          .c_str()) == 0);
  REQUIRE(runs_a == slurp(dir.file("d_runs.csv")));
}
