#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_support.hpp"
#include "doctest.h"
#include "ppmsdp/graph.hpp"

namespace fs = std::filesystem;
using ppm::cli::json;

namespace {

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("ppm_sdp_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

const Workdir& wd() {
  static const Workdir w;
  return w;
}

int run(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = std::string(PPM_SDP_EXE) + " " + args;
  cmd += stdout_file.empty() ? " > /dev/null" : " > " + stdout_file;
  cmd += " 2> " + wd()("stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("sample then solve both programs") {
  const auto g = wd()("g.txt"), l = wd()("l.txt"), out = wd()("solve.json");
  REQUIRE(run("sample --n 60 --pi 0.5,0.5 --p-tilde 14 --q-tilde 2 --seed 3 --out-graph " + g + " --out-labels " + l) == 0);
  CHECK(ppm::read_graph(fs::path(g)).num_vertices() == 60);

  CHECK(run("solve --graph " + g + " --mode known --sizes 30,30 --out-labels " + wd()("k.txt"), out) == 0);
  CHECK(json::parse(slurp(out)).at("rounded").get<bool>());
  CHECK(ppm::same_partition(ppm::read_labels(fs::path(wd()("k.txt"))), ppm::read_labels(fs::path(l))));

  CHECK(run("solve --graph " + g + " --mode unknown --omega 0.6 --r 2 --out-matrix " + wd()("x.txt"), out) == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("converged").get<bool>());
  CHECK(fs::file_size(wd()("x.txt")) > 0);
}

TEST_CASE("sampling is reproducible through the command line") {
  const auto a = wd()("a.txt"), b = wd()("b.txt");
  REQUIRE(run("sample --n 50 --pi 0.6,0.4 --p-tilde 10 --q-tilde 2 --seed 9 --out-graph " + a) == 0);
  REQUIRE(run("sample --n 50 --pi 0.6,0.4 --p-tilde 10 --q-tilde 2 --seed 9 --out-graph " + b) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("solve exit codes") {
  const auto g = wd()("g2.txt");
  REQUIRE(run("sample --n 60 --pi 0.5,0.5 --p-tilde 14 --q-tilde 2 --seed 3 --out-graph " + g) == 0);
  CHECK(run("solve --graph " + g + " --mode known --sizes 30,30 --max-iters 3") == 3);

  const auto empty = wd()("empty.txt");
  write(empty, "8 0\n");
  CHECK(run("solve --graph " + empty + " --mode unknown --omega 0.3 --r 2") == 2);

  CHECK(run("solve --graph " + g) == 1);
  CHECK(run("solve --graph " + g + " --mode known --sizes 30,31") == 1);
  CHECK(run("solve --graph " + wd()("missing.txt") + " --mode known --sizes 30,30") != 0);

  const auto bad = wd()("bad.txt");
  write(bad, "3 1\n0 7\n");
  CHECK(run("solve --graph " + bad + " --mode known --sizes 2,1") == 1);
  CHECK(slurp(wd()("stderr.txt")).find("line 2") != std::string::npos);
}

TEST_CASE("certify exit code follows the verdict") {
  const auto g = wd()("g3.txt"), l = wd()("l3.txt"), out = wd()("cert.json");
  REQUIRE(run("sample --n 150 --pi 0.5,0.5 --p-tilde 20 --q-tilde 2 --seed 7 --out-graph " + g + " --out-labels " + l) == 0);
  CHECK(run("certify --graph " + g + " --labels " + l + " --p-tilde 20 --q-tilde 2 --identities", out) == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("verified").get<bool>());
  for (const json& id : j.at("identities")) CHECK(id.at("pass").get<bool>());
  CHECK(run("certify --graph " + g + " --labels " + l + " --omega 0.01 --p 0.6 --q 0.06") == 1);
}

TEST_CASE("oracle on a tiny graph") {
  const auto g = wd()("tiny.txt"), out = wd()("oracle.json");
  write(g, "4 2\n0 1\n2 3\n");
  CHECK(run("oracle --graph " + g + " --mode known --sizes 2,2", out) == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("objective").get<double>() == 4.0);
  CHECK(j.at("is_unique").get<bool>());

  const auto big = wd()("big.txt");
  write(big, "20 0\n");
  CHECK(run("oracle --graph " + big + " --mode unknown --omega 0.1 --r 2") == 1);
}

TEST_CASE("threshold reports") {
  const auto out = wd()("thr.json");
  CHECK(run("threshold --n 1000 --pi 0.5,0.5 --p-tilde 8 --q-tilde 2", out) == 0);
  const json j = json::parse(slurp(out));
  CHECK(j.at("min_divergence").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(j.at("feasible").get<bool>());

  const auto model = wd()("q.json");
  write(model, R"({"q_tilde_matrix": [[31.4, 15, 11], [15, 31.4, 10], [11, 10, 31.4]], "pi": [0.3333333333333333, 0.3333333333333333, 0.3333333333333334]})");
  CHECK(run("threshold --model " + model, out) == 0);
  const json k = json::parse(slurp(out));
  CHECK(k.at("feasible").get<bool>());
  CHECK(k.at("monotone_pairs").size() == 3);
}

TEST_CASE("adversary from a JSON spec") {
  const auto g = wd()("g4.txt"), l = wd()("l4.txt"), spec = wd()("adv.json"), out = wd()("g5.txt");
  REQUIRE(run("sample --n 80 --pi 0.5,0.5 --p-tilde 10 --q-tilde 2 --seed 1 --out-graph " + g + " --out-labels " + l) == 0);
  write(spec, R"({"kind": "random_monotone", "params": {"add_prob": 0.3, "remove_prob": 0.3}, "seed": 4})");
  CHECK(run("adversary --graph " + g + " --labels " + l + " --spec " + spec + " --out-graph " + out +
            " --out-changes " + wd()("changes.csv")) == 0);
  const ppm::Graph before = ppm::read_graph(fs::path(g)), after = ppm::read_graph(fs::path(out));
  CHECK_FALSE(ppm::find_non_monotone_change(before, after, ppm::read_labels(fs::path(l))).has_value());
  CHECK(slurp(wd()("changes.csv")).rfind("op,u,v\n", 0) == 0);

  write(spec, R"({"kind": "scripted", "params": {"script": [{"op": "add", "u": 0, "v": 79}]}})");
  CHECK(run("adversary --graph " + g + " --labels " + l + " --spec " + spec) == 1);
  write(spec, R"({"kind": "random_monotone", "params": {"bogus": 1}})");
  CHECK(run("adversary --graph " + g + " --labels " + l + " --spec " + spec) == 1);
}

TEST_CASE("phase, robustness, tails and omega sweep") {
  const auto csv = wd()("phase.csv"), trials = wd()("trials.csv");
  CHECK(run("phase --n 40 --pi 0.5,0.5 --p-tilde 9 --q-tilde 1 --trials 2 --seed 5 --out " + csv + " --trials-out " + trials) == 0);
  std::istringstream rows(slurp(csv));
  int count = 0;
  for (std::string line; std::getline(rows, line);) ++count;
  CHECK(count == 2);
  CHECK(slurp(wd()("stderr.txt")).find("estimated time") != std::string::npos);

  const auto cfg = wd()("cfg.json");
  write(cfg, R"({"n": 40, "pi": [0.5, 0.5], "p_tilde": 9, "q_tilde": 1, "trials": 2, "seed": 5,
                 "adversary": {"kind": "random_monotone", "params": {"add_prob": 0.3, "remove_prob": 0.3}}})");
  CHECK(run("robustness --config " + cfg + " --out " + wd()("rob.csv")) == 0);
  CHECK(slurp(wd()("rob.csv")).find("violations") != std::string::npos);
  CHECK(run("phase --config " + wd()("missing.json")) == 1);

  const auto tails = wd()("tails.json");
  CHECK(run("tails --n 2000 --pi 0.5,0.5 --p-tilde 3 --q-tilde 2 --samples 5000 --seed 2", tails) == 0);
  CHECK(json::parse(slurp(tails)).at("samples").get<int>() == 5000);

  const auto g = wd()("g6.txt"), l = wd()("l6.txt");
  REQUIRE(run("sample --n 60 --pi 0.5,0.5 --p-tilde 14 --q-tilde 2 --seed 3 --out-graph " + g + " --out-labels " + l) == 0);
  CHECK(run("omega-sweep --graph " + g + " --labels " + l + " --r 2 --omega 0.6,0.99 --out " + wd()("sweep.csv")) == 0);
  std::istringstream sweep(slurp(wd()("sweep.csv")));
  count = 0;
  for (std::string line; std::getline(sweep, line);) ++count;
  CHECK(count == 3);
}

TEST_CASE("unknown subcommand and missing arguments") {
  CHECK(run("frobnicate") != 0);
  CHECK(run("") != 0);
  CHECK(run("certify --graph x") != 0);
}
