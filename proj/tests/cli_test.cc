#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "synthetic.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr discarded and returns exit status plus stdout.
Run cli(const std::string &args) {
  const std::string command = std::string(LSCD_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE *pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run run;
  std::array<char, 4096> buffer;
  size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) run.out.append(buffer.data(), n);
  const int raw = pclose(pipe);
  run.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return run;
}

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// A scratch directory with the benchmark files and a count/CI config.
struct Workspace {
  std::string dir;
  std::string config;

  explicit Workspace(const std::string &name) {
    dir = (fs::path(LSCD_TEST_TMP) / ("cli_" + name)).string();
    fs::remove_all(dir);
    fs::create_directories(dir);
    static const lscd::testing::SyntheticBenchmark bench =
        lscd::testing::make_synthetic_benchmark(5, 1200);
    config = dir + "/run.cfg";
    std::ofstream(config) << lscd::testing::write_benchmark_files(bench, dir)
                          << "name = cli\nspace = count\nalignment = CI\n"
                          << "output_dir = " << dir << "/out\n";
  }
};

}  // namespace

TEST_CASE("usage errors exit with 1, help with 0") {
  CHECK(cli("").status == 1);
  CHECK(cli("frobnicate").status == 1);
  CHECK(cli("pipeline --no-such-flag 1").status == 1);
  CHECK(cli("--help").status == 0);
  CHECK(cli("pipeline --help").out.find("--space.window") != std::string::npos);
}

TEST_CASE("pipeline runs and reports") {
  const Workspace ws("pipeline");
  const Run run = cli("pipeline --config " + ws.config);
  REQUIRE(run.status == 0);
  CHECK(run.out.find("ranking\t" + ws.dir + "/out/ranking.tsv") != std::string::npos);
  CHECK(run.out.find("rho\t") != std::string::npos);
  CHECK(fs::exists(ws.dir + "/out/manifest.json"));
  CHECK(fs::exists(ws.dir + "/out/report.json"));

  const std::string first = slurp(ws.dir + "/out/ranking.tsv");
  REQUIRE(cli("pipeline --manifest " + ws.dir + "/out/manifest.json --output_dir " +
               ws.dir + "/rerun")
              .status == 0);
  CHECK(slurp(ws.dir + "/rerun/ranking.tsv") == first);
}

TEST_CASE("validation failures exit with 1") {
  const Workspace ws("validation");
  const Run check = cli("pipeline --check --config " + ws.config + " --space sgns");
  CHECK(check.status == 1);
  CHECK(check.out.find("space/alignment") != std::string::npos);
  CHECK(cli("pipeline --check --config " + ws.config).out == "ok\n");
  CHECK(cli("pipeline --config " + ws.config + " --measure FD").status == 1);
  CHECK(cli("pipeline --config " + ws.config + " --space.window zero").status == 1);
  CHECK(cli("pipeline --config " + ws.config + " --alignment VI").status == 1);
}

TEST_CASE("missing or malformed inputs exit with 2") {
  const Workspace ws("input");
  CHECK(cli("pipeline --config " + ws.dir + "/absent.cfg").status == 2);
  CHECK(cli("pipeline --config " + ws.config + " --corpus_a.path " + ws.dir + "/none.txt")
            .status == 2);
  std::ofstream(ws.dir + "/bad.txt") << "1800 no tab here\n";
  CHECK(cli("ingest --config " + ws.config + " --corpus_a.path " + ws.dir + "/bad.txt")
            .status == 2);
}

TEST_CASE("degenerate evaluation exits with 3") {
  const Workspace ws("numerical");
  std::ofstream(ws.dir + "/flat.tsv") << "changed0\t0.5\nstable0\t0.5\nstable1\t0.5\n";
  CHECK(cli("evaluate --config " + ws.config + " --ranking " + ws.dir + "/flat.tsv").status ==
        3);
}

TEST_CASE("flags override the config file") {
  const Workspace ws("override");
  const Run a = cli("ingest --config " + ws.config);
  const Run b = cli("ingest --config " + ws.config + " --corpus_a.label other");
  REQUIRE(a.status == 0);
  CHECK(a.out.rfind("label\tt1\n", 0) == 0);
  CHECK(b.out.rfind("label\tother\n", 0) == 0);
  const Run c = cli("ingest --config " + ws.config + " --min_count 100000");
  CHECK(c.out.find("vocabulary\t0\n") != std::string::npos);
}

TEST_CASE("stage subcommands compose into a ranking") {
  const Workspace ws("stages");
  const std::string cfg = " --config " + ws.config;
  REQUIRE(cli("ingest --period b" + cfg).status == 0);
  REQUIRE(cli("train --period a --out " + ws.dir + "/a.space" + cfg).status == 0);
  REQUIRE(cli("train --period b --out " + ws.dir + "/b.space" + cfg).status == 0);
  const Run align = cli("align --space-a " + ws.dir + "/a.space --space-b " + ws.dir +
                         "/b.space --out-a " + ws.dir + "/a.al --out-b " + ws.dir + "/b.al" + cfg);
  REQUIRE(align.status == 0);
  CHECK(align.out.rfind("shared_rows\t", 0) == 0);
  REQUIRE(cli("measure --space-a " + ws.dir + "/a.al --space-b " + ws.dir + "/b.al --out " +
               ws.dir + "/ranking.tsv" + cfg)
              .status == 0);

  // The staged run matches the one-shot pipeline.
  REQUIRE(cli("pipeline" + cfg).status == 0);
  CHECK(slurp(ws.dir + "/ranking.tsv") == slurp(ws.dir + "/out/ranking.tsv"));

  const Run eval = cli("evaluate --ranking " + ws.dir + "/ranking.tsv --out " + ws.dir +
                        "/eval.json" + cfg);
  CHECK(eval.status == 0);
  CHECK(eval.out.rfind("rho\t", 0) == 0);
  CHECK(fs::exists(ws.dir + "/eval.json"));

  const Run fd = cli("measure --measure FD --alignment none" + cfg);
  CHECK(fd.status == 0);
  CHECK(std::count(fd.out.begin(), fd.out.end(), '\n') ==
        lscd::testing::kChangedWords + lscd::testing::kStableWords);
  CHECK(cli("align --alignment VI --space-a x --space-b y --out-a p --out-b q" + cfg).status ==
        1);
}

TEST_CASE("leaderboard over run directories") {
  const Workspace ws("leaderboard");
  const std::string cfg = " --config " + ws.config;
  REQUIRE(cli("pipeline --name count-ci --output_dir " + ws.dir + "/r1" + cfg).status == 0);
  REQUIRE(cli("pipeline --name ppmi-ci --space ppmi --output_dir " + ws.dir + "/r2" + cfg)
              .status == 0);
  const Run table = cli("leaderboard " + ws.dir + "/r1 " + ws.dir + "/r2/report.json");
  REQUIRE(table.status == 0);
  CHECK(table.out.find("count-ci") != std::string::npos);
  CHECK(table.out.find("PPMI") != std::string::npos);
  const Run tsv = cli("leaderboard --tsv " + ws.dir + "/r1");
  CHECK(tsv.out.rfind("name\tspace\talign\tmeasure\tspearman\tn\n", 0) == 0);
  CHECK(tsv.out.find("count-ci\tCNT\tCI\tCD\t") != std::string::npos);
  CHECK(cli("leaderboard " + ws.dir + "/nothing").status == 2);
}
