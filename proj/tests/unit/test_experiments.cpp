// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "metricopt/errors.hpp"
#include "metricopt/experiments.hpp"

using namespace metricopt;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "metricopt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> result;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) result.push_back(line);
  return result;
}

const std::vector<std::string> kTiny = {"--dataset", "synthetic:n=150", "--max-epochs", "4", "--window", "2",
                                        "--batch-size", "64"};

std::vector<std::string> tiny(std::string command, std::vector<std::string> extra = {}) {
  std::vector<std::string> args = {std::move(command)};
  args.insert(args.end(), kTiny.begin(), kTiny.end());
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("dataset sources") {
    CHECK(DatasetSource::parse("synthetic-50").keep_fraction == 1.0);
    CHECK(DatasetSource::parse("synthetic-33").keep_fraction == 0.5);
    CHECK(DatasetSource::parse("synthetic-20").keep_fraction == 0.25);
    const auto imbalanced = DatasetSource::parse("synthetic-imbalanced");
    CHECK(load_source(imbalanced, 0).positive_fraction() < 0.03);
    const auto custom = DatasetSource::parse("synthetic:n=20,sigma=2,dims=4,pos=5,keep=0.5");
    CHECK(custom.blobs.n_per_class == 20);
    CHECK(custom.blobs.dims == 4);
    CHECK(load_source(custom, 1).size() == 30);
    CHECK(DatasetSource::parse("csv:/tmp/x.txt").kind == DatasetSource::Kind::csv);
    CHECK(DatasetSource::parse("data/train.csv").kind == DatasetSource::Kind::csv);
    CHECK(DatasetSource::parse("cache:/tmp/d.bin").kind == DatasetSource::Kind::cache);
    CHECK_THROWS_AS(DatasetSource::parse("mnist"), InvalidArgument);
    CHECK_THROWS_AS(DatasetSource::parse("synthetic:n=0"), InvalidArgument);
    CHECK_THROWS_AS(DatasetSource::parse("synthetic:colour=3"), InvalidArgument);
  }

  TEST_CASE("config files: top level, own section, other sections ignored") {
    const fs::path path = fs::temp_directory_path() / "metricopt_test.cfg";
    std::ofstream(path) << "# shared\ntrials = 3\nseed=7 ; trailing comment\n\n[loss-grid]\ntrials = 2\n"
                           "loss = accuracy,f1\n[fbeta-sweep]\nbeta = 1,5\n";
    const auto grid = read_config_file(path, Command::loss_grid);
    CHECK(grid.at("trials") == "2");
    CHECK(grid.at("seed") == "7");
    CHECK(grid.at("loss") == "accuracy,f1");
    CHECK_FALSE(grid.contains("beta"));
    const auto sweep = read_config_file(path, Command::fbeta_sweep);
    CHECK(sweep.at("trials") == "3");
    CHECK(sweep.at("beta") == "1,5");

    std::ofstream(path) << "trails = 3\n";
    CHECK_THROWS_AS(read_config_file(path, Command::train), InvalidArgument);
    std::ofstream(path) << "[loss-gird]\ntrials = 3\n";
    CHECK_THROWS_AS(read_config_file(path, Command::train), InvalidArgument);
  }

  TEST_CASE("spec defaults and validation") {
    const auto grid = build_spec(Command::loss_grid, {});
    CHECK(grid.trials == 10);
    CHECK(grid.losses == std::vector<std::string>{"accuracy", "f1", "auroc", "bce"});
    const auto sweep = build_spec(Command::batch_sweep, {});
    CHECK(sweep.batch_sizes == std::vector<std::size_t>{128, 1024, 2048, 4096});
    const auto compare = build_spec(Command::sigmoid_compare, {});
    CHECK(compare.approximations.size() == 2);
    const auto fbeta = build_spec(Command::fbeta_sweep, {});
    CHECK(fbeta.betas == std::vector<double>{1, 2, 3});

    CHECK_THROWS_AS(build_spec(Command::loss_grid, {{"trials", "0"}}), InvalidArgument);
    CHECK_THROWS_AS(build_spec(Command::loss_grid, {{"trials", "x"}}), InvalidArgument);
    CHECK_THROWS_AS(build_spec(Command::loss_grid, {{"loss", "hinge"}}), InvalidArgument);
    CHECK_THROWS_AS(build_spec(Command::loss_grid, {{"tau", "1.5"}}), InvalidArgument);
    CHECK_THROWS_AS(build_spec(Command::loss_grid, {{"beta", "-1"}}), InvalidArgument);
    CHECK_THROWS_AS(build_spec(Command::loss_grid, {{"format", "xml"}}), InvalidArgument);
    CHECK_THROWS_AS(build_spec(Command::evaluate, {}), InvalidArgument);

    const auto trial = grid.train_config("f1", 3.0, ApproximationKind::piecewise_linear, 256, 4);
    CHECK(trial.seed == grid.seed + 4);
    CHECK(trial.loss.beta == 1.0);
    CHECK(trial.batch_size == 256);
  }

  TEST_CASE("mean and sample standard deviation") {
    const auto [m, s] = mean_std({1.0, 2.0, 3.0});
    CHECK(m == 2.0);
    CHECK(s == 1.0);
    CHECK(mean_std({4.0}).second == 0.0);
  }

  TEST_CASE("loss grid table") {
    const auto r = cli(tiny("loss-grid", {"--trials", "1", "--loss", "accuracy,f1"}));
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 1 + 2 * 3);
    CHECK(rows[0] == "config\tloss\tmetric\tmean\tstd\ttrials\ttau_policy\tstatus");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].find("\t0.000000\t1\t") != std::string::npos);
      CHECK(rows[i].ends_with("\tok"));
    }
  }

  TEST_CASE("json output") {
    const auto r = cli(tiny("fbeta-sweep", {"--trials", "2", "--beta", "1,2", "--format", "json"}));
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["experiment"] == "fbeta-sweep");
    CHECK(doc["rows"].size() == 6);
    CHECK(doc["rows"][0]["trials"] == 2);
  }

  TEST_CASE("beta one reproduces the F1 configuration") {
    const auto grid = cli(tiny("loss-grid", {"--trials", "2", "--loss", "f1", "--format", "json"}));
    const auto sweep = cli(tiny("fbeta-sweep", {"--trials", "2", "--beta", "1", "--format", "json"}));
    REQUIRE(grid.code == 0);
    REQUIRE(sweep.code == 0);
    const auto g = nlohmann::json::parse(grid.out)["rows"];
    const auto s = nlohmann::json::parse(sweep.out)["rows"];
    CHECK(g[1]["metric"] == "f1");
    CHECK(s[0]["metric"] == "f1");
    CHECK(g[1]["mean"] == s[0]["mean"]);
  }

  TEST_CASE("concurrent trials do not change results") {
    const auto serial = cli(tiny("loss-grid", {"--trials", "3", "--loss", "f1"}));
    const auto parallel = cli(tiny("loss-grid", {"--trials", "3", "--loss", "f1", "--jobs", "3"}));
    REQUIRE(serial.code == 0);
    CHECK(serial.out == parallel.out);
  }

  TEST_CASE("sigmoid comparison rows") {
    const auto r = cli(tiny("sigmoid-compare", {"--trials", "1", "--dataset", "synthetic:n=150,keep=0.5"}));
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    CHECK(rows.size() == 1 + 2 * 2 * 2);
    CHECK(rows[1].starts_with("approx=linear\taccuracy\taccuracy"));
    CHECK(rows.back().starts_with("approx=sigmoid\tf1\tf1"));
  }

  TEST_CASE("full-split batches give zero deviation") {
    const auto r = cli(tiny("batch-sweep", {"--batch-size", "100000"}));
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].starts_with("batch=100000\tf1\tabs_f1_deviation\t0.000000\t0.000000\t1"));
  }

  TEST_CASE("a failing cell leaves its siblings intact") {
    // One positive in the whole set: whichever split misses it makes AUROC undefined.
    const auto r = cli({"loss-grid", "--dataset", "synthetic:n=60,keep=0.02", "--loss", "auroc,f1", "--trials", "1",
                        "--max-epochs", "2", "--window", "1"});
    CHECK(r.code == 2);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 7);
    CHECK(rows[1].find("\tNA\tNA\t") != std::string::npos);
    CHECK(rows[1].find("error: ") != std::string::npos);
    CHECK(rows[4].ends_with("\tok"));
  }

  TEST_CASE("exit codes for bad input") {
    CHECK(cli({"loss-grid", "--trials", "zero"}).code == 1);
    CHECK(cli({"loss-grid", "--bogus", "1"}).code == 1);
    CHECK(cli({}).code == 1);
    CHECK(cli({"loss-grid", "--dataset", "csv:/nonexistent/file.csv", "--trials", "1"}).code == 1);
    CHECK(cli({"--help"}).code == 0);
  }

  TEST_CASE("config file and flag precedence") {
    const fs::path cfg = fs::temp_directory_path() / "metricopt_cli.cfg";
    std::ofstream(cfg) << "dataset = synthetic:n=150\nmax-epochs = 3\nwindow = 2\n[loss-grid]\ntrials = 4\nloss = f1\n";
    const auto from_file = cli({"loss-grid", "--config", cfg.string()});
    REQUIRE(from_file.code == 0);
    CHECK(lines(from_file.out)[1].find("\t4\tgrid-mean") != std::string::npos);
    const auto overridden = cli({"loss-grid", "--config", cfg.string(), "--trials", "1"});
    REQUIRE(overridden.code == 0);
    CHECK(lines(overridden.out)[1].find("\t1\tgrid-mean") != std::string::npos);
  }

  TEST_CASE("train, checkpoint, evaluate") {
    const fs::path dir = fs::temp_directory_path() / "metricopt_cli_run";
    fs::create_directories(dir);
    const auto ckpt = (dir / "model.bin").string();
    const auto report = (dir / "report.json").string();
    const auto trained = cli(tiny("train", {"--checkpoint", ckpt, "--report", report}));
    REQUIRE(trained.code == 0);
    CHECK(fs::exists(ckpt));
    const auto doc = nlohmann::json::parse(std::ifstream(report));
    CHECK(doc.contains("history"));
    CHECK_FALSE(doc.contains("wall_seconds"));
    const auto evaluated = cli(tiny("evaluate", {"--checkpoint", ckpt}));
    REQUIRE(evaluated.code == 0);
    CHECK(evaluated.out == trained.out);
    CHECK(lines(evaluated.out).size() == 1 + 36 + 4 + 1);
    CHECK(cli(tiny("evaluate", {"--checkpoint", ckpt, "--dataset", "synthetic:n=150,dims=5"})).code == 1);
  }

  TEST_CASE("dataset command writes a cache that loads back") {
    const auto cache = (fs::temp_directory_path() / "metricopt_cli_cache.bin").string();
    const auto r = cli({"dataset", "--dataset", "synthetic-33", "--out", cache});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["rows"] == 7500);
    const auto again = cli({"dataset", "--dataset", "cache:" + cache});
    CHECK(again.out == r.out);
  }

  TEST_CASE("identical invocations give identical bytes") {
    const auto a = cli(tiny("sigmoid-compare", {"--trials", "2"}));
    const auto b = cli(tiny("sigmoid-compare", {"--trials", "2"}));
    CHECK(a.out == b.out);
  }
}
