// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests that drive the installed command-line binary. The
// build passes the binary location as DPD_BENCH_EXE.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "dpd/signal.hpp"
#include "helpers.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const testutil::ScratchDir& dir, const std::string& args) {
  const auto out_path = dir.file("cli_stdout.txt");
  const auto err_path = dir.file("cli_stderr.txt");
  const std::string cmd = std::string(DPD_BENCH_EXE) + " " + args + " > " +
                          out_path.string() + " 2> " + err_path.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testutil::read_file(out_path);
  r.err = testutil::read_file(err_path);
  return r;
}

std::string tiny_config_text() {
  return "epochs = 2\n"
         "batch.base = 64\n"
         "dataset.ticks = 512\n"
         "dataset.seed = 3\n";
}

std::size_t data_rows(const std::filesystem::path& csv) {
  const auto lines = testutil::split_lines(testutil::read_file(csv));
  return lines.empty() ? 0 : lines.size() - 1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate writes a loadable signal and optional target") {
  testutil::ScratchDir dir;
  const auto sig_path = dir.file("x.dpds");
  const auto tgt_path = dir.file("y.dpds");
  const CliResult r = run_cli(
      dir, "generate --out " + sig_path.string() + " --ticks 300 --seed 4 " +
               "--window 8 --target " + tgt_path.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("300 samples") != std::string::npos);

  const dpd::ComplexSignal x = dpd::load_signal(sig_path);
  REQUIRE(x.size() == 300);
  CHECK(x == dpd::generate_carrier(300, 4, 8));

  const dpd::ComplexSignal y = dpd::load_signal(tgt_path);
  CHECK(y == dpd::apply_ground_truth_distorter(
                 x, dpd::MemoryPolyCoeffs::defaults()));
}

TEST_CASE("train runs a config file and writes its reports") {
  testutil::ScratchDir dir;
  const auto cfg_path = dir.file("exp.cfg");
  testutil::write_file(cfg_path, tiny_config_text());
  const auto out_dir = dir.file("run");

  const CliResult r = run_cli(dir, "train --config " + cfg_path.string() +
                                       " --out " + out_dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("seed 1:") != std::string::npos);
  CHECK(r.out.find("reports in") != std::string::npos);
  CHECK(std::filesystem::exists(out_dir / "seed_1.csv"));
  CHECK(std::filesystem::exists(out_dir / "seed_1.json"));
  CHECK(std::filesystem::exists(out_dir / "aggregate.json"));

  const auto lines =
      testutil::split_lines(testutil::read_file(out_dir / "seed_1.csv"));
  REQUIRE(!lines.empty());
  CHECK(lines[0] ==
        "era,epoch,steps,time_s,batch,lr,loss,nmse_db,mean_nmse_db,min_nmse_db");
  CHECK(lines.size() == 3);  // two epochs
}

TEST_CASE("train flags override framework, optimizer, and seed") {
  testutil::ScratchDir dir;
  const auto cfg_path = dir.file("exp.cfg");
  testutil::write_file(cfg_path, tiny_config_text() + "segments = 4\n");
  const auto out_dir = dir.file("online");

  const CliResult r = run_cli(
      dir, "train --config " + cfg_path.string() +
               " --framework online --optimizer adamax --seed 5 --out " +
               out_dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("seed 5:") != std::string::npos);
  CHECK(std::filesystem::exists(out_dir / "seed_5.csv"));
  CHECK(!std::filesystem::exists(out_dir / "seed_1.csv"));

  // Online runs emit one row per era: segments - 1 of them.
  CHECK(data_rows(out_dir / "seed_5.csv") == 3);
}

TEST_CASE("repeated invocations produce identical reports modulo time") {
  testutil::ScratchDir dir;
  const auto cfg_path = dir.file("exp.cfg");
  testutil::write_file(cfg_path, tiny_config_text());

  const CliResult a = run_cli(dir, "train --config " + cfg_path.string() +
                                       " --out " + dir.file("a").string());
  const CliResult b = run_cli(dir, "train --config " + cfg_path.string() +
                                       " --out " + dir.file("b").string());
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  const std::string csv_a = testutil::read_file(dir.file("a") / "seed_1.csv");
  const std::string csv_b = testutil::read_file(dir.file("b") / "seed_1.csv");
  CHECK(testutil::drop_csv_column(csv_a, 3) ==
        testutil::drop_csv_column(csv_b, 3));
}

TEST_CASE("compare sweeps the roster and writes the table") {
  testutil::ScratchDir dir;
  const auto cfg_path = dir.file("exp.cfg");
  testutil::write_file(cfg_path,
                       "epochs = 1\nbatch.base = 128\ndataset.ticks = 512\n");
  const auto out_dir = dir.file("cmp");

  const CliResult r = run_cli(dir, "compare --config " + cfg_path.string() +
                                       " --out " + out_dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("method,nmse_db,mean_nmse_db") != std::string::npos);
  CHECK(r.out.find("adam,") != std::string::npos);
  CHECK(r.out.find("sgd,") != std::string::npos);

  const auto lines =
      testutil::split_lines(testutil::read_file(out_dir / "compare.csv"));
  CHECK(lines.size() == 11);  // header + ten methods
}

TEST_CASE("a missing config file fails cleanly") {
  testutil::ScratchDir dir;
  const CliResult r =
      run_cli(dir, "train --config " + dir.file("nope.cfg").string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("config errors surface the offending line") {
  testutil::ScratchDir dir;
  const auto cfg_path = dir.file("bad.cfg");
  testutil::write_file(cfg_path,
                       "lr.kind = cyclic\nlr.max = 0.01\nlr.min = 0.02\n");
  const CliResult r =
      run_cli(dir, "train --config " + cfg_path.string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("an unknown optimizer flag is rejected") {
  testutil::ScratchDir dir;
  const auto cfg_path = dir.file("exp.cfg");
  testutil::write_file(cfg_path, tiny_config_text());
  const CliResult r = run_cli(dir, "train --config " + cfg_path.string() +
                                       " --optimizer adamw --out " +
                                       dir.file("x").string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("a bad framework flag is rejected") {
  testutil::ScratchDir dir;
  const auto cfg_path = dir.file("exp.cfg");
  testutil::write_file(cfg_path, tiny_config_text());
  const CliResult r = run_cli(dir, "train --config " + cfg_path.string() +
                                       " --framework sideways");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("standard or online") != std::string::npos);
}

TEST_CASE("invocation without a subcommand fails") {
  testutil::ScratchDir dir;
  const CliResult r = run_cli(dir, "");
  CHECK(r.exit_code != 0);
}

TEST_CASE("generate requires an output path") {
  testutil::ScratchDir dir;
  const CliResult r = run_cli(dir, "generate --ticks 50");
  CHECK(r.exit_code != 0);
}

}  // TEST_SUITE("cli")
