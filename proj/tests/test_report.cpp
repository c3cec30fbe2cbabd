// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpd/report.hpp"
#include "helpers.hpp"

using dpd::RunRecord;
using dpd::RunReport;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  REQUIRE(end == text.c_str() + text.size());
  return v;
}

RunReport sample_report() {
  RunReport report;
  RunRecord a;
  a.era = 0;
  a.epoch = 0;
  a.steps = 8;
  a.time_s = 0.125;
  a.batch = 100;
  a.lr = 0.01;
  a.loss = 0.0123456789012345678;
  a.nmse_db = -21.5;
  a.mean_nmse_db = -21.5;
  a.min_nmse_db = -21.5;
  RunRecord b = a;
  b.epoch = 1;
  b.steps = 16;
  b.time_s = 0.25;
  b.loss = 1e-300;
  b.nmse_db = -kInf;
  b.mean_nmse_db = -kInf;
  b.min_nmse_db = -kInf;
  report.records = {a, b};
  report.summary.last_nmse_db = -kInf;
  report.summary.mean_nmse_db = -kInf;
  report.summary.min_nmse_db = -kInf;
  report.summary.total_steps = 16;
  report.summary.total_time_s = 0.25;
  report.warnings = {"zero residual encountered"};
  return report;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("full-precision rendering round trips exactly") {
  const double cases[] = {0.0,
                          1.0,
                          -1.0,
                          0.1,
                          1.0 / 3.0,
                          3.141592653589793,
                          -21.573294810473913,
                          1e-300,
                          5e-324,  // smallest denormal
                          1.7976931348623157e308,
                          6e-3,
                          1e-4};
  for (const double v : cases) {
    const std::string text = dpd::format_full(v);
    CHECK(parse_double(text) == v);
  }

  // Negative zero keeps its sign through the text form.
  const std::string nz = dpd::format_full(-0.0);
  CHECK(std::signbit(parse_double(nz)));
}

TEST_CASE("non-finite values render as tokens") {
  CHECK(dpd::format_full(kInf) == "inf");
  CHECK(dpd::format_full(-kInf) == "-inf");
  CHECK(dpd::format_full(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("summary-table rendering uses two decimals") {
  CHECK(dpd::format_db(-33.041) == "-33.04");
  CHECK(dpd::format_db(0.0) == "0.00");
  CHECK(dpd::format_db(-1.0) == "-1.00");
  CHECK(dpd::format_db(12.3456) == "12.35");
  CHECK(dpd::format_db(-kInf) == "-inf");
  CHECK(dpd::format_db(kInf) == "inf");
}

TEST_CASE("csv report pins its header and preserves values") {
  testutil::ScratchDir dir;
  const auto path = dir.file("report.csv");
  const RunReport report = sample_report();
  dpd::write_report_csv(report, path);

  const std::vector<std::string> lines =
      testutil::split_lines(testutil::read_file(path));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        "era,epoch,steps,time_s,batch,lr,loss,nmse_db,mean_nmse_db,min_nmse_db");

  // First row: integer fields verbatim, doubles round-trippable.
  std::vector<std::string> fields;
  {
    std::string cell;
    for (const char c : lines[1]) {
      if (c == ',') {
        fields.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    fields.push_back(cell);
  }
  REQUIRE(fields.size() == 10);
  CHECK(fields[0] == "0");
  CHECK(fields[1] == "0");
  CHECK(fields[2] == "8");
  CHECK(parse_double(fields[3]) == 0.125);
  CHECK(fields[4] == "100");
  CHECK(parse_double(fields[5]) == 0.01);
  CHECK(parse_double(fields[6]) == report.records[0].loss);
  CHECK(parse_double(fields[7]) == -21.5);

  // Second row carries the sentinel token in the nmse columns.
  CHECK(lines[2].find("-inf") != std::string::npos);
  CHECK(lines[2].rfind("-inf,-inf,-inf") == lines[2].size() - 14);
}

TEST_CASE("an empty report refuses to serialize and leaves no file") {
  testutil::ScratchDir dir;
  const auto csv_path = dir.file("empty.csv");
  const auto json_path = dir.file("empty.json");
  const RunReport empty;
  CHECK_THROWS_AS(dpd::write_report_csv(empty, csv_path), dpd::InvalidArgument);
  CHECK_THROWS_AS(dpd::write_report_json(empty, json_path),
                  dpd::InvalidArgument);
  CHECK(!std::filesystem::exists(csv_path));
  CHECK(!std::filesystem::exists(json_path));
}

TEST_CASE("json report parses back with tokens for non-finite values") {
  testutil::ScratchDir dir;
  const auto path = dir.file("report.json");
  const RunReport report = sample_report();
  dpd::write_report_json(report, path);

  const nlohmann::json doc =
      nlohmann::json::parse(testutil::read_file(path));
  REQUIRE(doc.contains("records"));
  REQUIRE(doc.contains("summary"));
  REQUIRE(doc.contains("warnings"));

  const auto& records = doc["records"];
  REQUIRE(records.size() == 2);
  CHECK(records[0]["era"] == 0);
  CHECK(records[0]["epoch"] == 0);
  CHECK(records[0]["steps"] == 8);
  CHECK(records[0]["batch"] == 100);
  CHECK(records[0]["lr"].get<double>() == 0.01);
  CHECK(records[0]["loss"].get<double>() == report.records[0].loss);
  CHECK(records[0]["nmse_db"].get<double>() == -21.5);

  // The sentinel row stores strings, not JSON numbers.
  CHECK(records[1]["nmse_db"].is_string());
  CHECK(records[1]["nmse_db"] == "-inf");
  CHECK(records[1]["mean_nmse_db"] == "-inf");
  CHECK(records[1]["min_nmse_db"] == "-inf");
  CHECK(records[1]["loss"].get<double>() == 1e-300);

  const auto& summary = doc["summary"];
  CHECK(summary["last_nmse_db"] == "-inf");
  CHECK(summary["total_steps"] == 16);
  CHECK(summary["total_time_s"].get<double>() == 0.25);
  CHECK(!summary.contains("swa_nmse_db"));

  REQUIRE(doc["warnings"].size() == 1);
  CHECK(doc["warnings"][0] == "zero residual encountered");
}

TEST_CASE("json report includes the averaged-point metric when present") {
  testutil::ScratchDir dir;
  const auto path = dir.file("swa.json");
  RunReport report = sample_report();
  report.summary.swa_nmse_db = -28.25;
  dpd::write_report_json(report, path);

  const nlohmann::json doc =
      nlohmann::json::parse(testutil::read_file(path));
  REQUIRE(doc["summary"].contains("swa_nmse_db"));
  CHECK(doc["summary"]["swa_nmse_db"].get<double>() == -28.25);
}

}  // TEST_SUITE("report")
