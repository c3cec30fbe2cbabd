// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#include "dpd/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace dpd {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string nonfinite_token(double v) {
  if (std::isnan(v)) return "nan";
  return v > 0.0 ? "inf" : "-inf";
}

// JSON value for a double: a number when finite, a token string otherwise.
ordered_json json_double(double v) {
  if (std::isfinite(v)) return v;
  return nonfinite_token(v);
}

void check_report(const RunReport& report) {
  if (report.records.empty()) {
    throw InvalidArgument("refusing to serialize an empty report");
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw InvalidArgument("cannot open " + path.string() + " for writing");
  }
  return out;
}

}  // namespace

std::string format_full(double v) {
  if (!std::isfinite(v)) return nonfinite_token(v);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_db(double v) {
  if (!std::isfinite(v)) return nonfinite_token(v);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void write_report_csv(const RunReport& report,
                      const std::filesystem::path& path) {
  check_report(report);
  std::ofstream out = open_for_write(path);
  out << "era,epoch,steps,time_s,batch,lr,loss,nmse_db,mean_nmse_db,min_nmse_db\n";
  for (const RunRecord& r : report.records) {
    out << r.era << ',' << r.epoch << ',' << r.steps << ','
        << format_full(r.time_s) << ',' << r.batch << ',' << format_full(r.lr)
        << ',' << format_full(r.loss) << ',' << format_full(r.nmse_db) << ','
        << format_full(r.mean_nmse_db) << ',' << format_full(r.min_nmse_db)
        << '\n';
  }
  out.flush();
  if (!out) throw InvalidArgument("write to " + path.string() + " failed");
}

void write_report_json(const RunReport& report,
                       const std::filesystem::path& path) {
  check_report(report);

  ordered_json doc;
  doc["records"] = ordered_json::array();
  for (const RunRecord& r : report.records) {
    ordered_json rec;
    rec["era"] = r.era;
    rec["epoch"] = r.epoch;
    rec["steps"] = r.steps;
    rec["time_s"] = json_double(r.time_s);
    rec["batch"] = r.batch;
    rec["lr"] = json_double(r.lr);
    rec["loss"] = json_double(r.loss);
    rec["nmse_db"] = json_double(r.nmse_db);
    rec["mean_nmse_db"] = json_double(r.mean_nmse_db);
    rec["min_nmse_db"] = json_double(r.min_nmse_db);
    doc["records"].push_back(std::move(rec));
  }

  ordered_json summary;
  summary["last_nmse_db"] = json_double(report.summary.last_nmse_db);
  summary["mean_nmse_db"] = json_double(report.summary.mean_nmse_db);
  summary["min_nmse_db"] = json_double(report.summary.min_nmse_db);
  summary["total_steps"] = report.summary.total_steps;
  summary["total_time_s"] = json_double(report.summary.total_time_s);
  if (report.summary.swa_nmse_db) {
    summary["swa_nmse_db"] = json_double(*report.summary.swa_nmse_db);
  }
  doc["summary"] = std::move(summary);
  doc["warnings"] = report.warnings;

  std::ofstream out = open_for_write(path);
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw InvalidArgument("write to " + path.string() + " failed");
}

}  // namespace dpd
