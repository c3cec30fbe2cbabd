// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "dpd/harness.hpp"

namespace dpd {

// Full-precision decimal rendering (round trips a double exactly);
// non-finite values become the tokens "-inf", "inf", "nan".
std::string format_full(double v);

// Two-decimal dB rendering for summary tables, e.g. -33.041 -> "-33.04";
// the -infinity sentinel renders as "-inf".
std::string format_db(double v);

// CSV report: the documented header
// era,epoch,steps,time_s,batch,lr,loss,nmse_db,mean_nmse_db,min_nmse_db
// then one row per record, full precision. An empty report is an error;
// no file is created for one.
void write_report_csv(const RunReport& report,
                      const std::filesystem::path& path);

// JSON equivalent: records array, summary object, warnings array. Doubles
// are JSON numbers except non-finite values, which become tokens as in
// format_full.
void write_report_json(const RunReport& report,
                       const std::filesystem::path& path);

}  // namespace dpd
