// Copyright 2026 The DRNet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "drnet/data.hpp"
#include "drnet/evaluation.hpp"

namespace drnet {

/// One row of a comparison table, with values kept as printed.
struct TableRow {
  std::string method, year, sen, spe, acc, auc, mcc;
  friend bool operator==(const TableRow&, const TableRow&) = default;
};

/// Published comparison rows for the dataset, verbatim.
const std::vector<TableRow>& baseline_rows(DatasetLayout layout);

/// Dataset display name ("IOSTAR", "RC-SLO").
std::string dataset_title(DatasetLayout layout);

/// Formats metrics to four decimals.
TableRow metrics_row(const std::string& method, const MetricSet& m, const std::string& year = "-");

/// Markdown table with columns Method | Year | Sen | Spe | Acc | AUC | MCC.
std::string render_table(const std::vector<TableRow>& rows);

/// The reference table of published rows; identical to
/// data/baselines/<layout>.md.
std::string render_baselines(DatasetLayout layout);

/// Full report: a heading, the published rows followed by `measured`, and
/// notes on aggregation mode and field-of-view use.
std::string render_report(DatasetLayout layout, const std::vector<TableRow>& measured, const std::string& notes = "");

/// Report for one evaluation: the pooled headline row plus the per-image mean row.
std::string render_report(DatasetLayout layout, const MetricsReport& report, const std::string& method = "DRNet (this run)");

void write_metrics_csv(const std::filesystem::path& path, const std::vector<TableRow>& rows);
std::vector<TableRow> read_metrics_csv(const std::filesystem::path& path);
void write_roc_csv(const std::filesystem::path& path, const std::vector<RocPoint>& roc);
void write_per_image_csv(const std::filesystem::path& path, const std::vector<ImageMetrics>& images);
std::vector<ImageMetrics> read_per_image_csv(const std::filesystem::path& path);

/// Rows for the metrics CSV: pooled headline and per-image mean.
std::vector<TableRow> report_rows(const MetricsReport& report, const std::string& method = "DRNet (this run)");

}  // namespace drnet
