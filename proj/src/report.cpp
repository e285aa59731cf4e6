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

#include "drnet/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "drnet/key_value.hpp"

namespace drnet {
namespace {

const std::vector<TableRow> kIostarRows = {
    {"Abbasi-Sureshjani et al.", "2015", "0.7863", "0.9747", "0.9501", "0.9615", "0.7752"},
    {"Zhang et al.", "2016", "0.7545", "0.9740", "0.9514", "0.9626", "0.7318"},
    {"Meyer et al.", "2017", "0.8038", "0.9801", "0.9695", "0.9771", "0.7920"},
    {"Srinidhi et al.", "2018", "0.8269", "0.9669", "0.9564", "0.9663", "0.7057"},
    {"DRNet", "2019", "0.8082", "0.9854", "0.9713", "0.9873", "0.8017"},
};

const std::vector<TableRow> kRcsloRows = {
    {"Zhang et al.", "2016", "0.7787", "0.9710", "0.9512", "0.9626", "0.7327"},
    {"Meyer et al.", "2017", "0.8090", "0.9801", "0.9623", "0.9807", "0.7905"},
    {"Srinidhi et al.", "2018", "0.8488", "0.9666", "0.9581", "0.9678", "0.7029"},
    {"DRNet", "2019", "0.8151", "0.9879", "0.9744", "0.9848", "0.8190"},
};

const char* kCsvHeader = "Method,Year,Sen,Spe,Acc,AUC,MCC";

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fixed4(const std::optional<double>& v) { return v ? fixed4(*v) : "n/a"; }

std::string full(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw FormatError("unterminated quote in CSV line: " + line);
  fields.push_back(std::move(cur));
  return fields;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open for writing: " + path.string());
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) {
    throw FormatError(path.string() + ": expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

std::optional<double> optional_real(const std::string& key, const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_real(key, s);
}

}  // namespace

const std::vector<TableRow>& baseline_rows(DatasetLayout layout) {
  return layout == DatasetLayout::kIostar ? kIostarRows : kRcsloRows;
}

std::string dataset_title(DatasetLayout layout) { return layout == DatasetLayout::kIostar ? "IOSTAR" : "RC-SLO"; }

TableRow metrics_row(const std::string& method, const MetricSet& m, const std::string& year) {
  return {method, year, fixed4(m.sen), fixed4(m.spe), fixed4(m.acc), fixed4(m.auc), fixed4(m.mcc)};
}

std::string render_table(const std::vector<TableRow>& rows) {
  std::string out = "| Method | Year | Sen | Spe | Acc | AUC | MCC |\n";
  out += "|:--|:-:|:-:|:-:|:-:|:-:|:-:|\n";
  for (const auto& r : rows) {
    out += "| " + r.method + " | " + r.year + " | " + r.sen + " | " + r.spe + " | " + r.acc + " | " + r.auc +
           " | " + r.mcc + " |\n";
  }
  return out;
}

std::string render_baselines(DatasetLayout layout) { return render_table(baseline_rows(layout)); }

std::string render_report(DatasetLayout layout, const std::vector<TableRow>& measured, const std::string& notes) {
  std::vector<TableRow> rows = baseline_rows(layout);
  rows.insert(rows.end(), measured.begin(), measured.end());
  std::string out = "## Comparison on " + dataset_title(layout) + "\n\n" + render_table(rows);
  if (!notes.empty()) out += "\n" + notes;
  return out;
}

std::string render_report(DatasetLayout layout, const MetricsReport& report, const std::string& method) {
  const MetricValues& m = report.per_image_mean;
  std::vector<TableRow> measured = {
      metrics_row(method, report.pooled),
      {method + ", per-image mean", "-", fixed4(m.sen), fixed4(m.spe), fixed4(m.acc), fixed4(m.auc), fixed4(m.mcc)},
  };
  std::ostringstream notes;
  notes << "Headline row: " << report.aggregation << " aggregation over " << report.images.size() << " images ("
        << report.total.total() << " pixels, " << (report.used_fov ? "inside the field-of-view mask" : "all pixels")
        << ").\n";
  return render_report(layout, measured, notes.str());
}

std::vector<TableRow> report_rows(const MetricsReport& report, const std::string& method) {
  const MetricSet& p = report.pooled;
  const MetricValues& m = report.per_image_mean;
  return {
      {method, "-", format_real(p.sen), format_real(p.spe), format_real(p.acc), format_real(p.auc),
       format_real(p.mcc)},
      {method + ", per-image mean", "-", full(m.sen), full(m.spe), full(m.acc), full(m.auc), full(m.mcc)},
  };
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<TableRow>& rows) {
  auto out = open_out(path);
  out << kCsvHeader << "\n";
  for (const auto& r : rows) {
    out << csv_field(r.method) << ',' << csv_field(r.year) << ',' << r.sen << ',' << r.spe << ',' << r.acc << ','
        << r.auc << ',' << r.mcc << "\n";
  }
}

std::vector<TableRow> read_metrics_csv(const std::filesystem::path& path) {
  std::vector<TableRow> rows;
  for (auto& f : read_csv(path, kCsvHeader)) {
    if (f.size() != 7) throw FormatError(path.string() + ": expected 7 columns");
    rows.push_back({f[0], f[1], f[2], f[3], f[4], f[5], f[6]});
  }
  return rows;
}

void write_roc_csv(const std::filesystem::path& path, const std::vector<RocPoint>& roc) {
  auto out = open_out(path);
  out << "fpr,tpr,threshold\n";
  for (const auto& p : roc) out << format_real(p.fpr) << ',' << format_real(p.tpr) << ',' << format_real(p.threshold) << "\n";
}

void write_per_image_csv(const std::filesystem::path& path, const std::vector<ImageMetrics>& images) {
  auto out = open_out(path);
  out << "id,tp,fp,tn,fn,sen,spe,acc,auc,mcc\n";
  for (const auto& im : images) {
    const auto& c = im.counts;
    const auto& v = im.values;
    out << csv_field(im.id) << ',' << c.tp << ',' << c.fp << ',' << c.tn << ',' << c.fn << ',' << full(v.sen) << ','
        << full(v.spe) << ',' << full(v.acc) << ',' << full(v.auc) << ',' << full(v.mcc) << "\n";
  }
}

std::vector<ImageMetrics> read_per_image_csv(const std::filesystem::path& path) {
  std::vector<ImageMetrics> images;
  for (auto& f : read_csv(path, "id,tp,fp,tn,fn,sen,spe,acc,auc,mcc")) {
    if (f.size() != 10) throw FormatError(path.string() + ": expected 10 columns");
    ImageMetrics im;
    im.id = f[0];
    im.counts = {parse_int("tp", f[1]), parse_int("fp", f[2]), parse_int("tn", f[3]), parse_int("fn", f[4])};
    im.values = {optional_real("sen", f[5]), optional_real("spe", f[6]), optional_real("acc", f[7]),
                 optional_real("auc", f[8]), optional_real("mcc", f[9])};
    images.push_back(std::move(im));
  }
  return images;
}

}  // namespace drnet
