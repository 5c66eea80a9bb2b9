/* Copyright 2026 The Trajeval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "trajeval/report.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "trajeval/error.h"

namespace trajeval {
namespace {

using Json = nlohmann::ordered_json;

Json NullableMetric(double value, std::size_t samples) {
  if (samples == 0) return nullptr;
  return value;
}

std::string CsvField(double value, std::size_t samples) {
  if (samples == 0) return "";
  return FormatDouble(value);
}

}  // namespace

std::string FormatDouble(double value) {
  return Json(value).dump();
}

std::string MetricsReportToJson(const MetricsReport& report) {
  Json root;
  root["mode"] = EvalModeName(report.mode);
  root["scenario_count"] = report.scenario_count;
  root["evaluated_samples"] = report.evaluated_samples;
  Json cells = Json::array();
  for (const CellReport& cell : report.cells) {
    Json entry;
    entry["object_type"] = ObjectTypeName(cell.type);
    entry["horizon_seconds"] = cell.horizon.seconds;
    entry["horizon_step"] = cell.horizon.step;
    entry["min_ade"] = NullableMetric(cell.min_ade, cell.ade_samples);
    entry["ade_samples"] = cell.ade_samples;
    entry["min_fde"] = NullableMetric(cell.min_fde, cell.fde_samples);
    entry["fde_samples"] = cell.fde_samples;
    entry["miss_rate"] = NullableMetric(cell.miss_rate, cell.miss_samples);
    entry["miss_samples"] = cell.miss_samples;
    entry["overlap_rate"] =
        NullableMetric(cell.overlap_rate, cell.overlap_samples);
    entry["overlap_samples"] = cell.overlap_samples;
    entry["mean_ap"] =
        cell.mean_ap_defined ? Json(cell.mean_ap) : Json(nullptr);
    Json buckets = Json::array();
    for (const BucketReport& bucket : cell.buckets) {
      Json b;
      b["bucket"] = ShapeBucketName(bucket.bucket);
      b["support"] = bucket.support;
      b["ap"] = NullableMetric(bucket.ap, bucket.support);
      buckets.push_back(std::move(b));
    }
    entry["buckets"] = std::move(buckets);
    cells.push_back(std::move(entry));
  }
  root["cells"] = std::move(cells);
  Json missing = Json::array();
  for (const MissingPrediction& entry : report.missing) {
    Json m;
    m["scenario_id"] = entry.scenario_id;
    m["agent_ids"] = entry.agent_ids;
    m["reason"] = entry.reason;
    missing.push_back(std::move(m));
  }
  root["missing_predictions"] = std::move(missing);
  return root.dump(2) + "\n";
}

std::string MetricsReportToCsv(const MetricsReport& report) {
  std::ostringstream out;
  out << "object_type,horizon_seconds,bucket,min_ade,ade_samples,min_fde,"
         "fde_samples,miss_rate,miss_samples,overlap_rate,overlap_samples,"
         "mean_ap,bucket_ap,bucket_support\n";
  for (const CellReport& cell : report.cells) {
    for (const BucketReport& bucket : cell.buckets) {
      out << ObjectTypeName(cell.type) << ','
          << FormatDouble(cell.horizon.seconds) << ','
          << ShapeBucketName(bucket.bucket) << ','
          << CsvField(cell.min_ade, cell.ade_samples) << ','
          << cell.ade_samples << ','
          << CsvField(cell.min_fde, cell.fde_samples) << ','
          << cell.fde_samples << ','
          << CsvField(cell.miss_rate, cell.miss_samples) << ','
          << cell.miss_samples << ','
          << CsvField(cell.overlap_rate, cell.overlap_samples) << ','
          << cell.overlap_samples << ','
          << (cell.mean_ap_defined ? FormatDouble(cell.mean_ap) : "") << ','
          << CsvField(bucket.ap, bucket.support) << ','
          << bucket.support << '\n';
    }
  }
  return out.str();
}

std::string PrCurvesToCsv(const MetricsReport& report) {
  std::ostringstream out;
  out << "object_type,horizon_seconds,bucket,confidence,precision,recall\n";
  for (const CellReport& cell : report.cells) {
    for (const BucketReport& bucket : cell.buckets) {
      for (const PrPoint& point : bucket.curve) {
        out << ObjectTypeName(cell.type) << ','
            << FormatDouble(cell.horizon.seconds) << ','
            << ShapeBucketName(bucket.bucket) << ','
            << FormatDouble(point.confidence) << ','
            << FormatDouble(point.precision) << ','
            << FormatDouble(point.recall) << '\n';
      }
    }
  }
  return out.str();
}

void WriteTextFile(const std::string& path, std::string_view content) {
  const std::filesystem::path fs_path(path);
  if (fs_path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(fs_path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot open " + path + " for writing");
  }
  out.write(content.data(),
            static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw Error(ErrorCode::kIoError, "failed writing " + path);
  }
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace trajeval
