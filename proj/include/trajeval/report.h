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

// Deterministic report serialization: key-ordered JSON, flat CSV, and
// precision-recall curve tables. Identical reports serialize to identical
// bytes regardless of worker count or platform locale.

#ifndef TRAJEVAL_REPORT_H_
#define TRAJEVAL_REPORT_H_

#include <string>
#include <string_view>

#include "trajeval/metrics.h"

namespace trajeval {

// Shortest round-trip decimal form, locale independent.
std::string FormatDouble(double value);

// Key-ordered JSON document, one trailing newline. Metrics whose sample
// count (or bucket support) is zero serialize as null.
std::string MetricsReportToJson(const MetricsReport& report);

// One row per object_type x horizon x bucket; the cell-level metrics repeat
// on each of the cell's bucket rows. Undefined values are empty fields.
std::string MetricsReportToCsv(const MetricsReport& report);

// One row per precision-recall curve point of every populated bucket.
std::string PrCurvesToCsv(const MetricsReport& report);

// Writes content verbatim, creating parent directories. Throws kIoError.
void WriteTextFile(const std::string& path, std::string_view content);

// Reads a whole file. Throws kIoError when it cannot be opened.
std::string ReadTextFile(const std::string& path);

}  // namespace trajeval

#endif  // TRAJEVAL_REPORT_H_
