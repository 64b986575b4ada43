#pragma once

#include <map>
#include <string>
#include <vector>

#include "ts2img/detector.hpp"
#include "ts2img/metrics.hpp"
#include "ts2img/signal.hpp"

namespace ts2img::io {

enum class SeriesFormat { Csv, BinaryF32 };

// CSV: one series per row, comma-separated decimal samples.
std::vector<TimeSeries> read_series_csv(const std::string& path);
void write_series_csv(const std::string& path, const std::vector<TimeSeries>& series);

// Raw little-endian float32 samples with a JSON sidecar (<path>.json)
// holding {"series_count": N, "series_length": L}.
std::vector<TimeSeries> read_series_binary(const std::string& path);
void write_series_binary(const std::string& path, const std::vector<TimeSeries>& series);

std::vector<TimeSeries> read_series(const std::string& path, SeriesFormat format);

// labels CSV: series_id,label with label 0 = healthy, 1 = anomalous.
// Series ids are row indices ("0", "1", ...) for CSV/binary datasets.
std::map<std::string, bool> read_labels_csv(const std::string& path);
void write_labels_csv(const std::string& path, const std::vector<std::pair<std::string, bool>>& labels);

// report CSV: series_id,max_residual,threshold,decision
std::string report_to_csv(const DetectionReport& report);
void write_report_csv(const std::string& path, const DetectionReport& report);

std::string roc_to_csv(const RocCurve& curve);
void write_roc_csv(const std::string& path, const RocCurve& curve);

// summary JSON {tpr, fpr, f1, auc}
std::string metrics_to_json(double tpr, double fpr, double f1, double auc);
void write_metrics_json(const std::string& path, double tpr, double fpr, double f1, double auc);

}  // namespace ts2img::io
