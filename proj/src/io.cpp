#include "ts2img/io.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ts2img::io {

namespace {

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<TimeSeries> read_series_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<TimeSeries> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        TimeSeries series;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                series.values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": not a number: '" + cell + "'");
            }
        }
        series.validate();
        out.push_back(std::move(series));
    }
    if (out.empty())
        throw std::runtime_error(path + ": no series found");
    return out;
}

void write_series_csv(const std::string& path, const std::vector<TimeSeries>& series) {
    std::ofstream out = open_out(path);
    for (const TimeSeries& s : series) {
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (i)
                out << ',';
            out << format_double(s.values[i]);
        }
        out << '\n';
    }
}

std::vector<TimeSeries> read_series_binary(const std::string& path) {
    nlohmann::json desc;
    {
        std::ifstream meta = open_in(path + ".json");
        meta >> desc;
    }
    const auto count = desc.at("series_count").get<std::size_t>();
    const auto length = desc.at("series_length").get<std::size_t>();

    std::ifstream in = open_in(path, std::ios::binary);
    std::vector<float> raw(count * length);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != raw.size() * sizeof(float))
        throw std::runtime_error(path + ": truncated binary series file");

    std::vector<TimeSeries> out(count);
    for (std::size_t s = 0; s < count; ++s) {
        out[s].values.assign(raw.begin() + static_cast<std::ptrdiff_t>(s * length),
                             raw.begin() + static_cast<std::ptrdiff_t>((s + 1) * length));
        out[s].validate();
    }
    return out;
}

void write_series_binary(const std::string& path, const std::vector<TimeSeries>& series) {
    if (series.empty())
        throw std::invalid_argument("write_series_binary: no series");
    const std::size_t length = series.front().values.size();
    for (const TimeSeries& s : series)
        if (s.values.size() != length)
            throw std::invalid_argument("write_series_binary: series lengths differ");

    {
        nlohmann::json desc{{"series_count", series.size()}, {"series_length", length}};
        std::ofstream meta = open_out(path + ".json");
        meta << desc.dump(2) << '\n';
    }
    std::ofstream out = open_out(path, std::ios::binary);
    std::vector<float> row(length);
    for (const TimeSeries& s : series) {
        for (std::size_t i = 0; i < length; ++i)
            row[i] = static_cast<float>(s.values[i]);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
}

std::vector<TimeSeries> read_series(const std::string& path, SeriesFormat format) {
    return format == SeriesFormat::Csv ? read_series_csv(path) : read_series_binary(path);
}

std::map<std::string, bool> read_labels_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::map<std::string, bool> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "series_id,label")
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected id,label");
        const std::string id = line.substr(0, comma);
        const std::string label = line.substr(comma + 1);
        if (label != "0" && label != "1")
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": label must be 0 or 1, got '" + label + "'");
        labels[id] = (label == "1");
    }
    return labels;
}

void write_labels_csv(const std::string& path,
                      const std::vector<std::pair<std::string, bool>>& labels) {
    std::ofstream out = open_out(path);
    out << "series_id,label\n";
    for (const auto& [id, anomalous] : labels)
        out << id << ',' << (anomalous ? 1 : 0) << '\n';
}

std::string report_to_csv(const DetectionReport& report) {
    std::string csv = "series_id,max_residual,threshold,decision\n";
    for (const SeriesScore& s : report.series) {
        csv += s.series_id;
        csv += ',';
        csv += format_double(s.max_residual);
        csv += ',';
        csv += format_double(s.threshold);
        csv += ',';
        csv += s.anomalous ? '1' : '0';
        csv += '\n';
    }
    return csv;
}

void write_report_csv(const std::string& path, const DetectionReport& report) {
    open_out(path) << report_to_csv(report);
}

std::string roc_to_csv(const RocCurve& curve) {
    std::string csv = "fpr,tpr\n";
    for (const auto& [fpr, tpr] : curve.points) {
        csv += format_double(fpr);
        csv += ',';
        csv += format_double(tpr);
        csv += '\n';
    }
    return csv;
}

void write_roc_csv(const std::string& path, const RocCurve& curve) {
    open_out(path) << roc_to_csv(curve);
}

std::string metrics_to_json(double tpr, double fpr, double f1, double auc) {
    nlohmann::json j{{"tpr", tpr}, {"fpr", fpr}, {"f1", f1}, {"auc", auc}};
    return j.dump(2) + "\n";
}

void write_metrics_json(const std::string& path, double tpr, double fpr, double f1, double auc) {
    open_out(path) << metrics_to_json(tpr, fpr, f1, auc);
}

}  // namespace ts2img::io
