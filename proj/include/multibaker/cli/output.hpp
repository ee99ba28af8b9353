// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace multibaker::cli {

/// Shortest text with 17 significant digits, '.' decimal point.
std::string format_real(double v);

/// Accumulates an LF-terminated CSV table.
class CsvTable {
public:
    explicit CsvTable(const std::vector<std::string>& header);

    template <typename... Cells>
    void row(const Cells&... cells) {
        std::string line;
        (append(line, cells), ...);
        line.back() = '\n';
        text_ += line;
    }

    const std::string& text() const { return text_; }

private:
    static void append(std::string& line, double v) { line += format_real(v) + ','; }
    static void append(std::string& line, int v) { line += std::to_string(v) + ','; }
    static void append(std::string& line, long v) { line += std::to_string(v) + ','; }
    static void append(std::string& line, const std::string& v) { line += v + ','; }

    std::string text_;
};

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = true;  ///< dots instead of a polyline
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

/// Minimal static SVG scatter/line chart.
std::string render_svg(const PlotSpec& spec);

std::string sha256_hex(const std::string& data);

/// nlohmann::json dumped with 2-space indent and a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace multibaker::cli
