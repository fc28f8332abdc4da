// Copyright 2026 The vdshadow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VDSHADOW_REPORT_H
#define VDSHADOW_REPORT_H

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "vdshadow/linalg.hpp"

namespace vdshadow {

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Minimal RFC-4180 CSV writer: header row, CRLF line endings, fields quoted
/// only when needed.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> fields) {
        rows_.push_back(std::move(fields));
    }

    std::string to_string() const {
        std::string out;
        append_line(out, header_);
        for (const auto &row : rows_) {
            append_line(out, row);
        }
        return out;
    }

    void write_file(const std::string &path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + path);
        }
        out << to_string();
    }

  private:
    static void append_line(std::string &out, const std::vector<std::string> &fields) {
        for (size_t i = 0; i < fields.size(); i++) {
            if (i) {
                out += ',';
            }
            const std::string &f = fields[i];
            if (f.find_first_of(",\"\r\n") != std::string::npos) {
                out += '"';
                for (char c : f) {
                    if (c == '"') {
                        out += '"';
                    }
                    out += c;
                }
                out += '"';
            } else {
                out += f;
            }
        }
        out += "\r\n";
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------------------
// Hand-rolled SVG line/point charts

struct SvgSeries {
    enum class Style { Line, Points, PointsWithErrorBars };

    std::string name;
    Style style = Style::Points;
    std::string color = "#1f6fb2";
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> yerr;  // error bars, when used
};

class SvgPlot {
  public:
    SvgPlot(std::string title, std::string x_label, std::string y_label, bool log_y = false)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)), log_y_(log_y) {}

    void add_series(SvgSeries series) {
        series_.push_back(std::move(series));
    }

    std::string render() const {
        const double width = 640, height = 440;
        const double ml = 70, mr = 160, mt = 40, mb = 55;
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto &s : series_) {
            for (size_t i = 0; i < s.x.size(); i++) {
                double lo = s.y[i], hi = s.y[i];
                if (s.style == SvgSeries::Style::PointsWithErrorBars && i < s.yerr.size()) {
                    lo -= s.yerr[i];
                    hi += s.yerr[i];
                }
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, transform(lo));
                ymax = std::max(ymax, transform(hi));
            }
        }
        if (xmin > xmax) {
            xmin = 0;
            xmax = 1;
            ymin = 0;
            ymax = 1;
        }
        if (xmax == xmin) {
            xmax = xmin + 1;
        }
        if (ymax == ymin) {
            ymax = ymin + 1;
        }
        double ypad = 0.07 * (ymax - ymin);
        ymin -= ypad;
        ymax += ypad;
        auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
        auto sy = [&](double y) { return height - mb - (transform(y) - ymin) / (ymax - ymin) * (height - mt - mb); };

        std::string out;
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_number(width) + "\" height=\"" +
               format_number(height) + "\">\n";
        out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out += "<text x=\"" + format_number(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
               title_ + "</text>\n";
        // Axes.
        out += line(ml, height - mb, width - mr, height - mb, "#000");
        out += line(ml, mt, ml, height - mb, "#000");
        for (int t = 0; t <= 5; t++) {
            double fx = xmin + (xmax - xmin) * t / 5.0;
            double px = sx(fx);
            out += line(px, height - mb, px, height - mb + 5, "#000");
            out += "<text x=\"" + format_number(px) + "\" y=\"" + format_number(height - mb + 18) +
                   "\" text-anchor=\"middle\" font-size=\"11\">" + format_number(round3(fx)) + "</text>\n";
            double fy = ymin + (ymax - ymin) * t / 5.0;
            double py = height - mb - (fy - ymin) / (ymax - ymin) * (height - mt - mb);
            out += line(ml - 5, py, ml, py, "#000");
            out += "<text x=\"" + format_number(ml - 8) + "\" y=\"" + format_number(py + 4) +
                   "\" text-anchor=\"end\" font-size=\"11\">" + axis_value(fy) + "</text>\n";
        }
        out += "<text x=\"" + format_number((ml + width - mr) / 2) + "\" y=\"" + format_number(height - 12) +
               "\" text-anchor=\"middle\" font-size=\"13\">" + x_label_ + "</text>\n";
        out += "<text x=\"18\" y=\"" + format_number((mt + height - mb) / 2) +
               "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
               format_number((mt + height - mb) / 2) + ")\">" + y_label_ + "</text>\n";

        double legend_y = mt + 10;
        for (const auto &s : series_) {
            if (s.style == SvgSeries::Style::Line) {
                std::string pts;
                for (size_t i = 0; i < s.x.size(); i++) {
                    pts += format_number(sx(s.x[i])) + "," + format_number(sy(s.y[i])) + " ";
                }
                out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-dasharray=\"6 3\" points=\"" +
                       pts + "\"/>\n";
            } else {
                for (size_t i = 0; i < s.x.size(); i++) {
                    double px = sx(s.x[i]);
                    double py = sy(s.y[i]);
                    if (s.style == SvgSeries::Style::PointsWithErrorBars && i < s.yerr.size()) {
                        double top = sy(s.y[i] + s.yerr[i]);
                        double bot = sy(s.y[i] - s.yerr[i]);
                        out += line(px, top, px, bot, "#c23b3b");
                        out += line(px - 4, top, px + 4, top, "#c23b3b");
                        out += line(px - 4, bot, px + 4, bot, "#c23b3b");
                    }
                    out += "<circle cx=\"" + format_number(px) + "\" cy=\"" + format_number(py) + "\" r=\"3.4\" fill=\"" +
                           s.color + "\"/>\n";
                }
            }
            out += "<rect x=\"" + format_number(width - mr + 12) + "\" y=\"" + format_number(legend_y - 8) +
                   "\" width=\"12\" height=\"12\" fill=\"" + s.color + "\"/>\n";
            out += "<text x=\"" + format_number(width - mr + 30) + "\" y=\"" + format_number(legend_y + 2) +
                   "\" font-size=\"12\">" + s.name + "</text>\n";
            legend_y += 20;
        }
        out += "</svg>\n";
        return out;
    }

    void write_file(const std::string &path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + path);
        }
        out << render();
    }

  private:
    double transform(double y) const {
        if (!log_y_) {
            return y;
        }
        return std::log10(std::max(y, 1e-300));
    }

    std::string axis_value(double fy) const {
        if (!log_y_) {
            return format_number(round3(fy));
        }
        return "1e" + format_number(round3(fy));
    }

    static double round3(double v) {
        return std::round(v * 1000.0) / 1000.0;
    }

    static std::string line(double x1, double y1, double x2, double y2, const std::string &color) {
        return "<line x1=\"" + format_number(x1) + "\" y1=\"" + format_number(y1) + "\" x2=\"" + format_number(x2) +
               "\" y2=\"" + format_number(y2) + "\" stroke=\"" + color + "\" stroke-width=\"1\"/>\n";
    }

    std::string title_, x_label_, y_label_;
    bool log_y_;
    std::vector<SvgSeries> series_;
};

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double> &x, const std::vector<double> &y) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); i++) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(x.size());
    my /= double(x.size());
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < x.size(); i++) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace vdshadow

#endif
