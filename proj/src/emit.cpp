#include "causalkit/emit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "causalkit/errors.hpp"

namespace causalkit {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

// Fixed two decimals, used for SVG coordinates so output bytes are stable.
std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
}

void check_reports(const std::vector<ImportanceReport>& reports) {
    if (reports.empty()) throw ValidationError("emit: report set is empty");
    for (const auto& r : reports) {
        if (r.predictors.empty()) throw ValidationError("emit: report has no predictors");
        if (r.predictors != reports.front().predictors)
            throw ValidationError("emit: reports do not share one predictor set");
    }
}

const char* kPalette[5] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f"};

}  // namespace

std::string report_csv(const std::vector<ImportanceReport>& reports) {
    check_reports(reports);
    std::string out = "method,predictor,raw,normalized\n";
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.predictors.size(); ++i) {
            out += r.method;
            out += ',';
            out += r.predictors[i];
            out += ',';
            out += format_double(r.raw[i]);
            out += ',';
            out += format_double(r.normalized[i]);
            out += '\n';
        }
    }
    return out;
}

std::string report_svg(const std::vector<ImportanceReport>& reports, const std::string& title) {
    check_reports(reports);
    const auto& predictors = reports.front().predictors;
    const std::size_t n_groups = predictors.size();
    const std::size_t n_methods = reports.size();

    const double bar_w = 18.0;
    const double group_gap = 16.0;
    const double group_w = bar_w * static_cast<double>(n_methods) + group_gap;
    const double margin_l = 56.0;
    const double top = 28.0;
    const double plot_h = 280.0;
    const double x_axis_y = top + plot_h;
    const double plot_w = group_w * static_cast<double>(n_groups);
    const double legend_x = margin_l + plot_w + 24.0;
    const double legend_w = 130.0;
    const double width = legend_x + legend_w;
    const double height = x_axis_y + 52.0;

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed2(width) +
         "\" height=\"" + fixed2(height) + "\" viewBox=\"0 0 " + fixed2(width) + " " +
         fixed2(height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        s += "<text x=\"" + fixed2(margin_l + plot_w / 2.0) +
             "\" y=\"16.00\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"13\">" +
             title + "</text>\n";

    // Axes and y ticks at 0, .25, .5, .75, 1 of the normalized scale.
    s += "<line x1=\"" + fixed2(margin_l) + "\" y1=\"" + fixed2(top) + "\" x2=\"" +
         fixed2(margin_l) + "\" y2=\"" + fixed2(x_axis_y) +
         "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    s += "<line x1=\"" + fixed2(margin_l) + "\" y1=\"" + fixed2(x_axis_y) + "\" x2=\"" +
         fixed2(margin_l + plot_w) + "\" y2=\"" + fixed2(x_axis_y) +
         "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    const char* tick_labels[5] = {"0", "0.25", "0.5", "0.75", "1"};
    for (int t = 0; t < 5; ++t) {
        const double frac = 0.25 * static_cast<double>(t);
        const double y = x_axis_y - frac * plot_h;
        s += "<line x1=\"" + fixed2(margin_l - 4.0) + "\" y1=\"" + fixed2(y) + "\" x2=\"" +
             fixed2(margin_l) + "\" y2=\"" + fixed2(y) +
             "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        s += "<text x=\"" + fixed2(margin_l - 8.0) + "\" y=\"" + fixed2(y + 4.0) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
             tick_labels[t] + "</text>\n";
    }

    for (std::size_t g = 0; g < n_groups; ++g) {
        const double group_x = margin_l + group_w * static_cast<double>(g) + group_gap / 2.0;
        for (std::size_t m = 0; m < n_methods; ++m) {
            const double h = reports[m].normalized[g] * plot_h;
            const double x = group_x + bar_w * static_cast<double>(m);
            s += "<rect class=\"bar\" x=\"" + fixed2(x) + "\" y=\"" + fixed2(x_axis_y - h) +
                 "\" width=\"" + fixed2(bar_w) + "\" height=\"" + fixed2(h) + "\" fill=\"" +
                 kPalette[m % 5] + "\"/>\n";
        }
        s += "<text x=\"" +
             fixed2(group_x + bar_w * static_cast<double>(n_methods) / 2.0) + "\" y=\"" +
             fixed2(x_axis_y + 18.0) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
             predictors[g] + "</text>\n";
    }

    for (std::size_t m = 0; m < n_methods; ++m) {
        const double y = top + 14.0 * static_cast<double>(m);
        s += "<rect class=\"swatch\" x=\"" + fixed2(legend_x) + "\" y=\"" + fixed2(y) +
             "\" width=\"10.00\" height=\"10.00\" fill=\"" + kPalette[m % 5] + "\"/>\n";
        s += "<text x=\"" + fixed2(legend_x + 16.0) + "\" y=\"" + fixed2(y + 9.0) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + reports[m].method +
             "</text>\n";
    }

    s += "</svg>\n";
    return s;
}

std::string cpdag_svg(const Cpdag& g, const std::string& title) {
    const auto n = static_cast<int>(g.nodes().size());
    const double cx = 190.0;
    const double cy = 200.0;
    const double radius = 140.0;
    const double node_r = 16.0;
    const double pi = 3.14159265358979323846;

    std::vector<std::pair<double, double>> pos(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double angle = -pi / 2.0 + 2.0 * pi * static_cast<double>(i) /
                                             static_cast<double>(std::max(n, 1));
        pos[static_cast<std::size_t>(i)] = {cx + radius * std::cos(angle),
                                            cy + radius * std::sin(angle)};
    }

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"380.00\" height=\"400.00\" "
         "viewBox=\"0 0 380.00 400.00\">\n";
    s += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" "
         "markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">"
         "<path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#333333\"/></marker></defs>\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        s += "<text x=\"190.00\" y=\"18.00\" text-anchor=\"middle\" "
             "font-family=\"sans-serif\" font-size=\"13\">" +
             title + "</text>\n";

    const auto edge_line = [&](int a, int b, bool directed) {
        const auto [xa, ya] = pos[static_cast<std::size_t>(a)];
        const auto [xb, yb] = pos[static_cast<std::size_t>(b)];
        const double dx = xb - xa;
        const double dy = yb - ya;
        const double len = std::sqrt(dx * dx + dy * dy);
        const double ux = dx / len;
        const double uy = dy / len;
        const double x1 = xa + ux * node_r;
        const double y1 = ya + uy * node_r;
        const double trim = directed ? node_r + 6.0 : node_r;
        const double x2 = xb - ux * trim;
        const double y2 = yb - uy * trim;
        std::string line = "<line x1=\"" + fixed2(x1) + "\" y1=\"" + fixed2(y1) +
                           "\" x2=\"" + fixed2(x2) + "\" y2=\"" + fixed2(y2) +
                           "\" stroke=\"#333333\" stroke-width=\"1.5\"";
        if (directed) line += " marker-end=\"url(#arrow)\"";
        line += "/>\n";
        return line;
    };

    for (const auto& [f, t] : g.directed()) s += edge_line(f, t, true);
    for (const auto& [a, b] : g.undirected()) s += edge_line(a, b, false);

    for (int i = 0; i < n; ++i) {
        const auto [x, y] = pos[static_cast<std::size_t>(i)];
        s += "<circle cx=\"" + fixed2(x) + "\" cy=\"" + fixed2(y) + "\" r=\"" +
             fixed2(node_r) + "\" fill=\"#eef2fb\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        s += "<text x=\"" + fixed2(x) + "\" y=\"" + fixed2(y + 4.5) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
             g.name_of(i) + "</text>\n";
    }

    s += "</svg>\n";
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "'");
    }
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

void emit_report_csv(const std::vector<ImportanceReport>& reports, const std::string& path) {
    write_text_file(path, report_csv(reports));
}

void emit_report_svg(const std::vector<ImportanceReport>& reports, const std::string& path,
                     const std::string& title) {
    write_text_file(path, report_svg(reports, title));
}

}  // namespace causalkit
