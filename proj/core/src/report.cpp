#include "secov/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace secov {

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string fixed2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void RunManifest::add_input(const std::string& path, std::string_view content) {
    inputs.push_back(InputFile{path, hex64(fnv1a(content))});
}

std::string RunManifest::hash() const {
    std::string blob = tool_version + "\n" + config_json + "\n";
    for (const auto& in : inputs) blob += in.path + "=" + in.content_hash + "\n";
    return hex64(fnv1a(blob));
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["tool_version"] = tool_version;
    j["manifest_hash"] = hash();
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& in : inputs) {
        nlohmann::ordered_json e;
        e["path"] = in.path;
        e["content_hash"] = in.content_hash;
        j["inputs"].push_back(e);
    }
    if (!config_json.empty()) j["config"] = nlohmann::ordered_json::parse(config_json);
    return j.dump(2) + "\n";
}

// --- SVG --------------------------------------------------------------------

namespace {

constexpr int kWidth = 760;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 24;
constexpr int kMarginTop = 48;
constexpr int kMarginBottom = 96;

struct Frame {
    double max_v = 0.0;
    int plot_w() const { return kWidth - kMarginLeft - kMarginRight; }
    int plot_h() const { return kHeight - kMarginTop - kMarginBottom; }
    double y(double v) const {
        double frac = max_v > 0 ? v / max_v : 0.0;
        return kMarginTop + plot_h() * (1.0 - frac);
    }
};

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

void open_svg(std::ostringstream& os, const std::string& title, const Frame& f,
              const std::string& y_label) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    os << "  <rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    os << "  <text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"15\" font-weight=\"bold\">"
       << esc(title) << "</text>\n";
    // axes
    os << "  <line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
       << kMarginLeft << "\" y2=\"" << kHeight - kMarginBottom
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "  <line x1=\"" << kMarginLeft << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\""
       << kWidth - kMarginRight << "\" y2=\"" << kHeight - kMarginBottom
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    // y ticks
    for (int i = 0; i <= 4; ++i) {
        double v = f.max_v * i / 4.0;
        double y = f.y(v);
        os << "  <line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << y << "\" x2=\"" << kMarginLeft
           << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
        os << "  <text x=\"" << kMarginLeft - 8 << "\" y=\"" << y + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fixed2(v)
           << "</text>\n";
    }
    os << "  <text x=\"16\" y=\"" << kMarginTop - 12
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << esc(y_label) << "</text>\n";
}

void x_label(std::ostringstream& os, double x, const std::string& text) {
    double ybase = kHeight - kMarginBottom + 10;
    os << "  <text x=\"" << x << "\" y=\"" << ybase
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-45 "
       << x << " " << ybase << ")\">" << esc(text) << "</text>\n";
}

} // namespace

std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& labels,
                          const std::vector<SvgSeries>& series, const std::string& y_label) {
    Frame f;
    for (const auto& s : series)
        for (double v : s.values) f.max_v = std::max(f.max_v, v);
    if (f.max_v <= 0) f.max_v = 1.0;

    std::ostringstream os;
    open_svg(os, title, f, y_label);
    std::size_t groups = labels.size();
    double group_w = groups > 0 ? static_cast<double>(f.plot_w()) / groups : 1.0;
    double bar_w = series.empty() ? group_w : group_w * 0.8 / series.size();
    for (std::size_t g = 0; g < groups; ++g) {
        double gx = kMarginLeft + group_w * g + group_w * 0.1;
        for (std::size_t s = 0; s < series.size(); ++s) {
            if (g >= series[s].values.size()) continue;
            double v = series[s].values[g];
            double y = f.y(std::max(0.0, v));
            double h = (kHeight - kMarginBottom) - y;
            os << "  <rect x=\"" << gx + bar_w * s << "\" y=\"" << y << "\" width=\""
               << bar_w * 0.92 << "\" height=\"" << h << "\" fill=\"" << series[s].color
               << "\"/>\n";
        }
        x_label(os, gx + group_w * 0.4, labels[g]);
    }
    // legend
    double lx = kMarginLeft + 8;
    for (std::size_t s = 0; s < series.size(); ++s) {
        os << "  <rect x=\"" << lx << "\" y=\"" << kMarginTop - 14 << "\" width=\"10\" height=\"10\" fill=\""
           << series[s].color << "\"/>\n";
        os << "  <text x=\"" << lx + 14 << "\" y=\"" << kMarginTop - 5
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << esc(series[s].label)
           << "</text>\n";
        lx += 14 + 8.0 * series[s].label.size() + 18;
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_line_chart(const std::string& title, const std::vector<std::string>& labels,
                           const SvgSeries& line, const std::optional<SvgSeries>& overlay,
                           const std::string& y_label) {
    Frame f;
    for (double v : line.values) f.max_v = std::max(f.max_v, v);
    if (overlay)
        for (double v : overlay->values) f.max_v = std::max(f.max_v, v);
    if (f.max_v <= 0) f.max_v = 1.0;

    std::ostringstream os;
    open_svg(os, title, f, y_label);
    std::size_t npts = labels.size();
    double step = npts > 1 ? static_cast<double>(f.plot_w()) / (npts - 1) : 0.0;
    auto px = [&](std::size_t i) { return kMarginLeft + step * i; };

    auto polyline = [&](const SvgSeries& s, bool dashed) {
        os << "  <polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
        if (dashed) os << " stroke-dasharray=\"6 4\"";
        os << " points=\"";
        for (std::size_t i = 0; i < s.values.size() && i < npts; ++i)
            os << px(i) << "," << f.y(s.values[i]) << " ";
        os << "\"/>\n";
    };
    polyline(line, false);
    for (std::size_t i = 0; i < line.values.size() && i < npts; ++i)
        os << "  <circle cx=\"" << px(i) << "\" cy=\"" << f.y(line.values[i])
           << "\" r=\"3\" fill=\"" << line.color << "\"/>\n";
    if (overlay && !overlay->values.empty()) polyline(*overlay, true);

    for (std::size_t i = 0; i < npts; ++i) x_label(os, px(i), labels[i]);
    // legend
    os << "  <text x=\"" << kMarginLeft + 8 << "\" y=\"" << kMarginTop - 5
       << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << line.color << "\">"
       << esc(line.label) << "</text>\n";
    if (overlay)
        os << "  <text x=\"" << kMarginLeft + 160 << "\" y=\"" << kMarginTop - 5
           << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << overlay->color
           << "\">" << esc(overlay->label) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace secov
