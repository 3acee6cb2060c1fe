#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace secov {

std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);

/// Fixed-point formatting used by every report writer (byte-stable output).
std::string fixed2(double v);

/// Identity of one tool run: input files with content hashes, the config
/// snapshot and the tool version. The manifest hash covers exactly those;
/// stage timings are display-only and never hashed or written to report
/// files, keeping reruns byte-identical.
struct RunManifest {
    struct InputFile {
        std::string path;
        std::string content_hash;
    };
    std::vector<InputFile> inputs;
    std::string config_json;
    std::string tool_version;
    std::vector<std::pair<std::string, double>> timings_ms;

    void add_input(const std::string& path, std::string_view content);
    std::string hash() const;
    std::string to_json() const; // deterministic; no timings
};

// --- SVG charts -------------------------------------------------------------

struct SvgSeries {
    std::string label;
    std::vector<double> values;
    std::string color;
};

/// Grouped bar chart (one group per x label, one bar per series entry).
std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& labels,
                          const std::vector<SvgSeries>& series, const std::string& y_label);

/// Line chart: a primary series plus an optional dashed overlay (used for
/// the moving-average trend), with per-point markers.
std::string svg_line_chart(const std::string& title, const std::vector<std::string>& labels,
                           const SvgSeries& line, const std::optional<SvgSeries>& overlay,
                           const std::string& y_label);

} // namespace secov
