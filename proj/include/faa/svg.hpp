#pragma once

// Minimal deterministic SVG plots: curve overlays and elbow (RSS vs k) lines.

#include <string>
#include <vector>

namespace faa {

enum class CurveStyle { data, archetype, archetypoid };

struct PlotCurve {
    std::vector<double> x, y;
    CurveStyle style = CurveStyle::data;
    std::string label;
};

std::string xml_escape(const std::string& text);

/// One <path> per curve: data curves grey, archetypes solid and coloured,
/// archetypoids dashed. Axes and ticks use <line> and <text> only.
std::string render_curves_svg(const std::vector<PlotCurve>& curves, const std::string& title,
                              const std::string& x_label = "t");

/// A single <polyline> through (k, rss) plus a marker per point.
std::string render_elbow_svg(const std::vector<int>& ks, const std::vector<double>& rss,
                             const std::string& title);

}  // namespace faa
