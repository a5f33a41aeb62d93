#include "faa/svg.hpp"

#include "faa/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace faa {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

constexpr std::array<const char*, 8> kPalette = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

struct Frame {
    double x0, x1, y0, y1;

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const {
        return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
    }
};

void widen(double& lo, double& hi) {
    if (!(lo <= hi)) {
        lo = 0;
        hi = 1;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        lo -= 0.5;
        hi += 0.5;
    }
}

void header(std::ostringstream& os, const std::string& title) {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" fill=\"white\"/>\n"
       << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"15\">"
       << xml_escape(title) << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, const std::string& x_label,
          const std::string& y_label, const std::vector<double>& x_ticks) {
    const double bx = kHeight - kBottom, lx = kLeft;
    os << "<g stroke=\"black\" stroke-width=\"1\">\n"
       << "<line x1=\"" << num(lx) << "\" y1=\"" << num(bx) << "\" x2=\"" << num(kWidth - kRight)
       << "\" y2=\"" << num(bx) << "\"/>\n"
       << "<line x1=\"" << num(lx) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(lx) << "\" y2=\""
       << num(bx) << "\"/>\n";
    for (double t : x_ticks)
        os << "<line x1=\"" << num(f.px(t)) << "\" y1=\"" << num(bx) << "\" x2=\"" << num(f.px(t))
           << "\" y2=\"" << num(bx + 5) << "\"/>\n";
    std::vector<double> y_ticks;
    for (int i = 0; i <= 4; ++i) y_ticks.push_back(f.y0 + (f.y1 - f.y0) * i / 4.0);
    for (double v : y_ticks)
        os << "<line x1=\"" << num(lx - 5) << "\" y1=\"" << num(f.py(v)) << "\" x2=\"" << num(lx)
           << "\" y2=\"" << num(f.py(v)) << "\"/>\n";
    os << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (double t : x_ticks)
        os << "<text x=\"" << num(f.px(t)) << "\" y=\"" << num(bx + 18)
           << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    for (double v : y_ticks)
        os << "<text x=\"" << num(lx - 8) << "\" y=\"" << num(f.py(v) + 4)
           << "\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
    os << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 12)
       << "\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n";
    if (!y_label.empty())
        os << "<text x=\"16\" y=\"" << num((kTop + bx) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
           << num((kTop + bx) / 2) << ")\">" << xml_escape(y_label) << "</text>\n";
    os << "</g>\n";
}

}  // namespace

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(ch);
        }
    }
    return out;
}

std::string render_curves_svg(const std::vector<PlotCurve>& curves, const std::string& title,
                              const std::string& x_label) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& c : curves) {
        if (c.x.size() != c.y.size()) throw ArgumentError("plot curve '" + c.label + "': x and y differ in length");
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            x0 = std::min(x0, c.x[i]);
            x1 = std::max(x1, c.x[i]);
            y0 = std::min(y0, c.y[i]);
            y1 = std::max(y1, c.y[i]);
        }
    }
    widen(x0, x1);
    widen(y0, y1);
    const double pad = 0.05 * (y1 - y0);
    const Frame f{x0, x1, y0 - pad, y1 + pad};

    std::vector<double> x_ticks;
    for (int i = 0; i <= 5; ++i) x_ticks.push_back(x0 + (x1 - x0) * i / 5.0);

    std::ostringstream os;
    header(os, title);
    axes(os, f, x_label, "", x_ticks);

    auto path = [&](const PlotCurve& c, const std::string& attrs) {
        os << "<path";
        if (!c.label.empty()) os << " data-label=\"" << xml_escape(c.label) << '"';
        os << ' ' << attrs << " d=\"";
        for (std::size_t i = 0; i < c.x.size(); ++i)
            os << (i ? " L" : "M") << num(f.px(c.x[i])) << ' ' << num(f.py(c.y[i]));
        os << "\"/>\n";
    };

    os << "<g fill=\"none\">\n";
    for (const auto& c : curves)
        if (c.style == CurveStyle::data)
            path(c, "class=\"data\" stroke=\"#b0b0b0\" stroke-width=\"1\"");
    std::size_t colour = 0;
    for (const auto& c : curves)
        if (c.style == CurveStyle::archetype)
            path(c, std::string("class=\"archetype\" stroke=\"") + kPalette[colour++ % kPalette.size()] +
                        "\" stroke-width=\"2.5\"");
    colour = 0;
    for (const auto& c : curves)
        if (c.style == CurveStyle::archetypoid)
            path(c, std::string("class=\"archetypoid\" stroke=\"") + kPalette[colour++ % kPalette.size()] +
                        "\" stroke-width=\"2\" stroke-dasharray=\"7 4\"");
    os << "</g>\n</svg>\n";
    return os.str();
}

std::string render_elbow_svg(const std::vector<int>& ks, const std::vector<double>& rss,
                             const std::string& title) {
    if (ks.size() != rss.size()) throw ArgumentError("elbow plot: ks and rss differ in length");
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y1 = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        x0 = std::min(x0, double(ks[i]));
        x1 = std::max(x1, double(ks[i]));
        y1 = std::max(y1, rss[i]);
    }
    widen(x0, x1);
    double y0 = 0;
    widen(y0, y1);
    const Frame f{x0, x1, 0.0, y1 * 1.05};

    std::ostringstream os;
    header(os, title);
    std::vector<double> x_ticks(ks.begin(), ks.end());
    axes(os, f, "k", "RSS", x_ticks);
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < ks.size(); ++i)
        os << (i ? " " : "") << num(f.px(ks[i])) << ',' << num(f.py(rss[i]));
    os << "\"/>\n<g fill=\"#1f77b4\">\n";
    for (std::size_t i = 0; i < ks.size(); ++i)
        os << "<circle cx=\"" << num(f.px(ks[i])) << "\" cy=\"" << num(f.py(rss[i])) << "\" r=\"3.5\"/>\n";
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace faa
