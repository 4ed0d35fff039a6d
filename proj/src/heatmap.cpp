#include "concord/heatmap.hpp"

#include <sstream>

namespace concord {

std::string heatmap_color(ComparisonLabel l) {
    switch (l) {
        case ComparisonLabel::absent: return "#9e9e9e";
        case ComparisonLabel::consistent: return "#2e7d32";
        case ComparisonLabel::complementary: return "#fdd835";
        case ComparisonLabel::divergent: return "#1565c0";
        case ComparisonLabel::contradictory: return "#000000";
    }
    return "#ff00ff";
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

constexpr int kCell = 18;
constexpr int kLabelPad = 170;
constexpr int kTopPad = 40;
constexpr int kLegendWidth = 160;

}  // namespace

std::string render_heatmap(const ComparisonMatrix& matrix) {
    const size_t n = matrix.dim();
    std::ostringstream svg;

    if (n == 0) {
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"420\" height=\"120\">\n"
            << "  <rect width=\"420\" height=\"120\" fill=\"#ffffff\"/>\n"
            << "  <text x=\"20\" y=\"60\" font-family=\"monospace\" font-size=\"13\">"
            << "no handbooks responded to question " << escape_xml(matrix.question_id)
            << "</text>\n</svg>\n";
        return svg.str();
    }

    const int grid = static_cast<int>(n) * kCell;
    const int width = kLabelPad + grid + kLegendWidth + 20;
    const int height = kTopPad + grid + kLabelPad;

    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    svg << "  <rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    svg << "  <text x=\"" << kLabelPad << "\" y=\"20\" font-family=\"monospace\" "
        << "font-size=\"13\">" << escape_xml(matrix.question_id) << "</text>\n";

    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            int x = kLabelPad + static_cast<int>(j) * kCell;
            int y = kTopPad + static_cast<int>(i) * kCell;
            svg << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell
                << "\" height=\"" << kCell << "\" fill=\"" << heatmap_color(matrix.at(i, j))
                << "\" stroke=\"#ffffff\" stroke-width=\"1\"/>\n";
        }
    }

    for (size_t i = 0; i < n; ++i) {
        int y = kTopPad + static_cast<int>(i) * kCell + kCell / 2 + 4;
        svg << "  <text x=\"" << (kLabelPad - 6) << "\" y=\"" << y
            << "\" font-family=\"monospace\" font-size=\"9\" text-anchor=\"end\">"
            << escape_xml(matrix.handbook_ids[i]) << "</text>\n";
        int x = kLabelPad + static_cast<int>(i) * kCell + kCell / 2;
        int ty = kTopPad + grid + 6;
        svg << "  <text x=\"" << x << "\" y=\"" << ty
            << "\" font-family=\"monospace\" font-size=\"9\" text-anchor=\"end\" "
            << "transform=\"rotate(-60 " << x << " " << ty << ")\">"
            << escape_xml(matrix.handbook_ids[i]) << "</text>\n";
    }

    const ComparisonLabel legend_order[] = {
        ComparisonLabel::absent, ComparisonLabel::consistent, ComparisonLabel::complementary,
        ComparisonLabel::divergent, ComparisonLabel::contradictory};
    int lx = kLabelPad + grid + 20;
    int ly = kTopPad;
    for (ComparisonLabel l : legend_order) {
        svg << "  <rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"12\" height=\"12\" fill=\""
            << heatmap_color(l) << "\" stroke=\"#666666\" stroke-width=\"1\"/>\n";
        svg << "  <text x=\"" << (lx + 18) << "\" y=\"" << (ly + 10)
            << "\" font-family=\"monospace\" font-size=\"11\">" << label_name(l) << "</text>\n";
        ly += 20;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace concord
