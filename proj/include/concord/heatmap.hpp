#pragma once

#include <string>

#include "concord/judge.hpp"

namespace concord {

/// Fixed label -> color contract: Absent grey, Consistent green, Complementary yellow,
/// Divergent blue, Contradictory black.
std::string heatmap_color(ComparisonLabel l);

/// Self-contained SVG: N x N colored cells, symmetric with a green diagonal, axis tick
/// labels = handbook ids, five-entry legend. Pure function of the matrix, so repeated
/// renders are byte-identical. N = 0 yields a placeholder with a message.
std::string render_heatmap(const ComparisonMatrix& matrix);

}  // namespace concord
