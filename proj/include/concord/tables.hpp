#pragma once

#include <map>
#include <string>

#include <json.hpp>

namespace concord {

/// Global label, per-organ, per-topic and per-center tables rendered from the metrics
/// document; counts carry thousands separators, percentages one decimal, rates three.
std::string render_human_tables(const nlohmann::json& metrics);

/// Same tables as CSV: filename -> content.
std::map<std::string, std::string> render_csv_tables(const nlohmann::json& metrics);

}  // namespace concord
