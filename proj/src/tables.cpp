#include "concord/tables.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "concord/util.hpp"

namespace concord {

using nlohmann::json;

namespace {

std::string pct1(double fraction) {
    return format_fixed(fraction * 100.0, 1) + "%";
}

std::string rate3(double value) {
    return format_fixed(value, 3);
}

/// Rows of equal arity rendered with two-space gutters; first column left-aligned,
/// the rest right-aligned.
std::string layout(const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) return "";
    std::vector<size_t> widths(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    std::ostringstream out;
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << "  ";
            if (i == 0) {
                out << row[i] << std::string(widths[i] - row[i].size(), ' ');
            } else {
                out << std::string(widths[i] - row[i].size(), ' ') << row[i];
            }
        }
        out << "\n";
    }
    return out.str();
}

std::vector<std::pair<std::string, uint64_t>> non_absent_sorted(const json& counts) {
    std::vector<std::pair<std::string, uint64_t>> labels;
    for (const auto& [name, count] : counts.items()) {
        if (name != "Absent") labels.emplace_back(name, count.get<uint64_t>());
    }
    std::sort(labels.begin(), labels.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return labels;
}

std::vector<std::vector<std::string>> global_rows(const json& metrics) {
    const json& global = metrics.at("global");
    const json& counts = global.at("counts");
    uint64_t total = global.at("non_absent_total").get<uint64_t>();

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Label", "Count", "% of non-absent"});
    rows.push_back({"Absent", format_thousands(counts.value("Absent", uint64_t{0})), "---"});
    for (const auto& [name, count] : non_absent_sorted(counts)) {
        std::string share = total ? pct1(static_cast<double>(count) / total) : "---";
        rows.push_back({name, format_thousands(count), share});
    }
    rows.push_back({"Total non-absent", format_thousands(total), total ? "100.0%" : "---"});
    return rows;
}

std::vector<std::vector<std::string>> group_rows(const json& groups, const std::string& id_col) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({id_col, "Q_total", "Q_active", "Pairs", "AbsRate", "R_div", "R_con", "%Div"});
    for (const json& g : groups) {
        bool rates = g.at("rates_defined").get<bool>();
        bool abs_defined = g.at("absence_defined").get<bool>();
        rows.push_back({g.at("group").get<std::string>(),
                        format_thousands(g.at("q_total").get<uint64_t>()),
                        format_thousands(g.at("q_active").get<uint64_t>()),
                        format_thousands(g.at("pairs").get<uint64_t>()),
                        abs_defined ? rate3(g.at("absence_rate").get<double>()) : "---",
                        rates ? rate3(g.at("r_div_mean").get<double>()) : "---",
                        rates ? rate3(g.at("r_con_mean").get<double>()) : "---",
                        rates ? pct1(g.at("pct_div").get<double>()) : "---"});
    }
    return rows;
}

std::vector<std::vector<std::string>> center_rows(const json& centers) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Center", "Pairs", "R_div", "R_con"});
    for (const json& c : centers) {
        bool defined = c.at("defined").get<bool>();
        rows.push_back({c.at("center_id").get<std::string>(),
                        format_thousands(c.at("n_pairs").get<uint64_t>()),
                        defined ? rate3(c.at("r_div").get<double>()) : "---",
                        defined ? rate3(c.at("r_con").get<double>()) : "---"});
    }
    return rows;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string rows_to_csv(const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << csv_escape(row[i]);
        }
        out << "\n";
    }
    return out.str();
}

std::vector<std::vector<std::string>> group_rows_csv(const json& groups,
                                                     const std::string& id_col) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({id_col, "q_total", "q_active", "pairs", "absence_rate", "r_div", "r_con",
                    "pct_div"});
    for (const json& g : groups) {
        bool rates = g.at("rates_defined").get<bool>();
        bool abs_defined = g.at("absence_defined").get<bool>();
        rows.push_back({g.at("group").get<std::string>(),
                        std::to_string(g.at("q_total").get<uint64_t>()),
                        std::to_string(g.at("q_active").get<uint64_t>()),
                        std::to_string(g.at("pairs").get<uint64_t>()),
                        abs_defined ? rate3(g.at("absence_rate").get<double>()) : "",
                        rates ? rate3(g.at("r_div_mean").get<double>()) : "",
                        rates ? rate3(g.at("r_con_mean").get<double>()) : "",
                        rates ? format_fixed(g.at("pct_div").get<double>() * 100.0, 1) : ""});
    }
    return rows;
}

}  // namespace

std::string render_human_tables(const json& metrics) {
    std::ostringstream out;
    out << "Global pairwise label distribution\n";
    out << layout(global_rows(metrics)) << "\n";
    out << "Heterogeneity by organ type\n";
    out << layout(group_rows(metrics.at("organs"), "Organ")) << "\n";
    out << "Heterogeneity by topic category\n";
    out << layout(group_rows(metrics.at("topics"), "Topic")) << "\n";
    out << "Center profiles\n";
    out << layout(center_rows(metrics.at("centers")));
    return out.str();
}

std::map<std::string, std::string> render_csv_tables(const json& metrics) {
    std::map<std::string, std::string> files;

    const json& global = metrics.at("global");
    uint64_t total = global.at("non_absent_total").get<uint64_t>();
    std::vector<std::vector<std::string>> grows;
    grows.push_back({"label", "count", "pct_of_non_absent"});
    grows.push_back({"Absent", std::to_string(global.at("counts").value("Absent", uint64_t{0})), ""});
    for (const auto& [name, count] : non_absent_sorted(global.at("counts"))) {
        grows.push_back({name, std::to_string(count),
                         total ? format_fixed(100.0 * static_cast<double>(count) / total, 1)
                               : ""});
    }
    files["global_labels.csv"] = rows_to_csv(grows);
    files["organs.csv"] = rows_to_csv(group_rows_csv(metrics.at("organs"), "organ"));
    files["topics.csv"] = rows_to_csv(group_rows_csv(metrics.at("topics"), "topic"));

    std::vector<std::vector<std::string>> crows;
    crows.push_back({"center", "n_pairs", "r_div", "r_con"});
    for (const json& c : metrics.at("centers")) {
        bool defined = c.at("defined").get<bool>();
        crows.push_back({c.at("center_id").get<std::string>(),
                         std::to_string(c.at("n_pairs").get<uint64_t>()),
                         defined ? rate3(c.at("r_div").get<double>()) : "",
                         defined ? rate3(c.at("r_con").get<double>()) : ""});
    }
    files["centers.csv"] = rows_to_csv(crows);
    return files;
}

}  // namespace concord
