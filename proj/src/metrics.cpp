#include "concord/metrics.hpp"

#include <algorithm>
#include <set>

namespace concord {

using nlohmann::json;

QuestionHeterogeneity question_rates(const ComparisonMatrix& matrix) {
    QuestionHeterogeneity q;
    q.question_id = matrix.question_id;
    const size_t n = matrix.dim();
    size_t div = 0, con = 0, nonabsent = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            ++q.n_pairs_total;
            ComparisonLabel l = matrix.at(i, j);
            if (l == ComparisonLabel::absent) continue;
            ++nonabsent;
            if (is_divergent_kind(l)) ++div;
            if (l == ComparisonLabel::consistent) ++con;
        }
    }
    q.n_pairs_nonabsent = nonabsent;
    if (nonabsent > 0) {
        q.defined = true;
        q.r_div = static_cast<double>(div) / nonabsent;
        q.r_con = static_cast<double>(con) / nonabsent;
    }
    return q;
}

GroupHeterogeneity group_rates(const std::string& group_id,
                               const std::vector<QuestionHeterogeneity>& question_rates,
                               const AbsenceStats& absence) {
    GroupHeterogeneity g;
    g.group_id = group_id;
    g.q_total = question_rates.size();
    g.absence = absence;

    double div_sum = 0.0, con_sum = 0.0;
    size_t with_div = 0;
    for (const auto& q : question_rates) {
        if (!q.defined) continue;
        ++g.q_active;
        div_sum += q.r_div;
        con_sum += q.r_con;
        if (q.r_div > 0.0) ++with_div;
    }
    if (g.q_active > 0) {
        g.rates_defined = true;
        g.r_div_mean = div_sum / g.q_active;
        g.r_con_mean = con_sum / g.q_active;
        g.pct_div = static_cast<double>(with_div) / g.q_active;
    }
    return g;
}

CenterProfile center_profile(const std::string& center_id,
                             const std::vector<PairwiseComparison>& comparisons) {
    CenterProfile p;
    p.center_id = center_id;
    size_t div = 0, con = 0;
    for (const PairwiseComparison& c : comparisons) {
        if (c.error || c.label == ComparisonLabel::absent) continue;
        auto a = decompose_handbook_id(c.handbook_a);
        auto b = decompose_handbook_id(c.handbook_b);
        if (!a || !b) continue;
        if (a->center_id == b->center_id) continue;  // within-center pairs never count
        if (a->center_id != center_id && b->center_id != center_id) continue;
        ++p.n_pairs;
        if (is_divergent_kind(c.label)) ++div;
        if (c.label == ComparisonLabel::consistent) ++con;
    }
    if (p.n_pairs > 0) {
        p.defined = true;
        p.r_div = static_cast<double>(div) / p.n_pairs;
        p.r_con = static_cast<double>(con) / p.n_pairs;
    }
    return p;
}

uint64_t LabelDistribution::non_absent_total() const {
    uint64_t total = 0;
    for (const auto& [name, count] : counts) {
        if (name != "Absent") total += count;
    }
    return total;
}

std::map<std::string, double> LabelDistribution::shares() const {
    std::map<std::string, double> out;
    uint64_t total = non_absent_total();
    if (total == 0) return out;
    for (const auto& [name, count] : counts) {
        if (name != "Absent") out[name] = static_cast<double>(count) / total;
    }
    return out;
}

LabelDistribution global_distribution(const std::vector<PairwiseComparison>& comparisons) {
    LabelDistribution dist;
    for (ComparisonLabel l :
         {ComparisonLabel::absent, ComparisonLabel::consistent, ComparisonLabel::complementary,
          ComparisonLabel::divergent, ComparisonLabel::contradictory}) {
        dist.counts[label_name(l)] = 0;
    }
    for (const PairwiseComparison& c : comparisons) {
        if (c.error) {
            ++dist.errors;
            continue;
        }
        ++dist.counts[label_name(c.label)];
    }
    return dist;
}

namespace {

AbsenceStats absence_for_questions(
    const std::vector<const Question*>& group,
    const std::map<std::string, std::vector<std::string>>& routed,
    const std::map<std::pair<std::string, std::string>, GroundedAnswer>& answers) {
    AbsenceStats stats;
    for (const Question* q : group) {
        auto rit = routed.find(q->id);
        if (rit == routed.end()) continue;
        for (const std::string& hbid : rit->second) {
            auto ait = answers.find({q->id, hbid});
            if (ait == answers.end()) {
                ++stats.missing;
                continue;
            }
            if (ait->second.absence_method == AbsenceMethod::unresolved) {
                ++stats.unresolved;
                continue;
            }
            ++stats.pairs;
            if (ait->second.is_absent) ++stats.absent;
        }
    }
    return stats;
}

}  // namespace

MetricsReport compute_metrics(
    const std::vector<Question>& questions, const RoutingPlan& plan,
    const std::map<std::pair<std::string, std::string>, GroundedAnswer>& answers,
    const std::map<std::string, std::vector<PairwiseComparison>>& comparisons,
    WarningSink* warnings) {
    MetricsReport report;
    auto routed = plan.by_question();

    // Per-question rates from rebuilt matrices over the routed handbook set.
    std::map<std::string, QuestionHeterogeneity> rates_by_id;
    std::vector<PairwiseComparison> all_comparisons;
    for (const auto& [qid, hbids] : routed) {
        std::vector<PairwiseComparison> empty;
        auto cit = comparisons.find(qid);
        const auto& comps = cit == comparisons.end() ? empty : cit->second;
        ComparisonMatrix m = build_matrix(qid, comps, hbids, false, warnings);
        QuestionHeterogeneity q = question_rates(m);
        rates_by_id[qid] = q;
        report.questions.push_back(q);
        all_comparisons.insert(all_comparisons.end(), comps.begin(), comps.end());
    }

    report.global = global_distribution(all_comparisons);

    // Organ groups, general first.
    std::vector<const Question*> sorted_questions;
    for (const auto& q : questions) sorted_questions.push_back(&q);
    std::sort(sorted_questions.begin(), sorted_questions.end(),
              [](const Question* a, const Question* b) { return a->id < b->id; });

    auto collect_group = [&](const std::string& group_id,
                             const std::vector<const Question*>& members) {
        std::vector<QuestionHeterogeneity> member_rates;
        for (const Question* q : members) {
            auto it = rates_by_id.find(q->id);
            if (it != rates_by_id.end()) member_rates.push_back(it->second);
        }
        return group_rates(group_id, member_rates,
                           absence_for_questions(members, routed, answers));
    };

    const Organ organ_order[] = {Organ::general, Organ::heart,    Organ::kidney,
                                 Organ::liver,   Organ::lung,     Organ::pancreas};
    for (Organ organ : organ_order) {
        std::vector<const Question*> members;
        for (const Question* q : sorted_questions) {
            if (q->organ == organ) members.push_back(q);
        }
        if (members.empty()) continue;
        report.organs.push_back(collect_group(organ_to_string(organ), members));
    }

    // Topic groups: a multi-labeled question counts fully in each of its topics.
    std::map<std::string, std::vector<const Question*>> by_topic;
    for (const Question* q : sorted_questions) {
        for (const std::string& topic : q->topics) by_topic[topic].push_back(q);
    }
    for (const auto& [topic, members] : by_topic) {
        report.topics.push_back(collect_group(topic, members));
    }

    // Center profiles: handbooks map to centers via id decomposition.
    std::set<std::string> centers;
    for (const auto& [qid, hbid] : plan.pairs) {
        if (auto parts = decompose_handbook_id(hbid)) centers.insert(parts->center_id);
    }
    for (const std::string& center : centers) {
        report.centers.push_back(center_profile(center, all_comparisons));
    }

    for (const auto& organ_group : report.organs) {
        report.missing_answers += organ_group.absence.missing;
        report.unresolved_answers += organ_group.absence.unresolved;
    }
    if (report.missing_answers > 0 && warnings) {
        warnings->push_back(std::to_string(report.missing_answers) +
                            " routed answers missing; absence denominators exclude them");
    }
    return report;
}

namespace {

json group_to_json(const GroupHeterogeneity& g) {
    return json{{"group", g.group_id},
                {"q_total", g.q_total},
                {"q_active", g.q_active},
                {"r_div_mean", g.r_div_mean},
                {"r_con_mean", g.r_con_mean},
                {"pct_div", g.pct_div},
                {"rates_defined", g.rates_defined},
                {"pairs", g.absence.pairs},
                {"absent_pairs", g.absence.absent},
                {"absence_rate", g.absence.rate()},
                {"absence_defined", g.absence.defined()},
                {"unresolved", g.absence.unresolved},
                {"missing", g.absence.missing}};
}

}  // namespace

json metrics_to_json(const MetricsReport& report, const std::string& config_hash) {
    json questions = json::array();
    for (const auto& q : report.questions) {
        questions.push_back(json{{"question_id", q.question_id},
                                 {"n_pairs_total", q.n_pairs_total},
                                 {"n_pairs_nonabsent", q.n_pairs_nonabsent},
                                 {"r_div", q.r_div},
                                 {"r_con", q.r_con},
                                 {"defined", q.defined}});
    }
    json organs = json::array();
    for (const auto& g : report.organs) organs.push_back(group_to_json(g));
    json topics = json::array();
    for (const auto& g : report.topics) topics.push_back(group_to_json(g));
    json centers = json::array();
    for (const auto& c : report.centers) {
        centers.push_back(json{{"center_id", c.center_id},
                               {"n_pairs", c.n_pairs},
                               {"r_div", c.r_div},
                               {"r_con", c.r_con},
                               {"defined", c.defined}});
    }
    return json{{"config_hash", config_hash},
                {"global",
                 json{{"counts", report.global.counts},
                      {"errors", report.global.errors},
                      {"non_absent_total", report.global.non_absent_total()},
                      {"shares", report.global.shares()}}},
                {"questions", questions},
                {"organs", organs},
                {"topics", topics},
                {"centers", centers},
                {"missing_answers", report.missing_answers},
                {"unresolved_answers", report.unresolved_answers}};
}

}  // namespace concord
