#include "devcarbon/llm_estimate.hpp"

#include "devcarbon/error.hpp"

#include <algorithm>
#include <cmath>

namespace devcarbon {

namespace {

void require_fraction(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

SessionMeans means_of(const LlmSessionRecord& s) {
    return {static_cast<double>(s.nqbh), static_cast<double>(s.nhiq), s.tc_passed_pre_insight, s.tpah};
}

SessionMeans means_of(const RepetitionSummary& s) {
    return {s.mean_nqbh, s.mean_nhiq, s.mean_tc_passed_pre_insight, s.mean_tpah};
}

Energy query_energy(double total_queries, const PowerProfile& profile) {
    if (!std::isfinite(total_queries) || total_queries < 0.0) throw DomainError("query count must be non-negative");
    return Energy::from_kwh(total_queries * profile.per_query_kwh());
}

double insight_time_s(double mts_s, double tc_passed_pre_insight, bool insight_used,
                      const WorkflowConstants& constants) {
    require_fraction(tc_passed_pre_insight, "pre-insight pass fraction");
    if (!insight_used) return 0.0;
    return mts_s * constants.understanding_share * (1.0 - tc_passed_pre_insight);
}

double add_functionality_time_s(double mts_s, double tpah, double t_insight_s, const WorkflowConstants& constants) {
    require_fraction(tpah, "post-insight pass fraction");
    if (tpah == 1.0) return 0.0;
    const double read_extend = mts_s * constants.read_extend_share();
    return std::max(0.0, read_extend + (1.0 - tpah) * mts_s - t_insight_s);
}

LlmBreakdown llm_breakdown(const SessionMeans& means, double mts_s, const PowerProfile& profile,
                           const WorkflowConstants& constants) {
    if (!std::isfinite(mts_s) || mts_s < 0.0) throw DomainError("mean time spent must be non-negative");
    LlmBreakdown b;
    b.qec = query_energy(means.total_queries(), profile);
    b.t_insight_s = insight_time_s(mts_s, means.tc_passed_pre_insight, means.insight_used(), constants);
    b.t_add_s = add_functionality_time_s(mts_s, means.tpah, b.t_insight_s, constants);
    b.human_energy = consumed_energy(profile.p_laptop_w, b.t_insight_s + b.t_add_s);
    b.ttec = b.qec + b.human_energy;
    b.cf_grams = carbon_footprint(b.ttec, profile);
    return b;
}

LlmBreakdown llm_breakdown_per_repetition(std::span<const LlmSessionRecord> sessions, double mts_s,
                                          const PowerProfile& profile, const WorkflowConstants& constants) {
    if (sessions.empty()) throw DataError("no sessions to evaluate");
    double qec_j = 0, insight = 0, add = 0, human_j = 0, ttec_j = 0, cf = 0;
    for (const auto& s : sessions) {
        const auto b = llm_breakdown(means_of(s), mts_s, profile, constants);
        qec_j += b.qec.joules();
        insight += b.t_insight_s;
        add += b.t_add_s;
        human_j += b.human_energy.joules();
        ttec_j += b.ttec.joules();
        cf += b.cf_grams;
    }
    const double n = static_cast<double>(sessions.size());
    LlmBreakdown mean;
    mean.qec = Energy::from_joules(qec_j / n);
    mean.t_insight_s = insight / n;
    mean.t_add_s = add / n;
    mean.human_energy = Energy::from_joules(human_j / n);
    mean.ttec = Energy::from_joules(ttec_j / n);
    mean.cf_grams = cf / n;
    return mean;
}

}  // namespace devcarbon
