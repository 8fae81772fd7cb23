#pragma once

#include "devcarbon/energy.hpp"
#include "devcarbon/session.hpp"
#include "devcarbon/settings.hpp"

#include <span>

namespace devcarbon {

/// LLM-assisted energy for one task: ttec = qec + human_energy, where the
/// human part is (t_insight + t_add) at laptop power.
struct LlmBreakdown {
    Energy qec;
    double t_insight_s = 0.0;
    double t_add_s = 0.0;
    Energy human_energy;
    Energy ttec;
    double cf_grams = 0.0;
};

/// Protocol metrics, possibly averaged over repetitions.
struct SessionMeans {
    double nqbh = 0.0;
    double nhiq = 0.0;
    double tc_passed_pre_insight = 0.0;
    double tpah = 0.0;

    double total_queries() const noexcept { return nqbh + nhiq; }
    bool insight_used() const noexcept { return nhiq > 0.0; }
};

SessionMeans means_of(const LlmSessionRecord& session);
SessionMeans means_of(const RepetitionSummary& summary);

/// Inference plus amortized training energy for `total_queries` (fractional
/// counts allowed for means).
Energy query_energy(double total_queries, const PowerProfile& profile);

/// Time to produce the insight: 0 when unused, else mts * understanding_share * (1 - tc_passed).
double insight_time_s(double mts_s, double tc_passed_pre_insight, bool insight_used,
                      const WorkflowConstants& constants = {});

/// Time to add what the LLM left unsolved: 0 when tpah = 1, else
/// max(0, mts * read_extend_share + (1 - tpah) * mts - t_insight).
double add_functionality_time_s(double mts_s, double tpah, double t_insight_s,
                                const WorkflowConstants& constants = {});

/// Evaluates the formulas once on the given (possibly averaged) metrics.
LlmBreakdown llm_breakdown(const SessionMeans& means, double mts_s, const PowerProfile& profile,
                           const WorkflowConstants& constants = {});

/// Evaluates each session separately and averages the resulting breakdowns.
LlmBreakdown llm_breakdown_per_repetition(std::span<const LlmSessionRecord> sessions, double mts_s,
                                          const PowerProfile& profile, const WorkflowConstants& constants = {});

}  // namespace devcarbon
