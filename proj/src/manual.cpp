#include "devcarbon/manual.hpp"

#include "devcarbon/error.hpp"

namespace devcarbon {

Energy manual_cec(const TaskAggregates& agg, const PowerProfile& profile) {
    return consumed_energy(profile.p_laptop_w, agg.mts_s);
}

double debug_run_seconds(const TaskAggregates& agg, const WorkflowConstants& constants) {
    return agg.mts_s * constants.debug_time_share * constants.debug_run_share;
}

Energy manual_dec(const TaskAggregates& agg, const PowerProfile& profile, const WorkflowConstants& constants) {
    const double p_runtime = runtime_power(profile, agg.mean_mem_fraction);
    if (p_runtime < profile.p_laptop_w) {
        throw ConfigError("runtime power is below laptop power; debugging power delta would be negative");
    }
    return consumed_energy(p_runtime - profile.p_laptop_w, debug_run_seconds(agg, constants));
}

Energy manual_tec(const TaskAggregates& agg, const PowerProfile& profile) {
    const double p_runtime = runtime_power(profile, agg.mean_mem_fraction);
    return consumed_energy(p_runtime, agg.mean_runtime_s * agg.mean_submission_count);
}

ManualBreakdown manual_breakdown(const TaskAggregates& agg, const PowerProfile& profile,
                                 const WorkflowConstants& constants) {
    ManualBreakdown b;
    b.cec = manual_cec(agg, profile);
    b.dec = manual_dec(agg, profile, constants);
    b.tec = manual_tec(agg, profile);
    b.ttec = b.cec + b.dec + b.tec;
    b.cf_grams = carbon_footprint(b.ttec, profile);
    return b;
}

}  // namespace devcarbon
