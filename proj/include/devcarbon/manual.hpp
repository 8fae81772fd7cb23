#pragma once

#include "devcarbon/energy.hpp"
#include "devcarbon/ingest.hpp"
#include "devcarbon/settings.hpp"

namespace devcarbon {

/// Manual-development energy for one task. ttec is exactly cec + dec + tec.
struct ManualBreakdown {
    Energy cec;  // coding at laptop power
    Energy dec;  // extra power while running code during debugging
    Energy tec;  // test runs at runtime power
    Energy ttec;
    double cf_grams = 0.0;
};

Energy manual_cec(const TaskAggregates& agg, const PowerProfile& profile);

/// Time spent running code while debugging: mts * debug_time_share * debug_run_share.
double debug_run_seconds(const TaskAggregates& agg, const WorkflowConstants& constants);

/// Throws ConfigError when runtime power is below laptop power.
Energy manual_dec(const TaskAggregates& agg, const PowerProfile& profile, const WorkflowConstants& constants);

Energy manual_tec(const TaskAggregates& agg, const PowerProfile& profile);

ManualBreakdown manual_breakdown(const TaskAggregates& agg, const PowerProfile& profile,
                                 const WorkflowConstants& constants);

}  // namespace devcarbon
