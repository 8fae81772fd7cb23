#include "devcarbon/energy.hpp"

#include "devcarbon/error.hpp"

#include <cmath>
#include <cstdio>

namespace devcarbon {

namespace {

void require_non_negative(double value, const char* what) {
    if (!std::isfinite(value) || value < 0.0) {
        throw DomainError(std::string(what) + " must be a finite non-negative number");
    }
}

void require_positive(double value, const char* what) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw ConfigError(std::string("power profile: ") + what + " must be strictly positive");
    }
}

}  // namespace

Energy Energy::from_joules(double joules) {
    require_non_negative(joules, "energy");
    return Energy{joules};
}

Energy Energy::from_kwh(double kwh) {
    require_non_negative(kwh, "energy");
    return Energy{kwh * kJoulesPerKwh};
}

void PowerProfile::validate() const {
    require_positive(p_laptop_w, "p_laptop_w");
    if (p_cpu_w) require_positive(*p_cpu_w, "p_cpu_w");
    if (p_ram_full_w) require_positive(*p_ram_full_w, "p_ram_full_w");
    require_positive(ram_capacity_gb, "ram_capacity_gb");
    if (p_runtime_override_w) require_positive(*p_runtime_override_w, "p_runtime_override_w");
    require_positive(e_query_inference_kwh, "e_query_inference_kwh");
    require_positive(e_query_training_kwh, "e_query_training_kwh");
    require_positive(carbon_intensity_g_per_kwh, "carbon_intensity_g_per_kwh");
}

double PowerProfile::ram_capacity_bytes() const noexcept {
    return ram_capacity_gb * 1024.0 * 1024.0 * 1024.0;
}

Energy consumed_energy(double power_watts, double duration_seconds) {
    require_non_negative(power_watts, "power");
    require_non_negative(duration_seconds, "duration");
    return Energy::from_joules(power_watts * duration_seconds);
}

double runtime_power(const PowerProfile& profile, double mem_usage_fraction) {
    if (!std::isfinite(mem_usage_fraction) || mem_usage_fraction < 0.0 || mem_usage_fraction > 1.0) {
        throw DomainError("memory usage fraction must lie in [0, 1]");
    }
    if (profile.p_runtime_override_w) return *profile.p_runtime_override_w;
    if (!profile.p_cpu_w || !profile.p_ram_full_w) {
        throw ConfigError("runtime power: p_cpu_w and p_ram_full_w are required when no override is set");
    }
    return *profile.p_cpu_w + *profile.p_ram_full_w * mem_usage_fraction;
}

double carbon_footprint(Energy energy, const PowerProfile& profile) {
    return energy.kwh() * profile.carbon_intensity_g_per_kwh;
}

std::string format_kwh(double kwh) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2E", kwh);
    return buf;
}

std::string format_grams(double grams, int decimals) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, grams);
    return buf;
}

}  // namespace devcarbon
