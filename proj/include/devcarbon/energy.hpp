#pragma once

#include <optional>
#include <string>

namespace devcarbon {

inline constexpr double kJoulesPerKwh = 3.6e6;

/// Non-negative amount of energy. Stored in joules; kWh only at the edges.
class Energy {
public:
    constexpr Energy() = default;

    static Energy from_joules(double joules);
    static Energy from_kwh(double kwh);

    constexpr double joules() const noexcept { return joules_; }
    constexpr double kwh() const noexcept { return joules_ / kJoulesPerKwh; }

    constexpr Energy operator+(Energy other) const noexcept { return Energy{joules_ + other.joules_}; }
    constexpr Energy& operator+=(Energy other) noexcept {
        joules_ += other.joules_;
        return *this;
    }
    friend constexpr bool operator==(Energy, Energy) = default;

private:
    constexpr explicit Energy(double joules) : joules_(joules) {}

    double joules_ = 0.0;
};

/// Every power and energy constant used by the estimators.
struct PowerProfile {
    double p_laptop_w = 4.075;
    // Neither value is published; the memory-scaled runtime power needs both.
    std::optional<double> p_cpu_w;
    std::optional<double> p_ram_full_w;
    double ram_capacity_gb = 16.0;
    // Debug/test power back-solved from the manual table; replaces the memory-scaled form when set.
    std::optional<double> p_runtime_override_w = 14.0;
    double e_query_inference_kwh = 0.0022;
    double e_query_training_kwh = 0.0088;
    double carbon_intensity_g_per_kwh = 217.0;

    /// Throws ConfigError unless every present field is finite and strictly positive.
    void validate() const;

    double per_query_kwh() const noexcept { return e_query_inference_kwh + e_query_training_kwh; }
    double ram_capacity_bytes() const noexcept;
};

/// E = p * t. Throws DomainError on negative or non-finite inputs.
Energy consumed_energy(double power_watts, double duration_seconds);

/// Power drawn while running code: the override when set, otherwise
/// p_cpu + p_ram_full * mem_usage_fraction.
double runtime_power(const PowerProfile& profile, double mem_usage_fraction);

/// Grams CO2e for the given energy at the profile's carbon intensity.
double carbon_footprint(Energy energy, const PowerProfile& profile);

// Report formatting: energies as 3 significant figures in scientific
// notation ("5.03E-04"), grams as fixed with 3 decimals ("0.120").
std::string format_kwh(double kwh);
std::string format_grams(double grams, int decimals = 3);

}  // namespace devcarbon
