#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

namespace devcarbon {

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline Sleeper real_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

/// Exponential backoff: attempt n (1-based) waits initial * multiplier^(n-1)
/// before the next try, capped at max_backoff.
struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
    double multiplier = 2.0;
    std::chrono::milliseconds max_backoff{60000};

    std::chrono::milliseconds delay_after(int attempt) const {
        const double ms = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, attempt - 1);
        return std::chrono::milliseconds{static_cast<long long>(std::min(ms, static_cast<double>(max_backoff.count())))};
    }
};

}  // namespace devcarbon
