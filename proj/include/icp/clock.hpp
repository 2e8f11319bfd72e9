#pragma once

#include <chrono>
#include <cstdint>
#include <functional>

namespace icp {

/// Seconds since the Unix epoch. Injectable so expiry behavior is testable.
using ClockFn = std::function<std::int64_t()>;

inline std::int64_t system_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

inline ClockFn system_clock_fn() {
    return [] { return system_now(); };
}

inline ClockFn fixed_clock(std::int64_t at) {
    return [at] { return at; };
}

}  // namespace icp
