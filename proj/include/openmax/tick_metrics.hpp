#pragma once

#include "openmax/world.hpp"

#include <cstdint>
#include <optional>

namespace openmax
{
    // Population-level summary of one tick.
    struct TickMetrics
    {
        std::uint64_t tick = 0;
        std::uint64_t population = 0;
        std::optional<Value> current_max;          // MAX(t); absent for an empty world
        std::uint64_t num_correct = 0;             // agents with y == MAX(t)
        std::optional<std::uint64_t> max_kappa;    // K(t), counter protocol only
        std::optional<Value> min_y;
        std::optional<Value> max_y;

        // Every present agent holds MAX(t). An empty world is never correct.
        bool all_correct() const noexcept { return population > 0 && num_correct == population; }

        friend bool operator==(const TickMetrics &, const TickMetrics &) = default;
    };

    TickMetrics measure(const World &world);
}
