#pragma once

// Discrete-event loop over a complete interaction graph.
//
// Draw order of the generator (part of the replay contract):
//  1. initial population values, in agent order (only when drawn);
//  2. per tick, stochastic churn before its stop tick: one unit() for the
//     event kind;
//  3. per tick, the selection draws of the chosen event: arrival value;
//     leaver index then informed index; gossip first index then second.

#include "openmax/rng.hpp"
#include "openmax/scenario.hpp"
#include "openmax/tick_metrics.hpp"
#include "openmax/world.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace openmax
{
    struct TickEvent
    {
        std::uint64_t tick; // tick at which the event was applied
        Event event;
        friend bool operator==(const TickEvent &, const TickEvent &) = default;
    };

    enum class RunStatus
    {
        completed,       // horizon reached
        drained,         // empty world and nothing scheduled to arrive
        structural_error // an event did not fit the world
    };

    const char *to_string(RunStatus s) noexcept;

    struct Trace
    {
        Scenario scenario;
        std::uint64_t seed = 0;
        RunStatus status = RunStatus::completed;
        std::string status_detail;
        std::optional<std::uint64_t> error_tick;

        // events[k] takes the world from tick k to tick k + 1.
        std::vector<TickEvent> events;
        // metrics[t] describes the world at tick t; always recorded.
        std::vector<TickMetrics> metrics;
        // Worlds at tick 0, every snapshot_stride ticks, and the final tick.
        std::vector<World> snapshots;

        std::uint64_t final_tick() const noexcept { return metrics.empty() ? 0 : metrics.back().tick; }
        bool has_full_snapshots() const noexcept;

        friend bool operator==(const Trace &, const Trace &) = default;
    };

    // Streaming hook, called once with the initial world and then once per
    // applied event. Lets long sweeps check every tick without storing
    // snapshots.
    class TickObserver
    {
    public:
        virtual ~TickObserver() = default;
        virtual void on_start(const World &) {}
        virtual void on_tick(const World &before, const Event &event, const World &after) = 0;
    };

    // Builds the tick-0 world, drawing values from `rng` when needed.
    World initial_world(const Scenario &scenario, Rng &rng);

    // The next event for `world`, or nullopt when none can be constructed
    // (empty world with no arrival due). Throws StructuralError when a
    // scripted departure finds no agent to remove.
    std::optional<Event> sample_event(const World &world, const Scenario &scenario, Rng &rng);

    struct RunOptions
    {
        std::span<TickObserver *const> observers{};
        std::optional<std::uint64_t> snapshot_stride; // overrides the scenario's
    };

    // Validates the scenario, then applies one event per tick until the
    // horizon. Deterministic in (scenario, seed).
    Trace run(const Scenario &scenario, std::uint64_t seed, const RunOptions &options = {});
}
