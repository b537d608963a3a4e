#pragma once

// Builds fully snapshotted traces from hand-picked events.

#include "openmax/engine.hpp"
#include "openmax/tick_metrics.hpp"

#include <initializer_list>
#include <vector>

namespace openmax::testing
{
    inline World make_world(Protocol protocol, std::initializer_list<Value> xs,
                            std::optional<Threshold> threshold = std::nullopt)
    {
        World w(protocol, threshold);
        for (Value x : xs)
        {
            w.add_initial(x);
        }
        return w;
    }

    // The scenario only labels the trace; horizon is set to the event count.
    inline Trace build_trace(World world, const std::vector<Event> &events)
    {
        Trace t;
        t.scenario.protocol = world.protocol();
        t.scenario.threshold = world.threshold();
        t.scenario.horizon = events.size();
        t.metrics.push_back(measure(world));
        t.snapshots.push_back(world);
        for (const Event &e : events)
        {
            t.events.push_back(TickEvent{world.tick(), e});
            world = apply_event(world, e);
            t.metrics.push_back(measure(world));
            t.snapshots.push_back(world);
        }
        return t;
    }

    inline Gossip g(std::uint64_t i, std::uint64_t j)
    {
        return Gossip{AgentId{i}, AgentId{j}};
    }
}
