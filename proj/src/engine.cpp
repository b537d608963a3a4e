#include "openmax/engine.hpp"

#include <algorithm>
#include <set>

namespace openmax
{
    const char *to_string(RunStatus s) noexcept
    {
        switch (s)
        {
        case RunStatus::completed:
            return "completed";
        case RunStatus::drained:
            return "drained";
        default:
            return "structural_error";
        }
    }

    bool Trace::has_full_snapshots() const noexcept
    {
        return !metrics.empty() && snapshots.size() == metrics.size();
    }

    World initial_world(const Scenario &scenario, Rng &rng)
    {
        World world(scenario.protocol, scenario.threshold);
        const auto &init = scenario.initial;
        if (init.values)
        {
            for (Value x : *init.values)
            {
                world.add_initial(x);
            }
            return world;
        }
        std::set<Value> used;
        for (std::uint64_t k = 0; k < init.count; ++k)
        {
            Value x = rng.between(init.range.lo, init.range.hi);
            if (init.distinct)
            {
                while (!used.insert(x).second)
                {
                    x = rng.between(init.range.lo, init.range.hi);
                }
            }
            world.add_initial(x);
        }
        return world;
    }

    namespace
    {
        const ScriptedEvent *scripted_at(const ScriptedChurn &churn, std::uint64_t tick)
        {
            auto it = std::lower_bound(churn.events.begin(), churn.events.end(), tick,
                                       [](const ScriptedEvent &e, std::uint64_t t) { return e.tick < t; });
            return it != churn.events.end() && it->tick == tick ? &*it : nullptr;
        }

        std::optional<Event> gossip(const World &world, const Scenario &scenario, Rng &rng)
        {
            const auto agents = world.agents();
            const std::uint64_t n = agents.size();
            if (n == 0)
            {
                return std::nullopt;
            }
            if (n == 1)
            {
                return Gossip{agents[0].id, agents[0].id};
            }
            const std::uint64_t a = rng.below(n);
            if (scenario.allow_self_pairs)
            {
                const std::uint64_t b = rng.below(n);
                return Gossip{agents[a].id, agents[b].id};
            }
            // Uniform over ordered distinct pairs, hence over unordered ones.
            std::uint64_t b = rng.below(n - 1);
            if (b >= a)
            {
                ++b;
            }
            return Gossip{agents[a].id, agents[b].id};
        }

        Event departure(const World &world, std::size_t leaver_index, Rng &rng)
        {
            const auto agents = world.agents();
            Departure d{agents[leaver_index].id, std::nullopt};
            if (world.protocol() == Protocol::counter && agents.size() > 1)
            {
                std::uint64_t k = rng.below(agents.size() - 1);
                if (k >= leaver_index)
                {
                    ++k;
                }
                d.informed = agents[k].id;
            }
            return d;
        }

        std::size_t max_holder(const World &world)
        {
            const auto agents = world.agents();
            std::size_t best = 0;
            for (std::size_t k = 1; k < agents.size(); ++k)
            {
                if (agents[k].x > agents[best].x)
                {
                    best = k;
                }
            }
            return best;
        }
    }

    std::optional<Event> sample_event(const World &world, const Scenario &scenario, Rng &rng)
    {
        const std::uint64_t tick = world.tick();

        if (const auto *sc = std::get_if<ScriptedChurn>(&scenario.churn))
        {
            const ScriptedEvent *ev = scripted_at(*sc, tick);
            if (!ev)
            {
                return gossip(world, scenario, rng);
            }
            if (const auto *a = std::get_if<ScriptedArrival>(&ev->action))
            {
                return Arrival{a->x ? *a->x : rng.between(sc->arrival_range.lo, sc->arrival_range.hi)};
            }
            const auto &d = std::get<ScriptedDeparture>(ev->action);
            if (world.empty())
            {
                throw StructuralError(tick, "scripted departure in an empty world");
            }
            switch (d.target)
            {
            case DepartureTarget::current_max:
                return departure(world, max_holder(world), rng);
            case DepartureTarget::random:
                return departure(world, rng.below(world.size()), rng);
            case DepartureTarget::agent:
            {
                auto idx = world.index_of(d.id);
                if (!idx)
                {
                    throw StructuralError(tick, "scripted departure of absent agent " + std::to_string(d.id.value));
                }
                return departure(world, *idx, rng);
            }
            }
        }

        const auto &st = std::get<StochasticChurn>(scenario.churn);
        if (!st.stop_tick || tick < *st.stop_tick)
        {
            const double u = rng.unit();
            if (u < st.p_arrival)
            {
                return Arrival{rng.between(st.range.lo, st.range.hi)};
            }
            if (u < st.p_arrival + st.p_departure)
            {
                if (world.empty())
                {
                    return std::nullopt;
                }
                return departure(world, rng.below(world.size()), rng);
            }
        }
        return gossip(world, scenario, rng);
    }

    Trace run(const Scenario &scenario, std::uint64_t seed, const RunOptions &options)
    {
        validate(scenario);
        const std::uint64_t stride = options.snapshot_stride.value_or(scenario.snapshot_stride);
        if (stride == 0)
        {
            throw std::invalid_argument("snapshot stride must be positive");
        }

        Trace trace;
        trace.scenario = scenario;
        trace.seed = seed;
        trace.events.reserve(scenario.horizon);
        trace.metrics.reserve(scenario.horizon + 1);

        Rng rng(seed);
        World world = initial_world(scenario, rng);
        trace.metrics.push_back(measure(world));
        trace.snapshots.push_back(world);
        for (auto *obs : options.observers)
        {
            obs->on_start(world);
        }

        while (world.tick() < scenario.horizon)
        {
            std::optional<Event> event;
            std::optional<World> next;
            try
            {
                event = sample_event(world, scenario, rng);
                if (!event)
                {
                    trace.status = RunStatus::drained;
                    trace.status_detail = "no event constructible at tick " + std::to_string(world.tick());
                    break;
                }
                next = apply_event(world, *event);
            }
            catch (const StructuralError &e)
            {
                trace.status = RunStatus::structural_error;
                trace.status_detail = e.what();
                trace.error_tick = e.tick();
                break;
            }

            trace.events.push_back(TickEvent{world.tick(), *event});
            trace.metrics.push_back(measure(*next));
            for (auto *obs : options.observers)
            {
                obs->on_tick(world, *event, *next);
            }
            world = std::move(*next);
            if (world.tick() % stride == 0 || world.tick() == scenario.horizon)
            {
                trace.snapshots.push_back(world);
            }
        }
        if (trace.snapshots.back().tick() != world.tick())
        {
            trace.snapshots.push_back(world);
        }
        return trace;
    }
}
