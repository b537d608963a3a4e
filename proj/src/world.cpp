#include "openmax/world.hpp"

#include <algorithm>

namespace openmax
{
    const char *event_kind(const Event &e) noexcept
    {
        switch (e.index())
        {
        case 0:
            return "arrival";
        case 1:
            return "departure";
        default:
            return "gossip";
        }
    }

    World::World(Protocol protocol, std::optional<Threshold> threshold)
        : m_protocol(protocol), m_threshold(std::move(threshold))
    {
        if (protocol == Protocol::timeout && !m_threshold)
        {
            throw std::invalid_argument("timeout protocol requires a threshold");
        }
        if (protocol == Protocol::counter && m_threshold)
        {
            throw std::invalid_argument("counter protocol does not use a threshold");
        }
    }

    std::uint64_t World::t_star() const
    {
        if (!m_threshold)
        {
            throw std::logic_error("world has no threshold");
        }
        return m_threshold->effective(m_tick);
    }

    const Agent *World::find(AgentId id) const noexcept
    {
        auto idx = index_of(id);
        return idx ? &m_agents[*idx] : nullptr;
    }

    std::optional<std::size_t> World::index_of(AgentId id) const noexcept
    {
        auto it = std::lower_bound(m_agents.begin(), m_agents.end(), id,
                                   [](const Agent &a, AgentId key) { return a.id < key; });
        if (it == m_agents.end() || it->id != id)
        {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - m_agents.begin());
    }

    AgentId World::add_initial(Value x)
    {
        const AgentId id{m_next_id++};
        // Both initialisations assign y = x and a zero auxiliary field.
        if (m_protocol == Protocol::counter)
        {
            const auto s = init_counter_agent(x);
            m_agents.push_back(Agent{id, s.x, s.y, s.kappa});
        }
        else
        {
            const auto s = init_timeout_agent(x);
            m_agents.push_back(Agent{id, s.x, s.y, s.age});
        }
        return id;
    }

    void World::overwrite(const Agent &agent)
    {
        at(agent.id) = agent;
    }

    Agent &World::at(AgentId id)
    {
        auto idx = index_of(id);
        if (!idx)
        {
            throw StructuralError(m_tick, "agent " + std::to_string(id.value) + " is not present");
        }
        return m_agents[*idx];
    }

    World apply_event(const World &world, const Event &event)
    {
        World next = world;
        const std::uint64_t tick = world.m_tick;

        if (const auto *arrival = std::get_if<Arrival>(&event))
        {
            next.add_initial(arrival->x);
        }
        else if (const auto *dep = std::get_if<Departure>(&event))
        {
            auto idx = next.index_of(dep->leaver);
            if (!idx)
            {
                throw StructuralError(tick, "departing agent " + std::to_string(dep->leaver.value) +
                                                " is not present");
            }
            const Agent leaver = next.m_agents[*idx];
            next.m_agents.erase(next.m_agents.begin() + static_cast<std::ptrdiff_t>(*idx));
            next.m_departed.push_back(leaver.x);

            const bool needs_message = world.m_protocol == Protocol::counter && !next.m_agents.empty();
            if (needs_message != dep->informed.has_value())
            {
                throw StructuralError(tick, needs_message ? "departure lacks an informed agent"
                                                          : "departure names an informed agent it cannot have");
            }
            if (dep->informed)
            {
                if (*dep->informed == dep->leaver)
                {
                    throw StructuralError(tick, "departing agent cannot inform itself");
                }
                Agent &m = next.at(*dep->informed);
                const auto s = counter_departure_update(m.counter_state(), leaver.aux);
                m.y = s.y;
                m.aux = s.kappa;
            }
        }
        else
        {
            const auto &g = std::get<Gossip>(event);
            Agent &a = next.at(g.i);
            // The engine only pairs an agent with itself when it is alone (or
            // when counter self-pairs are enabled). Counter: max of y with itself
            // changes nothing. Timeout: the lone agent still ages, so a stale
            // estimate is eventually discarded.
            if (g.i == g.j)
            {
                if (world.m_protocol == Protocol::timeout)
                {
                    const auto s = update_timer(a.timeout_state(), world.t_star());
                    a.y = s.y;
                    a.aux = s.age;
                }
            }
            else
            {
                Agent &b = next.at(g.j);
                if (world.m_protocol == Protocol::counter)
                {
                    const auto [si, sj] = counter_gossip(a.counter_state(), b.counter_state());
                    a.y = si.y;
                    a.aux = si.kappa;
                    b.y = sj.y;
                    b.aux = sj.kappa;
                }
                else
                {
                    const auto [si, sj] = timeout_gossip(a.timeout_state(), b.timeout_state(), world.t_star());
                    a.y = si.y;
                    a.aux = si.age;
                    b.y = sj.y;
                    b.aux = sj.age;
                }
            }
        }

        next.m_tick = tick + 1;
        return next;
    }
}
