#pragma once

// Population state and the event taxonomy of the simulation: at every tick
// exactly one agent arrives, one agent departs, or two agents gossip.

#include "openmax/protocol.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace openmax
{
    // Bookkeeping identity; protocol logic never sees it.
    struct AgentId
    {
        std::uint64_t value;

        friend auto operator<=>(const AgentId &, const AgentId &) = default;
    };

    // Protocol-neutral agent record. `aux` is kappa under the counter
    // protocol and the information age under the timeout protocol.
    struct Agent
    {
        AgentId id;
        Value x;
        Value y;
        std::uint64_t aux;

        CounterState counter_state() const noexcept { return {x, y, aux}; }
        TimeoutState timeout_state() const noexcept { return {x, y, aux}; }

        friend bool operator==(const Agent &, const Agent &) = default;
    };

    struct Arrival
    {
        Value x;
        friend bool operator==(const Arrival &, const Arrival &) = default;
    };

    struct Departure
    {
        AgentId leaver;
        std::optional<AgentId> informed; // counter protocol only
        friend bool operator==(const Departure &, const Departure &) = default;
    };

    struct Gossip
    {
        AgentId i;
        AgentId j;
        friend bool operator==(const Gossip &, const Gossip &) = default;
    };

    using Event = std::variant<Arrival, Departure, Gossip>;

    const char *event_kind(const Event &e) noexcept;

    // An event that does not fit the world it is applied to. This signals a
    // scenario or engine bug, never protocol behaviour.
    class StructuralError : public std::runtime_error
    {
    public:
        StructuralError(std::uint64_t tick, const std::string &what)
            : std::runtime_error("tick " + std::to_string(tick) + ": " + what), m_tick(tick)
        {
        }

        std::uint64_t tick() const noexcept { return m_tick; }

    private:
        std::uint64_t m_tick;
    };

    class World
    {
    public:
        World(Protocol protocol, std::optional<Threshold> threshold);

        Protocol protocol() const noexcept { return m_protocol; }
        std::uint64_t tick() const noexcept { return m_tick; }
        const std::optional<Threshold> &threshold() const noexcept { return m_threshold; }

        // Effective T* at the current tick (timeout protocol only).
        std::uint64_t t_star() const;

        // Sorted by id; ids are handed out in increasing order.
        std::span<const Agent> agents() const noexcept { return m_agents; }
        std::size_t size() const noexcept { return m_agents.size(); }
        bool empty() const noexcept { return m_agents.empty(); }

        // Intrinsic values of departed agents, in departure order.
        std::span<const Value> departed_values() const noexcept { return m_departed; }

        const Agent *find(AgentId id) const noexcept;
        std::optional<std::size_t> index_of(AgentId id) const noexcept;

        // Inserts a freshly initialised agent without consuming a tick. Used to
        // build the initial population.
        AgentId add_initial(Value x);

        // Test hook: overwrite an agent record, e.g. to inject corruption.
        void overwrite(const Agent &agent);

        friend World apply_event(const World &world, const Event &event);

        friend bool operator==(const World &, const World &) = default;

    private:
        Agent &at(AgentId id);

        Protocol m_protocol;
        std::optional<Threshold> m_threshold;
        std::uint64_t m_tick = 0;
        std::uint64_t m_next_id = 0;
        std::vector<Agent> m_agents;
        std::vector<Value> m_departed;
    };

    // Applies one event and advances the tick by one. Throws StructuralError
    // when the event references absent agents or violates the event
    // invariants (informed agent present iff counter protocol and the
    // population after removal is non-empty).
    World apply_event(const World &world, const Event &event);
}
