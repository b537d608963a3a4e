#pragma once

// Agent state transitions for MAX-consensus in open systems.
//
// Two protocol families are provided:
//  * counter: leaving agents send one last message carrying their
//    information level (kappa); higher levels dominate during gossip.
//  * timeout: departures are silent; estimates carry an age and are
//    dropped once the age reaches a threshold.
//
// Every function here is total and pure. Randomness, population
// bookkeeping and agent selection belong to the engine.

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace openmax
{
    // Intrinsic values and estimates are exact integers so that the
    // equality tests in the timeout protocol are well defined.
    using Value = std::int64_t;

    enum class Protocol
    {
        counter,
        timeout
    };

    const char *to_string(Protocol p) noexcept;

    struct CounterState
    {
        Value x;
        Value y; // current MAX estimate
        std::uint64_t kappa; // information level

        friend bool operator==(const CounterState &, const CounterState &) = default;
    };

    struct TimeoutState
    {
        Value x;
        Value y;
        std::uint64_t age; // interactions since the estimate originated

        friend bool operator==(const TimeoutState &, const TimeoutState &) = default;
    };

    CounterState init_counter_agent(Value x) noexcept;

    // Reaction of the agent chosen to receive a departing agent's last message.
    CounterState counter_departure_update(const CounterState &m, std::uint64_t kappa_leaver) noexcept;

    // Pairwise exchange; the returned pair is (new i, new j).
    std::pair<CounterState, CounterState> counter_gossip(const CounterState &i, const CounterState &j) noexcept;

    TimeoutState init_timeout_agent(Value x) noexcept;

    // Whether update_timer discards the estimate of `s` at threshold `t_star`.
    // The guard reads the age before the increment.
    constexpr bool timer_reset_fires(const TimeoutState &s, std::uint64_t t_star) noexcept
    {
        // Only equality is reachable when t_star is non-decreasing over time.
        return s.age >= t_star;
    }

    TimeoutState update_timer(const TimeoutState &s, std::uint64_t t_star) noexcept;

    // Both agents run update_timer first, then the larger estimate wins and
    // carries its age; equal estimates keep the smaller age.
    std::pair<TimeoutState, TimeoutState> timeout_gossip(const TimeoutState &i, const TimeoutState &j,
                                                         std::uint64_t t_star) noexcept;

    // Reset threshold T*, optionally growing linearly with the tick:
    // effective(t) = base + floor(t * growth_amount / growth_every).
    class Threshold
    {
    public:
        static Threshold fixed(std::uint64_t base);
        static Threshold linear(std::uint64_t base, std::uint64_t growth_amount, std::uint64_t growth_every);

        std::uint64_t base() const noexcept { return m_base; }
        bool grows() const noexcept { return m_growth_amount != 0; }
        std::uint64_t growth_amount() const noexcept { return m_growth_amount; }
        std::uint64_t growth_every() const noexcept { return m_growth_every; }

        std::uint64_t effective(std::uint64_t tick) const noexcept;

        friend bool operator==(const Threshold &, const Threshold &) = default;

    private:
        Threshold(std::uint64_t base, std::uint64_t amount, std::uint64_t every);

        std::uint64_t m_base;
        std::uint64_t m_growth_amount;
        std::uint64_t m_growth_every;
    };

    // ceil(factor * population), with products within 1e-9 of an integer
    // snapped to it so that e.g. 1.1 * 10 yields 11.
    std::uint64_t threshold_from_population(double factor, std::uint64_t population);
}
