#include "openmax/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace openmax
{
    const char *to_string(Protocol p) noexcept
    {
        return p == Protocol::counter ? "counter" : "timeout";
    }

    CounterState init_counter_agent(Value x) noexcept
    {
        return CounterState{x, x, 0};
    }

    CounterState counter_departure_update(const CounterState &m, std::uint64_t kappa_leaver) noexcept
    {
        if (kappa_leaver < m.kappa)
        {
            return m;
        }
        return CounterState{m.x, m.x, kappa_leaver + 1};
    }

    std::pair<CounterState, CounterState> counter_gossip(const CounterState &i, const CounterState &j) noexcept
    {
        if (i.kappa == j.kappa)
        {
            const Value y = std::max(i.y, j.y);
            return {CounterState{i.x, y, i.kappa}, CounterState{j.x, y, j.kappa}};
        }
        if (i.kappa > j.kappa)
        {
            // j may hold outdated information; only its own value is trusted.
            const Value y = std::max(i.y, j.x);
            return {CounterState{i.x, y, i.kappa}, CounterState{j.x, y, i.kappa}};
        }
        const Value y = std::max(i.x, j.y);
        return {CounterState{i.x, y, j.kappa}, CounterState{j.x, y, j.kappa}};
    }

    TimeoutState init_timeout_agent(Value x) noexcept
    {
        return TimeoutState{x, x, 0};
    }

    TimeoutState update_timer(const TimeoutState &s, std::uint64_t t_star) noexcept
    {
        if (timer_reset_fires(s, t_star))
        {
            return TimeoutState{s.x, s.x, 0};
        }
        if (s.y == s.x)
        {
            return TimeoutState{s.x, s.x, 0};
        }
        return TimeoutState{s.x, s.y, s.age + 1};
    }

    std::pair<TimeoutState, TimeoutState> timeout_gossip(const TimeoutState &i, const TimeoutState &j,
                                                         std::uint64_t t_star) noexcept
    {
        TimeoutState a = update_timer(i, t_star);
        TimeoutState b = update_timer(j, t_star);
        if (a.y > b.y)
        {
            b.y = a.y;
            b.age = a.age;
        }
        else if (b.y > a.y)
        {
            a.y = b.y;
            a.age = b.age;
        }
        else
        {
            const auto age = std::min(a.age, b.age);
            a.age = age;
            b.age = age;
        }
        return {a, b};
    }

    Threshold::Threshold(std::uint64_t base, std::uint64_t amount, std::uint64_t every)
        : m_base(base), m_growth_amount(amount), m_growth_every(every)
    {
        if (base == 0)
        {
            throw std::invalid_argument("threshold base must be positive");
        }
        if (every == 0)
        {
            throw std::invalid_argument("threshold growth interval must be positive");
        }
    }

    Threshold Threshold::fixed(std::uint64_t base)
    {
        return Threshold(base, 0, 1);
    }

    Threshold Threshold::linear(std::uint64_t base, std::uint64_t growth_amount, std::uint64_t growth_every)
    {
        return Threshold(base, growth_amount, growth_every);
    }

    std::uint64_t Threshold::effective(std::uint64_t tick) const noexcept
    {
        if (m_growth_amount == 0)
        {
            return m_base;
        }
        // 128-bit product keeps long horizons exact.
        const unsigned __int128 grown = static_cast<unsigned __int128>(tick) * m_growth_amount / m_growth_every;
        const unsigned __int128 total = grown + m_base;
        if (total > std::numeric_limits<std::uint64_t>::max())
        {
            return std::numeric_limits<std::uint64_t>::max();
        }
        return static_cast<std::uint64_t>(total);
    }

    std::uint64_t threshold_from_population(double factor, std::uint64_t population)
    {
        if (!(factor > 0.0) || !std::isfinite(factor))
        {
            throw std::invalid_argument("threshold factor must be positive and finite");
        }
        const double product = factor * static_cast<double>(population);
        const double nearest = std::round(product);
        const double value = std::abs(product - nearest) < 1e-9 ? nearest : std::ceil(product);
        return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(value));
    }
}
