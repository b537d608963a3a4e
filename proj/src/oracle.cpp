#include "openmax/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace openmax
{
    namespace
    {
        Violation violation(const World &w, const Agent &a, std::string detail)
        {
            return Violation{w.tick(), a.id, a.x, a.y, a.aux, std::move(detail)};
        }
    }

    Verdict check_lemma1(const World &world)
    {
        Verdict v{"lemma1", true, {}};
        if (world.protocol() != Protocol::counter)
        {
            v.applicable = false;
            return v;
        }
        const auto agents = world.agents();
        if (agents.empty())
        {
            return v;
        }
        std::uint64_t top = 0;
        for (const Agent &a : agents)
        {
            top = std::max(top, a.aux);
        }
        std::vector<Value> top_values; // X_K(t)
        for (const Agent &a : agents)
        {
            if (a.aux == top)
            {
                top_values.push_back(a.x);
            }
        }
        std::sort(top_values.begin(), top_values.end());
        for (const Agent &a : agents)
        {
            if (a.aux == top && !std::binary_search(top_values.begin(), top_values.end(), a.y))
            {
                v.violations.push_back(violation(world, a, "estimate is not the value of any agent at level K(t)"));
            }
        }
        return v;
    }

    Verdict check_lower_bound(const World &world)
    {
        Verdict v{"lower_bound", true, {}};
        for (const Agent &a : world.agents())
        {
            if (a.y < a.x)
            {
                v.violations.push_back(violation(world, a, "estimate below own value"));
            }
        }
        return v;
    }

    Verdict check_provenance(const World &world)
    {
        Verdict v{"provenance", true, {}};
        std::vector<Value> known(world.departed_values().begin(), world.departed_values().end());
        for (const Agent &a : world.agents())
        {
            known.push_back(a.x);
        }
        std::sort(known.begin(), known.end());
        for (const Agent &a : world.agents())
        {
            if (!std::binary_search(known.begin(), known.end(), a.y))
            {
                v.violations.push_back(violation(world, a, "estimate matches no present or departed value"));
            }
        }
        return v;
    }

    Verdict check_age_bounds(const World &world)
    {
        Verdict v{"age_bounds", true, {}};
        if (world.protocol() != Protocol::timeout)
        {
            v.applicable = false;
            return v;
        }
        const std::uint64_t limit = world.t_star();
        for (const Agent &a : world.agents())
        {
            if (a.aux > limit)
            {
                v.violations.push_back(violation(world, a, "age exceeds T*"));
            }
            else if (a.y == a.x && a.aux != 0)
            {
                v.violations.push_back(violation(world, a, "own value with non-zero age"));
            }
        }
        return v;
    }

    void OracleMonitor::absorb(Verdict v)
    {
        if (!v.applicable)
        {
            return;
        }
        auto [it, inserted] = m_verdicts.try_emplace(v.check, Verdict{v.check, true, {}});
        auto &count = m_counts[v.check];
        count += v.violations.size();
        m_total += v.violations.size();
        for (auto &viol : v.violations)
        {
            if (it->second.violations.size() >= m_max_kept)
            {
                break;
            }
            it->second.violations.push_back(std::move(viol));
        }
    }

    void OracleMonitor::check(const World &world)
    {
        ++m_ticks;
        absorb(check_lemma1(world));
        absorb(check_lower_bound(world));
        absorb(check_provenance(world));
        absorb(check_age_bounds(world));
    }

    void OracleMonitor::on_start(const World &world)
    {
        check(world);
    }

    void OracleMonitor::on_tick(const World &before, const Event &, const World &after)
    {
        check(after);
        if (after.protocol() != Protocol::counter)
        {
            return;
        }
        Verdict v{"kappa_monotone", true, {}};
        for (const Agent &a : after.agents())
        {
            const Agent *prev = before.find(a.id);
            if (prev && a.aux < prev->aux)
            {
                v.violations.push_back(violation(after, a, "counter decreased"));
            }
        }
        absorb(std::move(v));
    }

    bool OutdatedReport::all_extinct() const noexcept
    {
        return std::all_of(episodes.begin(), episodes.end(),
                           [](const OutdatedEpisode &e) { return e.extinct_tick || e.superseded_tick; });
    }

    bool OutdatedReport::tau_ok() const noexcept
    {
        return std::all_of(episodes.begin(), episodes.end(),
                           [](const OutdatedEpisode &e) { return e.tau_monotone && e.tau_bounded; });
    }

    const OutdatedEpisode *OutdatedReport::find(Value z) const noexcept
    {
        for (auto it = episodes.rbegin(); it != episodes.rend(); ++it)
        {
            if (it->z == z)
            {
                return &*it;
            }
        }
        return nullptr;
    }

    void OutdatedTracker::observe(const World &world)
    {
        const auto departed = world.departed_values();
        for (; m_departed_seen < departed.size(); ++m_departed_seen)
        {
            m_known.try_emplace(departed[m_departed_seen]);
        }
        if (m_known.empty())
        {
            return;
        }

        const auto agents = world.agents();
        std::vector<Value> present;
        present.reserve(agents.size());
        for (const Agent &a : agents)
        {
            present.push_back(a.x);
        }
        std::sort(present.begin(), present.end());
        const bool timed = world.protocol() == Protocol::timeout;

        for (auto &[z, active] : m_known)
        {
            if (std::binary_search(present.begin(), present.end(), z))
            {
                // Not outdated while some present agent carries z.
                if (active)
                {
                    m_report.episodes[active->episode].superseded_tick = world.tick();
                    active.reset();
                }
                continue;
            }
            if (!active)
            {
                m_report.episodes.push_back(OutdatedEpisode{z, world.tick(), {}, {}, 0, {}, true, true, {}});
                active = Active{m_report.episodes.size() - 1, std::nullopt};
            }
            OutdatedEpisode &ep = m_report.episodes[active->episode];
            if (ep.extinct_tick)
            {
                continue; // nothing can bring z back short of an arrival
            }

            std::uint64_t holders = 0;
            std::optional<std::uint64_t> tau;
            for (const Agent &a : agents)
            {
                if (a.y == z)
                {
                    ++holders;
                    if (timed)
                    {
                        tau = tau ? std::min(*tau, a.aux) : a.aux;
                    }
                }
            }
            if (m_record)
            {
                ep.samples.push_back(OutdatedSample{world.tick(), holders, tau});
            }
            if (holders == 0)
            {
                ep.extinct_tick = world.tick();
                continue;
            }
            ep.max_holders = std::max(ep.max_holders, holders);
            if (tau)
            {
                ep.max_tau = ep.max_tau ? std::max(*ep.max_tau, *tau) : *tau;
                if (active->last_tau && *tau < *active->last_tau)
                {
                    ep.tau_monotone = false;
                }
                if (*tau > world.t_star())
                {
                    ep.tau_bounded = false;
                }
                active->last_tau = tau;
            }
        }
    }

    OutdatedReport track_outdated(const Trace &trace, bool record_series)
    {
        if (!trace.has_full_snapshots())
        {
            throw std::invalid_argument("track_outdated needs a snapshot at every tick");
        }
        OutdatedTracker tracker(record_series);
        for (const World &w : trace.snapshots)
        {
            tracker.observe(w);
        }
        return tracker.report();
    }
}
