#include "openmax/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace openmax
{
    TickMetrics measure(const World &world)
    {
        TickMetrics m;
        m.tick = world.tick();
        const auto agents = world.agents();
        m.population = agents.size();
        if (agents.empty())
        {
            return m;
        }
        Value max_x = agents[0].x;
        Value lo = agents[0].y;
        Value hi = agents[0].y;
        std::uint64_t top_kappa = agents[0].aux;
        for (const Agent &a : agents)
        {
            max_x = std::max(max_x, a.x);
            lo = std::min(lo, a.y);
            hi = std::max(hi, a.y);
            top_kappa = std::max(top_kappa, a.aux);
        }
        for (const Agent &a : agents)
        {
            m.num_correct += a.y == max_x ? 1 : 0;
        }
        m.current_max = max_x;
        m.min_y = lo;
        m.max_y = hi;
        if (world.protocol() == Protocol::counter)
        {
            m.max_kappa = top_kappa;
        }
        return m;
    }

    ConvergenceReport convergence_time(const Trace &trace, std::uint64_t reference_tick)
    {
        ConvergenceReport report;
        report.reference_tick = reference_tick;
        const auto &metrics = trace.metrics;

        for (const auto &m : metrics)
        {
            if (m.tick > reference_tick && m.all_correct())
            {
                report.first_correct_tick = m.tick;
                report.first_steps = m.tick - reference_tick;
                break;
            }
        }

        if (trace.status != RunStatus::completed || metrics.empty() || reference_tick > metrics.back().tick)
        {
            return report;
        }
        std::optional<std::uint64_t> settle;
        for (auto it = metrics.rbegin(); it != metrics.rend() && it->tick >= reference_tick; ++it)
        {
            if (!it->all_correct())
            {
                break;
            }
            settle = it->tick;
        }
        if (settle)
        {
            report.converged = true;
            report.settle_tick = settle;
            report.steps_from_event = *settle - reference_tick;
        }
        return report;
    }

    std::vector<ThresholdReset> threshold_resets(const World &before, const Event &event)
    {
        std::vector<ThresholdReset> out;
        if (before.protocol() != Protocol::timeout)
        {
            return out;
        }
        const auto *g = std::get_if<Gossip>(&event);
        if (!g)
        {
            return out;
        }
        const std::uint64_t t_star = before.t_star();
        const auto agents = before.agents();
        auto value_present = [&](Value v) {
            return std::any_of(agents.begin(), agents.end(), [v](const Agent &a) { return a.x == v; });
        };
        const std::size_t involved = g->i == g->j ? 1 : 2;
        const AgentId ids[2] = {g->i, g->j};
        for (std::size_t k = 0; k < involved; ++k)
        {
            const AgentId id = ids[k];
            const Agent *a = before.find(id);
            if (a && a->aux >= t_star)
            {
                out.push_back(ThresholdReset{before.tick(), id, a->y, value_present(a->y)});
            }
        }
        return out;
    }

    std::vector<ThresholdReset> spurious_resets(const Trace &trace)
    {
        if (trace.scenario.protocol != Protocol::timeout)
        {
            throw NotApplicable("spurious resets are defined for the timeout protocol only");
        }
        if (!trace.has_full_snapshots())
        {
            throw std::invalid_argument("spurious_resets needs a snapshot at every tick");
        }
        std::vector<ThresholdReset> out;
        for (std::size_t k = 0; k < trace.events.size(); ++k)
        {
            for (const auto &r : threshold_resets(trace.snapshots[k], trace.events[k].event))
            {
                if (r.spurious)
                {
                    out.push_back(r);
                }
            }
        }
        return out;
    }

    void ResetMonitor::on_tick(const World &before, const Event &event, const World &)
    {
        for (const auto &r : threshold_resets(before, event))
        {
            m_resets.push_back(r);
        }
    }

    std::uint64_t ResetMonitor::spurious_count() const noexcept
    {
        return static_cast<std::uint64_t>(
            std::count_if(m_resets.begin(), m_resets.end(), [](const ThresholdReset &r) { return r.spurious; }));
    }

    std::uint64_t ResetMonitor::spurious_count_after(std::uint64_t tick) const noexcept
    {
        return static_cast<std::uint64_t>(std::count_if(m_resets.begin(), m_resets.end(), [tick](const ThresholdReset &r) {
            return r.spurious && r.tick >= tick;
        }));
    }

    double harmonic(std::uint64_t n)
    {
        if (n == 0)
        {
            throw std::invalid_argument("harmonic number needs n >= 1");
        }
        // Smallest terms first.
        double sum = 0.0;
        for (std::uint64_t k = n; k >= 1; --k)
        {
            sum += 1.0 / static_cast<double>(k);
        }
        return sum;
    }

    namespace
    {
        void check_bound_args(std::uint64_t n_bar, int phases)
        {
            if (n_bar < 2)
            {
                throw std::invalid_argument("bound needs n_bar >= 2");
            }
            if (phases != 1 && phases != 2)
            {
                throw std::invalid_argument("phases must be 1 or 2");
            }
        }
    }

    double expected_convergence_bound(std::uint64_t n_bar, int phases)
    {
        check_bound_args(n_bar, phases);
        return phases * static_cast<double>(n_bar - 1) * harmonic(n_bar - 1);
    }

    double high_prob_bound(std::uint64_t n_bar, double epsilon, int phases)
    {
        check_bound_args(n_bar, phases);
        if (!(epsilon > 0.0 && epsilon < 1.0))
        {
            throw std::invalid_argument("epsilon must lie strictly between 0 and 1");
        }
        // Natural logarithm.
        const double log_term = std::log(static_cast<double>(n_bar) / epsilon);
        if (!(log_term > 0.0))
        {
            throw std::domain_error("log(n_bar / epsilon) must be positive");
        }
        const double scale = 1.0 + log_term * (1.0 + std::sqrt(1.0 + 1.0 / log_term));
        return expected_convergence_bound(n_bar, phases) * scale;
    }

    void write_metrics_csv(std::ostream &out, const Trace &trace)
    {
        out << "tick,MAX,num_correct,K,min_y,max_y\n";
        auto cell = [&out](const auto &opt) {
            if (opt)
            {
                out << *opt;
            }
        };
        for (const auto &m : trace.metrics)
        {
            out << m.tick << ',';
            cell(m.current_max);
            out << ',' << m.num_correct << ',';
            cell(m.max_kappa);
            out << ',';
            cell(m.min_y);
            out << ',';
            cell(m.max_y);
            out << '\n';
        }
    }
}
