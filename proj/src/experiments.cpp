#include "openmax/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <stdexcept>

namespace openmax
{
    namespace
    {
        std::uint64_t parse_u64(std::string_view text)
        {
            std::uint64_t v = 0;
            auto [end, err] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (text.empty() || err != std::errc{} || end != text.data() + text.size())
            {
                throw std::invalid_argument("not a seed: '" + std::string(text) + "'");
            }
            return v;
        }
    }

    SeedRange SeedRange::parse(const std::string &text)
    {
        const auto dots = text.find("..");
        if (dots == std::string::npos)
        {
            const auto v = parse_u64(text);
            return SeedRange{v, v};
        }
        SeedRange r{parse_u64(std::string_view(text).substr(0, dots)),
                    parse_u64(std::string_view(text).substr(dots + 2))};
        if (r.last < r.first)
        {
            throw std::invalid_argument("seed range '" + text + "' is empty");
        }
        return r;
    }

    double SampleStats::standard_error() const noexcept
    {
        return count == 0 ? 0.0 : stddev / std::sqrt(static_cast<double>(count));
    }

    SampleStats summarize(std::vector<double> values)
    {
        SampleStats s;
        s.count = values.size();
        if (values.empty())
        {
            return s;
        }
        std::sort(values.begin(), values.end());
        s.min = values.front();
        s.max = values.back();
        s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        const std::size_t mid = values.size() / 2;
        s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
        if (values.size() > 1)
        {
            double ss = 0.0;
            for (double v : values)
            {
                ss += (v - s.mean) * (v - s.mean);
            }
            s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
        }
        return s;
    }

    RunOutcome run_outcome(const Scenario &scenario, std::uint64_t seed, const OutcomeOptions &options)
    {
        OracleMonitor oracle;
        ResetMonitor resets;
        OutdatedTracker outdated;
        std::vector<TickObserver *> observers{&oracle, &resets};
        if (options.track_outdated)
        {
            observers.push_back(&outdated);
        }
        RunOptions run_options;
        run_options.observers = observers;
        run_options.snapshot_stride = scenario.horizon;
        const Trace trace = run(scenario, seed, run_options);

        RunOutcome out;
        out.seed = seed;
        out.status = trace.status;
        out.convergence = convergence_time(trace, scenario.reference_tick());
        out.oracle_passed = oracle.passed();
        out.oracle_violations = oracle.violation_count();
        out.oracle_ticks = oracle.ticks_checked();
        out.threshold_resets = resets.resets().size();
        out.spurious_resets = resets.spurious_count();
        if (out.convergence.first_correct_tick)
        {
            const auto from = *out.convergence.first_correct_tick;
            out.spurious_after_agreement = resets.spurious_count_after(from);
            out.ticks_after_agreement = trace.final_tick() - from;
        }
        if (options.track_outdated)
        {
            out.outdated = outdated.report();
        }
        return out;
    }

    std::vector<RunOutcome> sweep(const Scenario &scenario, SeedRange seeds, const OutcomeOptions &options)
    {
        std::vector<RunOutcome> out;
        out.reserve(seeds.size());
        for (std::uint64_t seed = seeds.first;; ++seed)
        {
            out.push_back(run_outcome(scenario, seed, options));
            if (seed == seeds.last)
            {
                break;
            }
        }
        return out;
    }

    double CompareRow::median_ratio() const noexcept
    {
        return counter.steps.median > 0.0 ? timeout.steps.median / counter.steps.median : 0.0;
    }

    std::optional<std::pair<std::uint64_t, std::uint64_t>> published_table1(std::uint64_t n)
    {
        switch (n)
        {
        case 10:
            return std::pair<std::uint64_t, std::uint64_t>{21, 64};
        case 20:
            return std::pair<std::uint64_t, std::uint64_t>{129, 162};
        case 30:
            return std::pair<std::uint64_t, std::uint64_t>{194, 599};
        case 50:
            return std::pair<std::uint64_t, std::uint64_t>{246, 1885};
        case 100:
            return std::pair<std::uint64_t, std::uint64_t>{628, 6580};
        default:
            return std::nullopt;
        }
    }

    namespace
    {
        ProtocolColumn column(const Scenario &scenario, SeedRange seeds)
        {
            ProtocolColumn col;
            std::vector<double> steps;
            for (const auto &o : sweep(scenario, seeds))
            {
                col.oracle_violations += o.oracle_violations;
                if (o.convergence.first_steps)
                {
                    steps.push_back(static_cast<double>(*o.convergence.first_steps));
                }
                else
                {
                    ++col.not_converged;
                }
            }
            col.steps = summarize(std::move(steps));
            return col;
        }
    }

    std::vector<CompareRow> compare(const std::vector<std::uint64_t> &sizes, SeedRange seeds)
    {
        std::vector<CompareRow> rows;
        for (std::uint64_t n : sizes)
        {
            if (n < 2)
            {
                throw std::invalid_argument("compare needs at least 2 agents per size");
            }
            CompareRow row;
            row.n = n;
            const Scenario timeout = table1_scenario(n, Protocol::timeout);
            row.t_star = timeout.threshold->base();
            row.counter = column(table1_scenario(n, Protocol::counter), seeds);
            row.timeout = column(timeout, seeds);
            if (auto published = published_table1(n))
            {
                row.published_counter = published->first;
                row.published_timeout = published->second;
            }
            // The bounds need at least two remaining agents.
            if (n >= 3)
            {
                row.expected_bound = expected_convergence_bound(n - 1, 2);
                row.high_prob_bound = high_prob_bound(n - 1, 0.05, 2);
            }
            rows.push_back(row);
        }
        return rows;
    }

    namespace
    {
        std::string published_cell(const std::optional<std::uint64_t> &v)
        {
            return v ? std::to_string(*v) : std::string("-");
        }
    }

    void write_compare_table(std::ostream &out, const std::vector<CompareRow> &rows)
    {
        const auto flags = out.flags();
        const auto precision = out.precision();
        out << std::fixed << std::setprecision(1);
        out << std::setw(5) << "N" << std::setw(6) << "T*" << " |" << std::setw(10) << "cnt.med" << std::setw(10)
            << "cnt.mean" << std::setw(9) << "cnt.pub" << std::setw(4) << "nc" << " |" << std::setw(10) << "tmo.med"
            << std::setw(10) << "tmo.mean" << std::setw(9) << "tmo.pub" << std::setw(4) << "nc" << " |"
            << std::setw(8) << "ratio" << std::setw(10) << "E-bound" << std::setw(10) << "P-bound" << '\n';
        for (const auto &r : rows)
        {
            out << std::setw(5) << r.n << std::setw(6) << r.t_star << " |" << std::setw(10) << r.counter.steps.median
                << std::setw(10) << r.counter.steps.mean << std::setw(9) << published_cell(r.published_counter)
                << std::setw(4) << r.counter.not_converged << " |" << std::setw(10) << r.timeout.steps.median
                << std::setw(10) << r.timeout.steps.mean << std::setw(9) << published_cell(r.published_timeout)
                << std::setw(4) << r.timeout.not_converged << " |" << std::setw(8) << std::setprecision(2)
                << r.median_ratio() << std::setprecision(1) << std::setw(10) << r.expected_bound << std::setw(10)
                << r.high_prob_bound << '\n';
        }
        out.flags(flags);
        out.precision(precision);
    }

    void write_compare_csv(std::ostream &out, const std::vector<CompareRow> &rows)
    {
        out << "n,t_star,counter_median,counter_mean,counter_min,counter_max,counter_not_converged,"
               "counter_published,timeout_median,timeout_mean,timeout_min,timeout_max,timeout_not_converged,"
               "timeout_published,median_ratio,expected_bound_2phase,high_prob_bound_2phase\n";
        for (const auto &r : rows)
        {
            auto pub = [](const std::optional<std::uint64_t> &v) { return v ? std::to_string(*v) : std::string(); };
            out << r.n << ',' << r.t_star << ',' << r.counter.steps.median << ',' << r.counter.steps.mean << ','
                << r.counter.steps.min << ',' << r.counter.steps.max << ',' << r.counter.not_converged << ','
                << pub(r.published_counter) << ',' << r.timeout.steps.median << ',' << r.timeout.steps.mean << ','
                << r.timeout.steps.min << ',' << r.timeout.steps.max << ',' << r.timeout.not_converged << ','
                << pub(r.published_timeout) << ',' << r.median_ratio() << ',' << r.expected_bound << ','
                << r.high_prob_bound << '\n';
        }
    }

    nlohmann::json compare_to_json(const std::vector<CompareRow> &rows, SeedRange seeds)
    {
        using nlohmann::json;
        auto stats = [](const ProtocolColumn &c) {
            return json{{"count", c.steps.count},     {"mean", c.steps.mean}, {"median", c.steps.median},
                        {"min", c.steps.min},         {"max", c.steps.max},   {"stddev", c.steps.stddev},
                        {"not_converged", c.not_converged}, {"oracle_violations", c.oracle_violations}};
        };
        json out;
        out["seeds"] = {{"first", seeds.first}, {"last", seeds.last}};
        json list = json::array();
        for (const auto &r : rows)
        {
            list.push_back({{"n", r.n},
                            {"t_star", r.t_star},
                            {"counter", stats(r.counter)},
                            {"timeout", stats(r.timeout)},
                            {"published_counter", r.published_counter ? json(*r.published_counter) : json(nullptr)},
                            {"published_timeout", r.published_timeout ? json(*r.published_timeout) : json(nullptr)},
                            {"median_ratio", r.median_ratio()},
                            {"expected_bound_2phase", r.expected_bound},
                            {"high_prob_bound_2phase", r.high_prob_bound}});
        }
        out["rows"] = std::move(list);
        return out;
    }
}
