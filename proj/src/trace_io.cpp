#include "openmax/trace_io.hpp"

#include "openmax/version.hpp"

namespace openmax
{
    using nlohmann::json;

    std::string event_args(const Event &event)
    {
        if (const auto *a = std::get_if<Arrival>(&event))
        {
            return "x=" + std::to_string(a->x);
        }
        if (const auto *d = std::get_if<Departure>(&event))
        {
            std::string s = "leaver=" + std::to_string(d->leaver.value);
            if (d->informed)
            {
                s += ";informed=" + std::to_string(d->informed->value);
            }
            return s;
        }
        const auto &g = std::get<Gossip>(event);
        return "i=" + std::to_string(g.i.value) + ";j=" + std::to_string(g.j.value);
    }

    namespace
    {
        json event_json(const Event &event)
        {
            json e;
            e["kind"] = event_kind(event);
            if (const auto *a = std::get_if<Arrival>(&event))
            {
                e["x"] = a->x;
            }
            else if (const auto *d = std::get_if<Departure>(&event))
            {
                e["leaver"] = d->leaver.value;
                if (d->informed)
                {
                    e["informed"] = d->informed->value;
                }
            }
            else
            {
                const auto &g = std::get<Gossip>(event);
                e["i"] = g.i.value;
                e["j"] = g.j.value;
            }
            return e;
        }

        // Walks ticks 0..final, pairing each tick with its event and snapshot.
        template <typename Fn>
        void for_each_record(const Trace &trace, Fn &&fn)
        {
            std::size_t snap = 0;
            for (std::size_t t = 0; t < trace.metrics.size(); ++t)
            {
                const std::uint64_t tick = trace.metrics[t].tick;
                const Event *event = t == 0 ? nullptr : &trace.events[t - 1].event;
                const World *world = nullptr;
                if (snap < trace.snapshots.size() && trace.snapshots[snap].tick() == tick)
                {
                    world = &trace.snapshots[snap++];
                }
                fn(tick, event, world);
            }
        }

        json optional_json(const auto &opt)
        {
            return opt ? json(*opt) : json(nullptr);
        }
    }

    void write_trace_csv(std::ostream &out, const Trace &trace)
    {
        out << "tick,event_kind,event_args,agents\n";
        for_each_record(trace, [&out](std::uint64_t tick, const Event *event, const World *world) {
            out << tick << ',' << (event ? event_kind(*event) : "init") << ',';
            if (event)
            {
                out << event_args(*event);
            }
            if (world)
            {
                for (const Agent &a : world->agents())
                {
                    out << ',' << a.id.value << ':' << a.x << ':' << a.y << ':' << a.aux;
                }
            }
            out << '\n';
        });
    }

    json trace_to_json(const Trace &trace)
    {
        json j;
        j["format"] = "openmax-trace/1";
        j["seed"] = trace.seed;
        j["scenario"] = trace.scenario.name;
        j["protocol"] = to_string(trace.scenario.protocol);
        j["status"] = to_string(trace.status);
        json records = json::array();
        for_each_record(trace, [&records](std::uint64_t tick, const Event *event, const World *world) {
            json r;
            r["tick"] = tick;
            r["event"] = event ? event_json(*event) : json{{"kind", "init"}};
            if (world)
            {
                json agents = json::array();
                for (const Agent &a : world->agents())
                {
                    agents.push_back(json::array({a.id.value, a.x, a.y, a.aux}));
                }
                r["agents"] = agents;
            }
            records.push_back(std::move(r));
        });
        j["records"] = std::move(records);
        return j;
    }

    json verdict_to_json(const Verdict &verdict, std::uint64_t total)
    {
        json v;
        v["passed"] = total == 0;
        v["violations"] = total;
        json examples = json::array();
        for (const auto &viol : verdict.violations)
        {
            examples.push_back({{"tick", viol.tick},
                                {"agent", viol.agent.value},
                                {"x", viol.x},
                                {"y", viol.y},
                                {"aux", viol.aux},
                                {"detail", viol.detail}});
        }
        v["counterexamples"] = std::move(examples);
        return v;
    }

    json run_summary(const Trace &trace, const OracleMonitor &oracle, const ResetMonitor &resets, double epsilon)
    {
        json s;
        s["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
        s["rng"] = std::string(Rng::kName);
        s["seed"] = trace.seed;
        s["scenario"] = trace.scenario.name;
        s["scenario_config"] = json::parse(to_json_text(trace.scenario));
        s["protocol"] = to_string(trace.scenario.protocol);
        s["status"] = to_string(trace.status);
        s["status_detail"] = trace.status_detail;
        s["horizon"] = trace.scenario.horizon;
        s["final_tick"] = trace.final_tick();
        const std::uint64_t population = trace.metrics.empty() ? 0 : trace.metrics.back().population;
        s["final_population"] = population;

        const auto conv = convergence_time(trace, trace.scenario.reference_tick());
        s["convergence"] = {{"reference_tick", conv.reference_tick},
                            {"converged", conv.converged},
                            {"settle_tick", optional_json(conv.settle_tick)},
                            {"steps_from_event", optional_json(conv.steps_from_event)},
                            {"first_correct_tick", optional_json(conv.first_correct_tick)},
                            {"first_steps", optional_json(conv.first_steps)}};

        if (trace.scenario.protocol == Protocol::timeout)
        {
            json list = json::array();
            for (const auto &r : resets.resets())
            {
                if (r.spurious)
                {
                    list.push_back({{"tick", r.tick}, {"agent", r.agent.value}, {"discarded", r.discarded}});
                }
            }
            s["spurious_resets"] = {{"count", resets.spurious_count()},
                                    {"threshold_resets", resets.resets().size()},
                                    {"events", std::move(list)}};
        }
        else
        {
            s["spurious_resets"] = nullptr;
        }

        json checks = json::object();
        for (const auto &[name, verdict] : oracle.verdicts())
        {
            checks[name] = verdict_to_json(verdict, oracle.counts().at(name));
        }
        s["oracle"] = {{"passed", oracle.passed()}, {"ticks_checked", oracle.ticks_checked()}, {"checks", checks}};

        if (population >= 2)
        {
            s["bounds"] = {{"n_bar", population},
                           {"epsilon", epsilon},
                           {"expected_one_phase", expected_convergence_bound(population, 1)},
                           {"expected_two_phase", expected_convergence_bound(population, 2)},
                           {"high_prob_one_phase", high_prob_bound(population, epsilon, 1)},
                           {"high_prob_two_phase", high_prob_bound(population, epsilon, 2)}};
        }
        else
        {
            s["bounds"] = nullptr;
        }
        return s;
    }
}
