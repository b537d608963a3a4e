#pragma once

// Serialized forms of traces and run summaries. All output is a pure
// function of (scenario, seed): integers only in traces, sorted keys in JSON.
//
// Trace CSV, one record per tick:
//   tick,event_kind,event_args[,id:x:y:aux ...]
// Row t holds the event that produced tick t (applied at tick t - 1); tick 0
// carries event_kind "init". Agent tuples appear on snapshot ticks
// only; aux is kappa (counter) or age (timeout). event_args:
//   arrival    x=<value>
//   departure  leaver=<id>[;informed=<id>]
//   gossip     i=<id>;j=<id>

#include "openmax/engine.hpp"
#include "openmax/metrics.hpp"
#include "openmax/oracle.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace openmax
{
    std::string event_args(const Event &event);

    void write_trace_csv(std::ostream &out, const Trace &trace);
    nlohmann::json trace_to_json(const Trace &trace);

    nlohmann::json verdict_to_json(const Verdict &verdict, std::uint64_t total);

    // Run summary: identity (tool, rng, seed, scenario), convergence report,
    // oracle verdicts, spurious resets (timeout only), and the gossip bounds
    // for the final population.
    nlohmann::json run_summary(const Trace &trace, const OracleMonitor &oracle, const ResetMonitor &resets,
                               double epsilon = 0.05);
}
