#pragma once

// Declarative run descriptions: initial population, churn model, protocol
// parameters and horizon. See docs/scenario-schema.md for the config grammar.

#include "openmax/protocol.hpp"
#include "openmax/world.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace openmax
{
    struct ValueRange
    {
        Value lo = 0;
        Value hi = 1000;
        friend bool operator==(const ValueRange &, const ValueRange &) = default;
    };

    struct InitialPopulation
    {
        // Explicit values take precedence; otherwise `count` values are drawn
        // from `range` with the run's generator.
        std::optional<std::vector<Value>> values;
        std::uint64_t count = 0;
        ValueRange range{};
        bool distinct = false;

        std::uint64_t size() const noexcept { return values ? values->size() : count; }
        friend bool operator==(const InitialPopulation &, const InitialPopulation &) = default;
    };

    enum class DepartureTarget
    {
        agent,       // a specific id
        current_max, // holder of the largest x at event time (lowest id on ties)
        random       // uniform over present agents
    };

    struct ScriptedArrival
    {
        std::optional<Value> x; // absent: drawn from ScriptedChurn::arrival_range
        friend bool operator==(const ScriptedArrival &, const ScriptedArrival &) = default;
    };

    struct ScriptedDeparture
    {
        DepartureTarget target = DepartureTarget::current_max;
        AgentId id{0};
        friend bool operator==(const ScriptedDeparture &, const ScriptedDeparture &) = default;
    };

    struct ScriptedEvent
    {
        std::uint64_t tick;
        std::variant<ScriptedArrival, ScriptedDeparture> action;
        friend bool operator==(const ScriptedEvent &, const ScriptedEvent &) = default;
    };

    // Listed events fire at their ticks; every other tick is a gossip.
    struct ScriptedChurn
    {
        std::vector<ScriptedEvent> events; // sorted by tick, at most one per tick
        ValueRange arrival_range{};
        friend bool operator==(const ScriptedChurn &, const ScriptedChurn &) = default;
    };

    // Before stop_tick each tick is an arrival with probability p_arrival, a
    // departure with probability p_departure, and a gossip otherwise. From
    // stop_tick on, only gossip.
    struct StochasticChurn
    {
        double p_arrival = 0.01;
        double p_departure = 0.01;
        std::optional<std::uint64_t> stop_tick;
        ValueRange range{};
        friend bool operator==(const StochasticChurn &, const StochasticChurn &) = default;
    };

    using ChurnModel = std::variant<ScriptedChurn, StochasticChurn>;

    struct Scenario
    {
        std::string name = "custom";
        Protocol protocol = Protocol::counter;
        InitialPopulation initial{};
        ChurnModel churn = ScriptedChurn{};
        std::optional<Threshold> threshold;
        std::uint64_t horizon = 1000;
        std::uint64_t snapshot_stride = 1;
        // Counter protocol only: draw gossip pairs as ordered pairs with
        // replacement, so an agent may be paired with itself.
        bool allow_self_pairs = false;

        // Tick of the event convergence is measured from: first scripted
        // departure, else the stochastic stop tick, else 0.
        std::uint64_t reference_tick() const;

        friend bool operator==(const Scenario &, const Scenario &) = default;
    };

    // Validation or parse failure; `path` names the offending field
    // (e.g. "churn.events[0].tick").
    class ScenarioError : public std::runtime_error
    {
    public:
        ScenarioError(std::string path, const std::string &message)
            : std::runtime_error(path.empty() ? message : path + ": " + message), m_path(std::move(path))
        {
        }

        const std::string &path() const noexcept { return m_path; }

    private:
        std::string m_path;
    };

    // Accepts the YAML grammar or its JSON equivalent (detected by a leading
    // '{'). Throws ScenarioError.
    Scenario parse_scenario(std::string_view text);

    // Throws ScenarioError on the first violated invariant.
    void validate(const Scenario &scenario);

    std::string to_json_text(const Scenario &scenario);
    std::string to_yaml_text(const Scenario &scenario);

    // Built-in scenarios reproducing the published experiments:
    // fig1a, fig1b, fig1c and table1-<N>-{counter,timeout}.
    std::map<std::string, Scenario> reference_scenarios();

    // Throws std::out_of_range for unknown names.
    Scenario builtin_scenario(const std::string &name);

    // Zero churn, then the max holder departs once the population has had
    // time to agree. Timeout variants use T* = ceil(1.1 * n).
    Scenario table1_scenario(std::uint64_t n, Protocol protocol);

    // Tick of the scripted departure in table1_scenario(n, ...).
    std::uint64_t table1_departure_tick(std::uint64_t n);

    // The fixed 25-agent population of the fig1 scenarios: the two largest
    // values are 936 (agent 9) and 815 (agent 13).
    const std::vector<Value> &fig1_population();
}
