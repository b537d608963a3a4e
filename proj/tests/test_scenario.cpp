#include "openmax/scenario.hpp"

#include <doctest.h>

#include <string>

using namespace openmax;

namespace
{
    std::string error_path(const std::string &text)
    {
        try
        {
            parse_scenario(text);
        }
        catch (const ScenarioError &e)
        {
            return e.path();
        }
        return "<no error>";
    }

    const char *kFig1aConfig = R"(
name: fig1a-like
protocol: counter
horizon: 2000
initial:
  count: 25
  range: [0, 1000]
churn:
  kind: scripted
  events:
    - tick: 200
      type: departure
      target: max
)";
}

TEST_CASE("the 25-agent scripted departure config parses")
{
    const Scenario s = parse_scenario(kFig1aConfig);
    CHECK(s.name == "fig1a-like");
    CHECK(s.protocol == Protocol::counter);
    CHECK(s.horizon == 2000);
    CHECK(s.initial.size() == 25);
    CHECK(s.initial.range == ValueRange{0, 1000});
    CHECK_FALSE(s.threshold);
    const auto &sc = std::get<ScriptedChurn>(s.churn);
    REQUIRE(sc.events.size() == 1);
    CHECK(sc.events[0].tick == 200);
    CHECK(std::get<ScriptedDeparture>(sc.events[0].action).target == DepartureTarget::current_max);
    CHECK(s.reference_tick() == 200);
    CHECK(s.snapshot_stride == 1);
}

TEST_CASE("probabilities summing above one are rejected")
{
    const std::string text = R"(
protocol: counter
horizon: 100
initial: {count: 5}
churn: {kind: stochastic, p_arrival: 0.7, p_departure: 0.5}
)";
    CHECK(error_path(text) == "churn");
    CHECK(error_path(R"(
protocol: counter
horizon: 100
initial: {count: 5}
churn: {kind: stochastic, p_arrival: -0.1}
)") == "churn.p_arrival");
}

TEST_CASE("threshold factor rounds up")
{
    const Scenario s = parse_scenario(R"(
protocol: timeout
horizon: 100
initial: {count: 25}
threshold: {factor: 1.1}
)");
    REQUIRE(s.threshold);
    CHECK(s.threshold->base() == 28);
}

TEST_CASE("threshold growth is parsed")
{
    const Scenario s = parse_scenario(R"(
protocol: timeout
horizon: 100
initial: {count: 4}
threshold: {base: 10, growth: {amount: 1, every: 50}}
)");
    CHECK(s.threshold->effective(0) == 10);
    CHECK(s.threshold->effective(120) == 12);
}

TEST_CASE("protocol and threshold must agree")
{
    CHECK(error_path("protocol: timeout\nhorizon: 10\ninitial: {count: 2}\n") == "threshold");
    CHECK(error_path("protocol: counter\nhorizon: 10\ninitial: {count: 2}\nthreshold: {base: 3}\n") == "threshold");
    CHECK(error_path("protocol: timeout\nhorizon: 10\ninitial: {count: 2}\nthreshold: {base: 0}\n") ==
          "threshold.base");
    CHECK(error_path("protocol: timeout\nhorizon: 10\ninitial: {count: 2}\nthreshold: {base: 3}\n"
                     "allow_self_pairs: true\n") == "allow_self_pairs");
}

TEST_CASE("scripted ticks must precede the horizon")
{
    CHECK(error_path(R"(
protocol: counter
horizon: 100
initial: {count: 5}
churn:
  kind: scripted
  events: [{tick: 100, type: arrival}]
)") == "churn.events[0].tick");
    CHECK(error_path(R"(
protocol: counter
horizon: 100
initial: {count: 5}
churn:
  kind: scripted
  events: [{tick: 10, type: arrival}, {tick: 10, type: arrival}]
)") == "churn.events[1].tick");
}

TEST_CASE("malformed and unknown input is reported with a path")
{
    CHECK_THROWS_AS(parse_scenario("protocol: [unclosed"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario("{\"protocol\": "), ScenarioError);
    CHECK(error_path("protocol: counter\nhorizon: 10\ninitial: {count: 2}\ncolour: red\n") == "colour");
    CHECK(error_path("protocol: gossip\nhorizon: 10\ninitial: {count: 2}\n") == "protocol");
    CHECK(error_path("protocol: counter\nhorizon: 0\ninitial: {count: 2}\n") == "horizon");
    CHECK(error_path("protocol: counter\nhorizon: 10\ninitial: {count: 2}\nsnapshot_stride: 0\n") ==
          "snapshot_stride");
    CHECK(error_path("protocol: counter\nhorizon: ten\ninitial: {count: 2}\n") == "horizon");
    CHECK(error_path("protocol: counter\nhorizon: 10\ninitial: {count: 2, range: [5, 1]}\n") == "initial.range");
    CHECK(error_path("protocol: counter\nhorizon: 10\ninitial: {count: 20, range: [0, 5], distinct: true}\n") ==
          "initial.distinct");
    CHECK(error_path("protocol: counter\nhorizon: 10\ninitial: {values: [1, 2], count: 3}\n") == "initial.count");
    CHECK(error_path(R"(
protocol: counter
horizon: 100
initial: {count: 5}
churn: {kind: scripted, events: [{tick: 1, type: departure, target: biggest}]}
)") == "churn.events[0].target");
}

TEST_CASE("JSON documents are accepted")
{
    const Scenario s = parse_scenario(R"({"protocol": "timeout", "horizon": 50,
        "initial": {"values": [3, 1, 2]}, "threshold": {"base": 4},
        "churn": {"kind": "stochastic", "p_arrival": 0.1, "p_departure": 0.2, "stop_tick": 20}})");
    CHECK(s.initial.values == std::vector<Value>{3, 1, 2});
    const auto &st = std::get<StochasticChurn>(s.churn);
    CHECK(st.p_departure == 0.2);
    CHECK(st.stop_tick == std::optional<std::uint64_t>(20));
    CHECK(s.reference_tick() == 20);
}

TEST_CASE("built-in scenarios")
{
    const auto all = reference_scenarios();
    CHECK(all.at("fig1a").protocol == Protocol::counter);
    CHECK(all.at("fig1b").protocol == Protocol::timeout);
    CHECK(all.at("fig1b").threshold->base() == 40);
    CHECK(all.at("fig1c").threshold->base() == 200);
    for (const char *name : {"fig1a", "fig1b", "fig1c"})
    {
        const Scenario &s = all.at(name);
        CHECK(s.initial.size() == 25);
        CHECK(s.reference_tick() == 200);
    }
    for (std::uint64_t n : {10, 20, 30, 50, 100})
    {
        const Scenario &c = all.at("table1-" + std::to_string(n) + "-counter");
        const Scenario &t = all.at("table1-" + std::to_string(n) + "-timeout");
        CHECK(c.initial.size() == n);
        CHECK(t.initial.size() == n);
        CHECK(t.threshold->base() == threshold_from_population(1.1, n));
        CHECK(c.reference_tick() == table1_departure_tick(n));
    }
    CHECK(all.at("table1-50-timeout").threshold->base() == 55);
    CHECK(builtin_scenario("fig1c") == all.at("fig1c"));
    CHECK_THROWS_AS(builtin_scenario("fig2"), std::out_of_range);
    for (const auto &[name, s] : all)
    {
        CHECK_NOTHROW(validate(s));
    }
}

TEST_CASE("fig1 population carries the published extremes")
{
    const auto &v = fig1_population();
    REQUIRE(v.size() == 25);
    CHECK(v[9] == 936);
    CHECK(v[13] == 815);
    for (std::size_t k = 0; k < v.size(); ++k)
    {
        CHECK(v[k] >= 0);
        CHECK(v[k] <= 1000);
        if (k != 9 && k != 13)
        {
            CHECK(v[k] < 815);
        }
    }
}

TEST_CASE("serialisation round trips")
{
    std::vector<Scenario> cases;
    for (const auto &[name, s] : reference_scenarios())
    {
        cases.push_back(s);
    }
    cases.push_back(parse_scenario(R"(
name: mixed
protocol: timeout
horizon: 900
snapshot_stride: 3
initial: {count: 7, range: [-20, 40], distinct: false}
threshold: {base: 9, growth: {amount: 2, every: 7}}
churn: {kind: stochastic, p_arrival: 0.125, p_departure: 0.03, stop_tick: 500, range: [-5, 5]}
)"));
    cases.push_back(parse_scenario(R"(
protocol: counter
allow_self_pairs: true
horizon: 50
initial: {values: [-1, 0, 1]}
churn:
  kind: scripted
  arrival_range: [10, 20]
  events:
    - {tick: 1, type: arrival, x: -8}
    - {tick: 2, type: arrival}
    - {tick: 3, type: departure, target: 1}
    - {tick: 4, type: departure, target: random}
)"));
    for (const Scenario &s : cases)
    {
        CAPTURE(s.name);
        const std::string yaml = to_yaml_text(s);
        const std::string json = to_json_text(s);
        CHECK(parse_scenario(yaml) == s);
        CHECK(parse_scenario(json) == s);
        CHECK(to_yaml_text(parse_scenario(yaml)) == yaml);
        CHECK(to_json_text(parse_scenario(json)) == json);
    }
}
