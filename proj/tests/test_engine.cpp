#include "openmax/engine.hpp"
#include "openmax/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

using namespace openmax;

namespace
{
    Scenario static_scenario(std::uint64_t n, Protocol protocol, std::uint64_t horizon = 500)
    {
        Scenario s;
        s.name = "static";
        s.protocol = protocol;
        s.initial.count = n;
        s.initial.distinct = true;
        s.churn = ScriptedChurn{};
        s.horizon = horizon;
        if (protocol == Protocol::timeout)
        {
            s.threshold = Threshold::fixed(threshold_from_population(1.1, n));
        }
        return s;
    }

    World world_of(Protocol protocol, std::initializer_list<Value> xs, std::optional<Threshold> t = std::nullopt)
    {
        World w(protocol, t);
        for (Value x : xs)
        {
            w.add_initial(x);
        }
        return w;
    }

    // Chi-squared quantile via the Wilson-Hilferty approximation.
    double chi2_quantile(double dof, double z)
    {
        const double a = 2.0 / (9.0 * dof);
        return dof * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
    }

    constexpr double kZ999 = 3.090232; // standard normal 0.999 quantile
}

TEST_CASE("departure of the max holder in the 25-agent population")
{
    World w(Protocol::counter, std::nullopt);
    for (Value x : fig1_population())
    {
        w.add_initial(x);
    }
    REQUIRE(w.size() == 25);
    REQUIRE(w.find(AgentId{9})->x == 936);
    const World next = apply_event(w, Departure{AgentId{9}, AgentId{13}});
    CHECK(next.size() == 24);
    CHECK(next.find(AgentId{9}) == nullptr);
    REQUIRE(next.departed_values().size() == 1);
    CHECK(next.departed_values()[0] == 936);
    CHECK(next.tick() == 1);
    // The informed agent resets to its own value at a higher level.
    CHECK(next.find(AgentId{13})->y == 815);
    CHECK(next.find(AgentId{13})->aux == 1);
}

TEST_CASE("first arrival into an empty world")
{
    for (Protocol p : {Protocol::counter, Protocol::timeout})
    {
        std::optional<Threshold> t;
        if (p == Protocol::timeout)
        {
            t = Threshold::fixed(5);
        }
        const World w = apply_event(World(p, t), Arrival{7});
        REQUIRE(w.size() == 1);
        CHECK(w.agents()[0] == Agent{AgentId{0}, 7, 7, 0});
        CHECK(w.tick() == 1);
    }
}

TEST_CASE("last counter agent leaves without a message")
{
    const World w = world_of(Protocol::counter, {3});
    const World next = apply_event(w, Departure{AgentId{0}, std::nullopt});
    CHECK(next.empty());
    CHECK(next.departed_values().size() == 1);
}

TEST_CASE("structurally invalid events are rejected with their tick")
{
    const World c = world_of(Protocol::counter, {1, 2, 3});
    const World t = world_of(Protocol::timeout, {1, 2, 3}, Threshold::fixed(4));
    CHECK_THROWS_AS(apply_event(c, Gossip{AgentId{0}, AgentId{7}}), StructuralError);
    CHECK_THROWS_AS(apply_event(c, Departure{AgentId{5}, AgentId{0}}), StructuralError);
    CHECK_THROWS_AS(apply_event(c, Departure{AgentId{1}, std::nullopt}), StructuralError);
    CHECK_THROWS_AS(apply_event(c, Departure{AgentId{1}, AgentId{1}}), StructuralError);
    CHECK_THROWS_AS(apply_event(t, Departure{AgentId{1}, AgentId{0}}), StructuralError);
    try
    {
        apply_event(apply_event(c, Gossip{AgentId{0}, AgentId{1}}), Gossip{AgentId{0}, AgentId{9}});
        FAIL("expected a structural error");
    }
    catch (const StructuralError &e)
    {
        CHECK(e.tick() == 1);
    }
}

TEST_CASE("ids are never reused")
{
    World w = world_of(Protocol::counter, {1, 2});
    w = apply_event(w, Departure{AgentId{1}, AgentId{0}});
    w = apply_event(w, Arrival{5});
    CHECK(w.agents()[1].id == AgentId{2});
}

TEST_CASE("gossip pairs are uniform over the 300 unordered pairs of 25 agents")
{
    const Scenario s = static_scenario(25, Protocol::counter);
    Rng rng(2024);
    const World w = initial_world(s, rng);
    std::map<std::pair<std::uint64_t, std::uint64_t>, int> counts;
    const int draws = 150000;
    for (int k = 0; k < draws; ++k)
    {
        const auto ev = sample_event(w, s, rng);
        REQUIRE(ev);
        const auto &g = std::get<Gossip>(*ev);
        REQUIRE(g.i != g.j);
        counts[{std::min(g.i.value, g.j.value), std::max(g.i.value, g.j.value)}]++;
    }
    REQUIRE(counts.size() == 300);
    const double expected = draws / 300.0;
    double chi2 = 0.0;
    for (const auto &[pair, c] : counts)
    {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    CHECK(chi2 < chi2_quantile(299, kZ999));
}

TEST_CASE("self pairs are drawn with replacement when enabled")
{
    Scenario s = static_scenario(5, Protocol::counter);
    s.allow_self_pairs = true;
    Rng rng(9);
    const World w = initial_world(s, rng);
    std::map<std::pair<std::uint64_t, std::uint64_t>, int> counts;
    const int draws = 50000;
    for (int k = 0; k < draws; ++k)
    {
        const auto &g = std::get<Gossip>(*sample_event(w, s, rng));
        counts[{g.i.value, g.j.value}]++;
    }
    REQUIRE(counts.size() == 25);
    double chi2 = 0.0;
    for (const auto &[pair, c] : counts)
    {
        chi2 += (c - draws / 25.0) * (c - draws / 25.0) / (draws / 25.0);
    }
    CHECK(chi2 < chi2_quantile(24, kZ999));
}

TEST_CASE("leaver and informed agent are uniform")
{
    Scenario s = static_scenario(6, Protocol::counter);
    StochasticChurn st;
    st.p_arrival = 0.0;
    st.p_departure = 1.0;
    s.churn = st;
    Rng rng(77);
    const World w = initial_world(s, rng);
    std::map<std::pair<std::uint64_t, std::uint64_t>, int> counts;
    const int draws = 60000;
    for (int k = 0; k < draws; ++k)
    {
        const auto &d = std::get<Departure>(*sample_event(w, s, rng));
        REQUIRE(d.informed);
        REQUIRE(*d.informed != d.leaver);
        counts[{d.leaver.value, d.informed->value}]++;
    }
    REQUIRE(counts.size() == 30);
    double chi2 = 0.0;
    for (const auto &[pair, c] : counts)
    {
        chi2 += (c - draws / 30.0) * (c - draws / 30.0) / (draws / 30.0);
    }
    CHECK(chi2 < chi2_quantile(29, kZ999));
}

TEST_CASE("scripted departure targets the current max holder")
{
    const Scenario s = builtin_scenario("fig1a");
    const Trace t = run(s, 3);
    REQUIRE(t.events.size() == 2000);
    for (const auto &te : t.events)
    {
        if (te.tick == 200)
        {
            const auto &d = std::get<Departure>(te.event);
            CHECK(d.leaver == AgentId{9});
            REQUIRE(d.informed);
        }
        else
        {
            CHECK(std::holds_alternative<Gossip>(te.event));
        }
    }
}

TEST_CASE("max holder ties resolve to the lowest id")
{
    Scenario s;
    s.initial.values = std::vector<Value>{4, 9, 2, 9};
    ScriptedChurn sc;
    sc.events.push_back({0, ScriptedDeparture{DepartureTarget::current_max, {}}});
    s.churn = sc;
    s.horizon = 1;
    const Trace t = run(s, 1);
    CHECK(std::get<Departure>(t.events[0].event).leaver == AgentId{1});
}

TEST_CASE("scripted events fire exactly at their ticks")
{
    Scenario s = static_scenario(4, Protocol::timeout, 50);
    ScriptedChurn sc;
    sc.events.push_back({3, ScriptedArrival{Value{500}}});
    sc.events.push_back({10, ScriptedDeparture{DepartureTarget::agent, AgentId{4}}});
    sc.events.push_back({20, ScriptedArrival{}});
    sc.events.push_back({30, ScriptedDeparture{DepartureTarget::random, {}}});
    s.churn = sc;
    const Trace t = run(s, 5);
    REQUIRE(t.status == RunStatus::completed);
    for (const auto &te : t.events)
    {
        switch (te.tick)
        {
        case 3:
            CHECK(std::get<Arrival>(te.event).x == 500);
            break;
        case 10:
            CHECK(std::get<Departure>(te.event).leaver == AgentId{4});
            CHECK_FALSE(std::get<Departure>(te.event).informed);
            break;
        case 20:
            CHECK(std::holds_alternative<Arrival>(te.event));
            break;
        case 30:
            CHECK(std::holds_alternative<Departure>(te.event));
            break;
        default:
            CHECK(std::holds_alternative<Gossip>(te.event));
        }
    }
}

TEST_CASE("one event per tick and population changes by at most one")
{
    Scenario s = static_scenario(10, Protocol::counter, 3000);
    StochasticChurn st;
    st.p_arrival = 0.05;
    st.p_departure = 0.05;
    st.stop_tick = 2000;
    s.churn = st;
    const Trace t = run(s, 8);
    REQUIRE(t.status == RunStatus::completed);
    REQUIRE(t.events.size() == 3000);
    REQUIRE(t.metrics.size() == 3001);
    REQUIRE(t.snapshots.size() == 3001);
    for (std::size_t k = 0; k < t.events.size(); ++k)
    {
        CHECK(t.events[k].tick == k);
        const auto a = t.metrics[k].population;
        const auto b = t.metrics[k + 1].population;
        CHECK((a > b ? a - b : b - a) <= 1);
        if (k >= 2000)
        {
            CHECK(std::holds_alternative<Gossip>(t.events[k].event));
        }
    }
}

TEST_CASE("zero churn: estimate range shrinks and stays above the minimum value")
{
    for (Protocol p : {Protocol::counter, Protocol::timeout})
    {
        const Trace t = run(static_scenario(12, p, 400), 4);
        Value min_x = t.snapshots[0].agents()[0].x;
        for (const Agent &a : t.snapshots[0].agents())
        {
            min_x = std::min(min_x, a.x);
        }
        for (std::size_t k = 1; k < t.metrics.size(); ++k)
        {
            CHECK(*t.metrics[k].max_y <= *t.metrics[k - 1].max_y);
            CHECK(*t.metrics[k].min_y >= min_x);
        }
        if (p == Protocol::counter)
        {
            // Levels form a singleton set from the start and never move.
            for (const auto &m : t.metrics)
            {
                CHECK(*m.max_kappa == 0);
            }
        }
    }
}

TEST_CASE("single agent keeps its own value")
{
    for (Protocol p : {Protocol::counter, Protocol::timeout})
    {
        const Trace t = run(static_scenario(1, p, 100), 1);
        REQUIRE(t.events.size() == 100);
        for (const auto &te : t.events)
        {
            const auto &g = std::get<Gossip>(te.event);
            CHECK(g.i == g.j);
        }
        for (const World &w : t.snapshots)
        {
            CHECK(w.agents()[0].y == w.agents()[0].x);
            CHECK(w.agents()[0].aux == 0);
        }
        CHECK(convergence_time(t, 0).settle_tick == std::optional<std::uint64_t>(0));
    }
}

TEST_CASE("a lone timeout agent ages out a stale estimate")
{
    World w = world_of(Protocol::timeout, {1, 9}, Threshold::fixed(3));
    w = apply_event(w, Gossip{AgentId{0}, AgentId{1}});
    w = apply_event(w, Departure{AgentId{1}, std::nullopt});
    REQUIRE(w.agents()[0].y == 9);
    int ticks = 0;
    while (w.agents()[0].y != 1)
    {
        w = apply_event(w, Gossip{AgentId{0}, AgentId{0}});
        REQUIRE(++ticks <= 4);
    }
    CHECK(w.agents()[0].aux == 0);
}

TEST_CASE("counter self-gossip changes nothing")
{
    World w = world_of(Protocol::counter, {1, 9});
    w = apply_event(w, Gossip{AgentId{0}, AgentId{1}});
    const World next = apply_event(w, Gossip{AgentId{0}, AgentId{0}});
    CHECK(next.agents()[0] == w.agents()[0]);
    CHECK(next.agents()[1] == w.agents()[1]);
}

TEST_CASE("runs drain when every agent has left")
{
    Scenario s = static_scenario(3, Protocol::counter, 100);
    StochasticChurn st;
    st.p_arrival = 0.0;
    st.p_departure = 1.0;
    s.churn = st;
    const Trace t = run(s, 1);
    CHECK(t.status == RunStatus::drained);
    CHECK(t.final_tick() == 3);
    CHECK(t.metrics.back().population == 0);
}

TEST_CASE("scripted departure of an absent agent is a structural error")
{
    Scenario s = static_scenario(3, Protocol::counter, 100);
    ScriptedChurn sc;
    sc.events.push_back({5, ScriptedDeparture{DepartureTarget::agent, AgentId{1}}});
    sc.events.push_back({6, ScriptedDeparture{DepartureTarget::agent, AgentId{1}}});
    s.churn = sc;
    const Trace t = run(s, 1);
    CHECK(t.status == RunStatus::structural_error);
    CHECK(t.error_tick == std::optional<std::uint64_t>(6));
    CHECK(t.final_tick() == 6);
}

TEST_CASE("replay is deterministic")
{
    for (const char *name : {"fig1a", "fig1b"})
    {
        const Scenario s = builtin_scenario(name);
        CHECK(run(s, 11) == run(s, 11));
        CHECK_FALSE(run(s, 11).events == run(s, 12).events);
    }
}

TEST_CASE("distinct initial values are distinct")
{
    Scenario s = static_scenario(50, Protocol::counter);
    s.initial.range = {0, 60};
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        Rng rng(seed);
        const World w = initial_world(s, rng);
        std::set<Value> xs;
        for (const Agent &a : w.agents())
        {
            REQUIRE(a.x >= 0);
            REQUIRE(a.x <= 60);
            xs.insert(a.x);
        }
        CHECK(xs.size() == 50);
    }
}

TEST_CASE("snapshot stride keeps first, strided and final worlds")
{
    Scenario s = static_scenario(5, Protocol::counter, 25);
    RunOptions o;
    o.snapshot_stride = 10;
    const Trace t = run(s, 1, o);
    REQUIRE(t.snapshots.size() == 4);
    CHECK(t.snapshots[0].tick() == 0);
    CHECK(t.snapshots[1].tick() == 10);
    CHECK(t.snapshots[2].tick() == 20);
    CHECK(t.snapshots[3].tick() == 25);
    CHECK_FALSE(t.has_full_snapshots());
    CHECK(t.metrics.size() == 26);
}
