#pragma once

// Invariant checkers evaluated from their definitions over world snapshots.
// None of this code calls the protocol transitions, so a bug there cannot
// certify itself.

#include "openmax/engine.hpp"
#include "openmax/world.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace openmax
{
    struct Violation
    {
        std::uint64_t tick;
        AgentId agent;
        Value x;
        Value y;
        std::uint64_t aux;
        std::string detail;
    };

    struct Verdict
    {
        std::string check;
        bool applicable = true;
        std::vector<Violation> violations;

        bool passed() const noexcept { return applicable && violations.empty(); }
    };

    // Every agent whose kappa equals K(t) = max kappa holds an estimate equal
    // to the x of some present agent whose kappa is also K(t).
    // Not applicable to timeout worlds.
    Verdict check_lemma1(const World &world);

    // y >= x for every present agent.
    Verdict check_lower_bound(const World &world);

    // Every estimate equals the x of a present or a departed agent.
    Verdict check_provenance(const World &world);

    // Timeout protocol: age <= effective T*, and age == 0 whenever y == x.
    Verdict check_age_bounds(const World &world);

    // Runs every applicable check on each observed world, plus per-agent
    // kappa monotonicity across transitions. Keeps the first `max_kept`
    // violations of each check and counts all of them.
    class OracleMonitor final : public TickObserver
    {
    public:
        explicit OracleMonitor(std::size_t max_kept = 64) : m_max_kept(max_kept) {}

        void on_start(const World &world) override;
        void on_tick(const World &before, const Event &event, const World &after) override;

        std::uint64_t ticks_checked() const noexcept { return m_ticks; }
        std::uint64_t violation_count() const noexcept { return m_total; }
        bool passed() const noexcept { return m_total == 0; }

        // Keyed by check name; only applicable checks appear.
        const std::map<std::string, Verdict> &verdicts() const noexcept { return m_verdicts; }
        const std::map<std::string, std::uint64_t> &counts() const noexcept { return m_counts; }

    private:
        void absorb(Verdict v);
        void check(const World &world);

        std::size_t m_max_kept;
        std::uint64_t m_ticks = 0;
        std::uint64_t m_total = 0;
        std::map<std::string, Verdict> m_verdicts;
        std::map<std::string, std::uint64_t> m_counts;
    };

    struct OutdatedSample
    {
        std::uint64_t tick;
        std::uint64_t holders;            // |D(t)|
        std::optional<std::uint64_t> tau; // min age in D(t); timeout only
    };

    // One stretch of time during which a departed value z matches no present
    // agent's x.
    struct OutdatedEpisode
    {
        Value z;
        std::uint64_t start_tick;
        std::optional<std::uint64_t> extinct_tick; // first tick with D(t) empty
        std::optional<std::uint64_t> superseded_tick; // an arrival brought z back
        std::uint64_t max_holders = 0;
        std::optional<std::uint64_t> max_tau;
        bool tau_monotone = true; // tau never decreased while D(t) was non-empty
        bool tau_bounded = true;  // tau <= effective T* whenever D(t) was non-empty
        std::vector<OutdatedSample> samples; // only when series recording is on
    };

    struct OutdatedReport
    {
        std::vector<OutdatedEpisode> episodes;

        bool all_extinct() const noexcept;
        bool tau_ok() const noexcept; // monotone and bounded everywhere
        const OutdatedEpisode *find(Value z) const noexcept; // latest episode for z
    };

    // Tracks D(t) and tau(t) for every outdated value. Must observe every tick.
    class OutdatedTracker final : public TickObserver
    {
    public:
        explicit OutdatedTracker(bool record_series = false) : m_record(record_series) {}

        void on_start(const World &world) override { observe(world); }
        void on_tick(const World &, const Event &, const World &after) override { observe(after); }

        void observe(const World &world);
        const OutdatedReport &report() const noexcept { return m_report; }

    private:
        struct Active
        {
            std::size_t episode;
            std::optional<std::uint64_t> last_tau;
        };

        bool m_record;
        std::size_t m_departed_seen = 0;
        std::map<Value, std::optional<Active>> m_known; // departed values
        OutdatedReport m_report;
    };

    // Requires a snapshot at every tick (std::invalid_argument otherwise).
    OutdatedReport track_outdated(const Trace &trace, bool record_series = false);
}
