#pragma once

// Seed sweeps over scenarios and the two-protocol scaling comparison.

#include "openmax/engine.hpp"
#include "openmax/metrics.hpp"
#include "openmax/oracle.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace openmax
{
    // Inclusive range of seeds. Parsed from "A..B" or a single "A".
    struct SeedRange
    {
        std::uint64_t first = 0;
        std::uint64_t last = 0;

        std::uint64_t size() const noexcept { return last - first + 1; }
        static SeedRange parse(const std::string &text); // std::invalid_argument on bad input
    };

    struct SampleStats
    {
        std::size_t count = 0;
        double mean = 0.0;
        double median = 0.0;
        double stddev = 0.0; // sample standard deviation
        double min = 0.0;
        double max = 0.0;

        double standard_error() const noexcept;
    };

    // Empty input yields count == 0 and zeros elsewhere.
    SampleStats summarize(std::vector<double> values);

    struct RunOutcome
    {
        std::uint64_t seed = 0;
        RunStatus status = RunStatus::completed;
        ConvergenceReport convergence;
        bool oracle_passed = true;
        std::uint64_t oracle_violations = 0;
        std::uint64_t oracle_ticks = 0;
        std::uint64_t threshold_resets = 0;
        std::uint64_t spurious_resets = 0;
        // Spurious resets from the first post-reference agreement on, and the
        // number of ticks in that window.
        std::uint64_t spurious_after_agreement = 0;
        std::uint64_t ticks_after_agreement = 0;
        std::optional<OutdatedReport> outdated;
    };

    struct OutcomeOptions
    {
        bool track_outdated = false;
    };

    // Runs one seed with every tick checked by the oracle, without storing
    // snapshots.
    RunOutcome run_outcome(const Scenario &scenario, std::uint64_t seed, const OutcomeOptions &options = {});

    std::vector<RunOutcome> sweep(const Scenario &scenario, SeedRange seeds, const OutcomeOptions &options = {});

    struct ProtocolColumn
    {
        SampleStats steps;            // first all-correct tick after the departure, minus its tick
        std::size_t not_converged = 0;
        std::uint64_t oracle_violations = 0;
    };

    struct CompareRow
    {
        std::uint64_t n = 0;
        std::uint64_t t_star = 0;
        ProtocolColumn counter;
        ProtocolColumn timeout;
        std::optional<std::uint64_t> published_counter;
        std::optional<std::uint64_t> published_timeout;
        double expected_bound = 0.0;  // two-phase, n - 1 agents; 0 when n < 3
        double high_prob_bound = 0.0; // two-phase, n - 1 agents, epsilon 0.05

        double median_ratio() const noexcept; // timeout / counter
    };

    // Single-run iteration counts published for the scaling comparison.
    std::optional<std::pair<std::uint64_t, std::uint64_t>> published_table1(std::uint64_t n);

    // Requires every size >= 2 (std::invalid_argument otherwise).
    std::vector<CompareRow> compare(const std::vector<std::uint64_t> &sizes, SeedRange seeds);

    void write_compare_table(std::ostream &out, const std::vector<CompareRow> &rows);
    void write_compare_csv(std::ostream &out, const std::vector<CompareRow> &rows);
    nlohmann::json compare_to_json(const std::vector<CompareRow> &rows, SeedRange seeds);
}
