#pragma once

// Trace analytics: convergence detection, threshold-reset classification
// and the closed-form convergence-time bounds of pairwise max-gossip.

#include "openmax/engine.hpp"
#include "openmax/tick_metrics.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace openmax
{
    // Raised when an analysis does not apply to the trace's protocol.
    class NotApplicable : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    struct ConvergenceReport
    {
        std::uint64_t reference_tick = 0;
        // settle_tick: least t >= reference_tick such that every tick in
        // [t, horizon] is all-correct. Requires a completed trace.
        bool converged = false;
        std::optional<std::uint64_t> settle_tick;
        std::optional<std::uint64_t> steps_from_event; // settle_tick - reference_tick
        // First all-correct tick strictly after the reference tick, whether
        // or not the agreement lasts.
        std::optional<std::uint64_t> first_correct_tick;
        std::optional<std::uint64_t> first_steps;
    };

    ConvergenceReport convergence_time(const Trace &trace, std::uint64_t reference_tick);

    struct ThresholdReset
    {
        std::uint64_t tick; // tick of the gossip that triggered it
        AgentId agent;
        Value discarded;    // the estimate before the reset
        bool spurious;      // discarded value was still some present agent's x
    };

    // Threshold resets fired by applying `event` to `before` (timeout protocol).
    std::vector<ThresholdReset> threshold_resets(const World &before, const Event &event);

    // Spurious resets of a timeout trace; needs a snapshot at every tick.
    // Throws NotApplicable for counter traces and std::invalid_argument
    // when snapshots are strided.
    std::vector<ThresholdReset> spurious_resets(const Trace &trace);

    // Streaming equivalent of spurious_resets for long sweeps.
    class ResetMonitor final : public TickObserver
    {
    public:
        void on_tick(const World &before, const Event &event, const World &after) override;

        const std::vector<ThresholdReset> &resets() const noexcept { return m_resets; }
        std::uint64_t spurious_count() const noexcept;
        std::uint64_t spurious_count_after(std::uint64_t tick) const noexcept;

    private:
        std::vector<ThresholdReset> m_resets;
    };

    // h_n = sum_{k=1..n} 1/k. Throws std::invalid_argument for n == 0.
    double harmonic(std::uint64_t n);

    // phases * (n_bar - 1) * h_{n_bar - 1}: bound on the expected gossip
    // convergence time after churn stops. One phase covers a single
    // max-gossip spread; two phases cover counters and estimates in turn.
    double expected_convergence_bound(std::uint64_t n_bar, int phases);

    // High-probability version: the bound holds with probability 1 - epsilon.
    //   phases * (n-1) h_{n-1} * (1 + L (1 + sqrt(1 + 1/L))),  L = ln(n / epsilon)
    // Throws std::invalid_argument unless 0 < epsilon < 1, and
    // std::domain_error when L <= 0.
    double high_prob_bound(std::uint64_t n_bar, double epsilon, int phases);

    // Per-tick CSV: tick,MAX,num_correct,K,min_y,max_y (empty cells for
    // undefined quantities).
    void write_metrics_csv(std::ostream &out, const Trace &trace);
}
