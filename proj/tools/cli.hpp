#pragma once

// Command-line frontend. Split from main() so tests can drive it in-process.

#include "openmax/scenario.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace openmax::cli
{
    // Exit codes.
    inline constexpr int kOk = 0;
    inline constexpr int kOracleFailure = 1;
    inline constexpr int kUsage = 2;

    // args excludes the program name.
    int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

    // A built-in name or a path to a YAML/JSON file. Throws ScenarioError.
    Scenario resolve_scenario(const std::string &name_or_path);

    struct Overrides
    {
        std::optional<Protocol> algorithm;
        std::optional<std::uint64_t> horizon;
        std::optional<std::uint64_t> threshold;
        std::optional<std::string> threshold_growth; // "AMOUNT/EVERY", a rate per tick
        std::optional<std::uint64_t> stride;
    };

    // Applies command-line overrides and re-validates. Throws ScenarioError.
    Scenario apply_overrides(Scenario scenario, const Overrides &overrides);
}
