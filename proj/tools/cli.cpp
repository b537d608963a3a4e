#include "cli.hpp"

#include "openmax/engine.hpp"
#include "openmax/experiments.hpp"
#include "openmax/metrics.hpp"
#include "openmax/oracle.hpp"
#include "openmax/trace_io.hpp"
#include "openmax/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fs = std::filesystem;

namespace openmax::cli
{
    namespace
    {
        // Thrown for bad flag combinations detected after parsing.
        struct UsageError : std::runtime_error
        {
            using std::runtime_error::runtime_error;
        };

        std::string read_file(const fs::path &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
            {
                throw ScenarioError("", "cannot read '" + path.string() + "'");
            }
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }

        void write_file(const fs::path &path, const std::string &content)
        {
            std::ofstream out(path, std::ios::binary);
            out << content;
            if (!out)
            {
                throw std::runtime_error("cannot write '" + path.string() + "'");
            }
        }

        std::uint64_t parse_positive(std::string_view text, const std::string &what)
        {
            std::uint64_t v = 0;
            auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (text.empty() || ec != std::errc{} || end != text.data() + text.size() || v == 0)
            {
                throw UsageError(what + " must be a positive integer, got '" + std::string(text) + "'");
            }
            return v;
        }

        struct RunFlags
        {
            std::string scenario;
            std::optional<std::string> algorithm;
            std::optional<std::uint64_t> seed;
            std::optional<std::string> seeds;
            std::optional<std::uint64_t> horizon;
            std::optional<std::uint64_t> threshold;
            std::optional<std::string> threshold_growth;
            std::optional<std::uint64_t> stride;
            std::string out_dir = "out";
            std::string format = "csv";
        };

        struct CompareFlags
        {
            std::vector<std::uint64_t> sizes{10, 20, 30, 50, 100};
            std::string seeds = "1..20";
            std::optional<std::string> out_dir;
            std::string format = "table";
        };

        struct BoundsFlags
        {
            std::uint64_t n_bar = 0;
            double epsilon = 0.05;
        };

        struct ValidateFlags
        {
            std::string scenario;
            bool normalize = false;
        };

        std::string describe(const ConvergenceReport &c)
        {
            std::ostringstream s;
            if (c.first_steps)
            {
                s << "agreed " << *c.first_steps << " ticks after tick " << c.reference_tick;
            }
            else
            {
                s << "no agreement after tick " << c.reference_tick;
            }
            if (c.steps_from_event)
            {
                s << ", settled after " << *c.steps_from_event;
            }
            else
            {
                s << ", not settled";
            }
            return s.str();
        }

        nlohmann::json counterexample(const Trace &trace, const OracleMonitor &oracle)
        {
            nlohmann::json c;
            c["scenario"] = trace.scenario.name;
            c["scenario_config"] = nlohmann::json::parse(to_json_text(trace.scenario));
            c["seed"] = trace.seed;
            nlohmann::json checks = nlohmann::json::object();
            for (const auto &[name, verdict] : oracle.verdicts())
            {
                const auto total = oracle.counts().at(name);
                if (total > 0)
                {
                    checks[name] = verdict_to_json(verdict, total);
                }
            }
            c["failed_checks"] = std::move(checks);
            return c;
        }

        // Returns true when the oracle passed.
        bool run_one(const Scenario &scenario, std::uint64_t seed, const fs::path &dir, const std::string &format,
                     std::ostream &out, std::ostream &err)
        {
            OracleMonitor oracle;
            ResetMonitor resets;
            std::vector<TickObserver *> observers{&oracle, &resets};
            RunOptions options;
            options.observers = observers;
            const Trace trace = run(scenario, seed, options);

            fs::create_directories(dir);
            if (format == "json")
            {
                write_file(dir / "trace.json", trace_to_json(trace).dump() + "\n");
            }
            else
            {
                std::ostringstream csv;
                write_trace_csv(csv, trace);
                write_file(dir / "trace.csv", csv.str());
            }
            std::ostringstream metrics;
            write_metrics_csv(metrics, trace);
            write_file(dir / "metrics.csv", metrics.str());
            write_file(dir / "summary.json", run_summary(trace, oracle, resets).dump(2) + "\n");

            const auto conv = convergence_time(trace, scenario.reference_tick());
            out << "seed " << seed << ": " << to_string(trace.status) << " at tick " << trace.final_tick() << ", "
                << describe(conv);
            if (scenario.protocol == Protocol::timeout)
            {
                out << ", spurious resets " << resets.spurious_count();
            }
            out << ", oracle " << (oracle.passed() ? "passed" : "FAILED") << '\n';
            if (trace.status == RunStatus::structural_error)
            {
                err << "seed " << seed << ": " << trace.status_detail << '\n';
            }
            if (!oracle.passed())
            {
                const fs::path path = dir / "counterexample.json";
                write_file(path, counterexample(trace, oracle).dump(2) + "\n");
                err << "seed " << seed << ": oracle violation, see " << path.string() << '\n';
                return false;
            }
            return true;
        }

        int cmd_run(const RunFlags &f, std::ostream &out, std::ostream &err)
        {
            Overrides o;
            if (f.algorithm)
            {
                o.algorithm = *f.algorithm == "timeout" ? Protocol::timeout : Protocol::counter;
            }
            o.horizon = f.horizon;
            o.threshold = f.threshold;
            o.threshold_growth = f.threshold_growth;
            o.stride = f.stride;
            const Scenario scenario = apply_overrides(resolve_scenario(f.scenario), o);

            SeedRange seeds{1, 1};
            if (f.seed)
            {
                seeds = SeedRange{*f.seed, *f.seed};
            }
            else if (f.seeds)
            {
                try
                {
                    seeds = SeedRange::parse(*f.seeds);
                }
                catch (const std::invalid_argument &e)
                {
                    throw UsageError(e.what());
                }
            }

            const bool many = seeds.size() > 1;
            bool passed = true;
            for (std::uint64_t seed = seeds.first;; ++seed)
            {
                const fs::path dir = many ? fs::path(f.out_dir) / ("seed-" + std::to_string(seed)) : fs::path(f.out_dir);
                passed = run_one(scenario, seed, dir, f.format, out, err) && passed;
                if (seed == seeds.last)
                {
                    break;
                }
            }
            return passed ? kOk : kOracleFailure;
        }

        int cmd_compare(const CompareFlags &f, std::ostream &out)
        {
            SeedRange seeds;
            try
            {
                seeds = SeedRange::parse(f.seeds);
            }
            catch (const std::invalid_argument &e)
            {
                throw UsageError(e.what());
            }
            std::vector<CompareRow> rows;
            try
            {
                rows = compare(f.sizes, seeds);
            }
            catch (const std::invalid_argument &e)
            {
                throw UsageError(e.what());
            }

            if (f.format == "csv")
            {
                write_compare_csv(out, rows);
            }
            else if (f.format == "json")
            {
                out << compare_to_json(rows, seeds).dump(2) << '\n';
            }
            else
            {
                out << "seeds " << seeds.first << ".." << seeds.last << "; steps counted from the max-holder departure\n";
                write_compare_table(out, rows);
            }
            if (f.out_dir)
            {
                const fs::path dir(*f.out_dir);
                fs::create_directories(dir);
                std::ostringstream csv;
                write_compare_csv(csv, rows);
                write_file(dir / "compare.csv", csv.str());
                write_file(dir / "compare.json", compare_to_json(rows, seeds).dump(2) + "\n");
            }
            std::uint64_t violations = 0;
            for (const auto &r : rows)
            {
                violations += r.counter.oracle_violations + r.timeout.oracle_violations;
            }
            return violations == 0 ? kOk : kOracleFailure;
        }

        int cmd_bounds(const BoundsFlags &f, std::ostream &out)
        {
            if (f.n_bar < 2)
            {
                throw UsageError("--n-bar must be at least 2");
            }
            if (!(f.epsilon > 0.0 && f.epsilon < 1.0))
            {
                throw UsageError("--epsilon must lie strictly between 0 and 1");
            }
            try
            {
                const double e1 = expected_convergence_bound(f.n_bar, 1);
                const double e2 = expected_convergence_bound(f.n_bar, 2);
                const double p1 = high_prob_bound(f.n_bar, f.epsilon, 1);
                const double p2 = high_prob_bound(f.n_bar, f.epsilon, 2);
                out << std::setprecision(10);
                out << "n_bar             " << f.n_bar << '\n'
                    << "epsilon           " << f.epsilon << '\n'
                    << "expected_1phase   " << e1 << '\n'
                    << "expected_2phase   " << e2 << '\n'
                    << "high_prob_1phase  " << p1 << '\n'
                    << "high_prob_2phase  " << p2 << '\n';
            }
            catch (const std::domain_error &e)
            {
                throw UsageError(e.what());
            }
            return kOk;
        }

        int cmd_scenarios(std::ostream &out)
        {
            out << std::left << std::setw(22) << "name" << std::setw(9) << "protocol" << std::setw(8) << "agents"
                << std::setw(9) << "horizon" << "T*" << '\n';
            for (const auto &[name, s] : reference_scenarios())
            {
                out << std::setw(22) << name << std::setw(9) << to_string(s.protocol) << std::setw(8)
                    << s.initial.size() << std::setw(9) << s.horizon
                    << (s.threshold ? std::to_string(s.threshold->base()) : std::string("-")) << '\n';
            }
            out << std::right;
            return kOk;
        }

        int cmd_validate(const ValidateFlags &f, std::ostream &out)
        {
            const Scenario s = resolve_scenario(f.scenario);
            validate(s);
            if (f.normalize)
            {
                out << to_yaml_text(s);
            }
            else
            {
                out << "ok " << s.name << ": " << to_string(s.protocol) << ", " << s.initial.size()
                    << " initial agents, horizon " << s.horizon << '\n';
            }
            return kOk;
        }
    }

    Scenario resolve_scenario(const std::string &name_or_path)
    {
        const fs::path path(name_or_path);
        std::error_code ec;
        if (fs::is_regular_file(path, ec))
        {
            return parse_scenario(read_file(path));
        }
        try
        {
            return builtin_scenario(name_or_path);
        }
        catch (const std::out_of_range &)
        {
            throw ScenarioError("", "'" + name_or_path + "' is neither a file nor a built-in scenario");
        }
    }

    Scenario apply_overrides(Scenario s, const Overrides &o)
    {
        if (o.algorithm && *o.algorithm != s.protocol)
        {
            s.protocol = *o.algorithm;
            if (s.protocol == Protocol::timeout)
            {
                s.allow_self_pairs = false;
                s.threshold = Threshold::fixed(std::max<std::uint64_t>(1, threshold_from_population(1.1, s.initial.size())));
            }
            else
            {
                s.threshold.reset();
            }
        }
        if ((o.threshold || o.threshold_growth) && s.protocol != Protocol::timeout)
        {
            throw ScenarioError("threshold", "only the timeout protocol takes a threshold");
        }
        if (o.threshold)
        {
            if (*o.threshold == 0)
            {
                throw ScenarioError("threshold", "must be positive");
            }
            s.threshold = s.threshold->grows()
                              ? Threshold::linear(*o.threshold, s.threshold->growth_amount(), s.threshold->growth_every())
                              : Threshold::fixed(*o.threshold);
        }
        if (o.threshold_growth)
        {
            const std::string &g = *o.threshold_growth;
            const auto slash = g.find('/');
            if (slash == std::string::npos)
            {
                throw ScenarioError("threshold.growth", "expected AMOUNT/EVERY, got '" + g + "'");
            }
            try
            {
                const auto amount = parse_positive(std::string_view(g).substr(0, slash), "growth amount");
                const auto every = parse_positive(std::string_view(g).substr(slash + 1), "growth interval");
                s.threshold = Threshold::linear(s.threshold->base(), amount, every);
            }
            catch (const UsageError &e)
            {
                throw ScenarioError("threshold.growth", e.what());
            }
        }
        if (o.horizon)
        {
            s.horizon = *o.horizon;
        }
        if (o.stride)
        {
            s.snapshot_stride = *o.stride;
        }
        validate(s);
        return s;
    }

    int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Simulator for MAX consensus in open multi-agent systems", kToolName};
        app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
        app.require_subcommand(1);

        RunFlags rf;
        auto *run_cmd = app.add_subcommand("run", "Run one scenario for a seed or a seed range and write artifacts");
        run_cmd->add_option("--scenario", rf.scenario, "Built-in scenario name or path to a YAML/JSON config")
            ->required();
        run_cmd->add_option("--algorithm", rf.algorithm, "Override the protocol")
            ->check(CLI::IsMember({"counter", "timeout"}));
        auto *seed_opt = run_cmd->add_option("--seed", rf.seed, "Seed of a single run (default 1)");
        run_cmd->add_option("--seeds", rf.seeds, "Inclusive seed range A..B; one sub-directory per seed")
            ->excludes(seed_opt);
        run_cmd->add_option("--horizon", rf.horizon, "Override the number of ticks")->check(CLI::PositiveNumber);
        run_cmd->add_option("--threshold", rf.threshold, "Override the timeout threshold T* (ticks)")
            ->check(CLI::PositiveNumber);
        run_cmd->add_option("--threshold-growth", rf.threshold_growth,
                            "Let T* grow at AMOUNT/EVERY per tick (floored), written AMOUNT/EVERY");
        run_cmd->add_option("--stride", rf.stride, "Write agent tuples every STRIDE ticks (default from scenario)")
            ->check(CLI::PositiveNumber);
        run_cmd->add_option("--out", rf.out_dir, "Output directory")->capture_default_str();
        run_cmd->add_option("--format", rf.format, "Trace format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();

        CompareFlags cf;
        auto *compare_cmd =
            app.add_subcommand("compare", "Compare both protocols on the max-holder departure setup across sizes");
        compare_cmd->add_option("--sizes", cf.sizes, "Population sizes, comma separated")
            ->delimiter(',')
            ->capture_default_str();
        compare_cmd->add_option("--seeds", cf.seeds, "Inclusive seed range A..B")->capture_default_str();
        compare_cmd->add_option("--out", cf.out_dir, "Also write compare.csv and compare.json here");
        compare_cmd->add_option("--format", cf.format, "Stdout format")
            ->check(CLI::IsMember({"table", "csv", "json"}))
            ->capture_default_str();

        BoundsFlags bf;
        auto *bounds_cmd = app.add_subcommand("bounds", "Print the gossip convergence-time bounds");
        bounds_cmd->add_option("--n-bar", bf.n_bar, "Number of agents once churn stops")->required();
        bounds_cmd->add_option("--epsilon", bf.epsilon, "Failure probability of the high-probability bound")
            ->capture_default_str();

        auto *scenarios_cmd = app.add_subcommand("scenarios", "List built-in scenarios");

        ValidateFlags vf;
        auto *validate_cmd = app.add_subcommand("validate", "Parse and validate a scenario without running it");
        validate_cmd->add_option("scenario,--scenario", vf.scenario, "Built-in name or config path")->required();
        validate_cmd->add_flag("--normalize", vf.normalize, "Print the scenario in canonical YAML");

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try
        {
            app.parse(reversed);
        }
        catch (const CLI::CallForHelp &e)
        {
            return app.exit(e, out, err);
        }
        catch (const CLI::CallForAllHelp &e)
        {
            return app.exit(e, out, err);
        }
        catch (const CLI::CallForVersion &e)
        {
            return app.exit(e, out, err);
        }
        catch (const CLI::ParseError &e)
        {
            app.exit(e, out, err);
            return kUsage;
        }

        try
        {
            if (*run_cmd)
            {
                return cmd_run(rf, out, err);
            }
            if (*compare_cmd)
            {
                return cmd_compare(cf, out);
            }
            if (*bounds_cmd)
            {
                return cmd_bounds(bf, out);
            }
            if (*scenarios_cmd)
            {
                return cmd_scenarios(out);
            }
            return cmd_validate(vf, out);
        }
        catch (const ScenarioError &e)
        {
            err << "error: " << e.what() << '\n';
            return kUsage;
        }
        catch (const UsageError &e)
        {
            err << "error: " << e.what() << '\n';
            return kUsage;
        }
    }
}
