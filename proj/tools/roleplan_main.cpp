#include "roleplan/errors.hpp"
#include "roleplan/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

// 0 success, 1 runtime failure, 2 usage or configuration error.
int exit_code_for(const std::exception& e) {
    using namespace roleplan;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
        dynamic_cast<const PromptPackError*>(&e) || dynamic_cast<const MalformedDag*>(&e) ||
        dynamic_cast<const InvalidModality*>(&e) || dynamic_cast<const JudgeFamilyConflict*>(&e) ||
        dynamic_cast<const UnpricedModel*>(&e)) {
        return 2;
    }
    return 1;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto end = std::min(s.find(',', pos), s.size());
        auto item = s.substr(pos, end - pos);
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (!item.empty()) out.push_back(item);
        pos = end + 1;
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-agent robot task planning experiments: run, evaluate, report, replay"};
    app.require_subcommand(1);

    std::string config_path;
    std::string designs;
    std::string scenarios;
    std::optional<int> reps;
    std::optional<std::uint64_t> seed;
    std::optional<int> parallelism;
    std::string out_dir;
    bool strict = false;
    auto* run = app.add_subcommand("run", "Execute the design x scenario x repetition matrix");
    run->add_option("--config", config_path, "Experiment configuration (YAML or JSON)");
    run->add_option("--designs", designs, "Comma-separated designs, e.g. A,B,C,D");
    run->add_option("--scenarios", scenarios, "Comma-separated builtin ids or scenario files");
    run->add_option("--reps", reps, "Repetitions per cell");
    run->add_option("--seed", seed, "Global seed");
    run->add_option("--parallelism", parallelism, "Concurrent pipeline runs");
    run->add_option("--out", out_dir, "Run directory");
    run->add_flag("--strict", strict, "Exit 1 when any run failed");

    std::string eval_dir;
    std::string eval_config;
    bool oracle = false;
    bool judge = false;
    bool both = false;
    auto* evaluate = app.add_subcommand("evaluate", "Attach oracle and/or judge scores to a run directory");
    evaluate->add_option("dir", eval_dir, "Run directory")->required();
    auto* o_flag = evaluate->add_flag("--oracle", oracle, "Rule-based scores");
    auto* j_flag = evaluate->add_flag("--judge", judge, "LLM-judge scores");
    auto* b_flag = evaluate->add_flag("--both", both, "Both score sources");
    o_flag->excludes(j_flag)->excludes(b_flag);
    j_flag->excludes(b_flag);
    evaluate->add_option("--config", eval_config, "Configuration supplying the judge section");

    std::string report_dir;
    auto* report = app.add_subcommand("report", "Regenerate statistics and trade-off tables");
    report->add_option("dir", report_dir, "Run directory")->required();

    std::string replay_dir;
    std::string replay_id;
    bool verify = false;
    auto* replay = app.add_subcommand("replay", "Print the agent exchange of one record");
    replay->add_option("dir", replay_dir, "Run directory")->required();
    replay->add_option("record-id", replay_id, "Record id")->required();
    replay->add_flag("--verify", verify, "Re-execute against the transcript and compare");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            auto config = config_path.empty() ? roleplan::ExperimentConfig::defaults() : roleplan::ExperimentConfig::load(config_path);
            if (!designs.empty()) {
                config.designs.clear();
                for (const auto& d : split_list(designs)) config.designs.push_back(roleplan::parse_design(d));
            }
            if (!scenarios.empty()) config.scenarios = split_list(scenarios);
            if (reps) config.repetitions = *reps;
            if (seed) config.seed = *seed;
            if (parallelism) config.parallelism = *parallelism;
            if (!out_dir.empty()) config.output_dir = out_dir;

            const auto summary = roleplan::cmd_run(config, std::cout);
            for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
            std::cout << summary.executed << " executed, " << summary.skipped << " skipped, " << summary.failed << " failed\n";
            return strict && summary.failed > 0 ? 1 : 0;
        }
        if (evaluate->parsed()) {
            roleplan::EvaluateOptions options;
            options.oracle = oracle || both;
            options.judge = judge || both;
            if (!options.oracle && !options.judge) {
                std::cerr << "error: evaluate needs one of --oracle, --judge, --both\n";
                return 2;
            }
            if (!eval_config.empty()) {
                const auto cfg = roleplan::ExperimentConfig::load(eval_config);
                if (cfg.judge) options.judge_override = cfg.judge;
                options.extra_backends = cfg.backends;
            }
            roleplan::cmd_evaluate(eval_dir, options, std::cout);
            return 0;
        }
        if (report->parsed()) {
            for (const auto& w : roleplan::cmd_report(report_dir, std::cout)) std::cerr << "warning: " << w << '\n';
            return 0;
        }
        if (replay->parsed()) {
            roleplan::cmd_replay(replay_dir, replay_id, verify, std::cout);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return 2;
}
