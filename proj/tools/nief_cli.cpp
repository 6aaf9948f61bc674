#include <iostream>

#include <CLI11.hpp>

#include "nief/io/run.hpp"

namespace {

int guarded(const std::function<void()>& fn) {
    try {
        fn();
        return 0;
    } catch (const nief::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nief::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

struct RunFlags {
    std::string config;
    std::string output;
    std::uint64_t seed = 0;
    bool plot = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("config", f.config, "INI config, or a JSON sidecar to replay")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", f.output, "Output stem; writes <stem>.csv and <stem>.json");
    cmd->add_option("--seed", f.seed, "Seed recorded in provenance and used by the optimizer");
    cmd->add_flag("--plot", f.plot, "Also write a gnuplot script next to the CSV");
}

nief::io::RunOptions options(CLI::App* cmd, const RunFlags& f) {
    nief::io::RunOptions o;
    if (cmd->count("--output")) o.output = f.output;
    if (cmd->count("--seed")) o.seed = f.seed;
    if (f.plot) o.plot = true;
    return o;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state multilevel spectra, gain and mixing calculator"};
    app.set_version_flag("--version", nief::io::version);
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "Run the task named in [run] task");
    add_run_flags(run, run_flags);

    std::map<std::string, RunFlags> task_flags;
    std::map<std::string, CLI::App*> task_cmds;
    for (const auto& t : nief::io::task_names()) {
        auto* cmd = app.add_subcommand(t, "Run the " + t + " task regardless of [run] task");
        add_run_flags(cmd, task_flags[t]);
        task_cmds[t] = cmd;
    }

    std::string csv, script;
    auto* plot = app.add_subcommand("plot", "Write a gnuplot script for a result CSV");
    plot->add_option("csv", csv, "Result CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("-o,--output", script, "Script path (default: CSV path with .gp)");

    CLI11_PARSE(app, argc, argv);

    if (*plot) {
        return guarded([&] { std::cout << nief::io::emit_plot_script(csv, script) << "\n"; });
    }
    if (*run) return nief::io::run(run_flags.config, options(run, run_flags));
    for (auto& [t, cmd] : task_cmds) {
        if (!*cmd) continue;
        auto o = options(cmd, task_flags[t]);
        o.task = t;
        return nief::io::run(task_flags[t].config, o);
    }
    return 2;
}
