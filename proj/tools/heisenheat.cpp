// heisenheat <command> --config <file> [--out <dir>] [--workers <n>]
// Exit codes: 0 pass, 1 check failure, 2 config error.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "heisenheat/experiments.hpp"

namespace {

std::string command_help() {
    std::string s = "Commands and keys (key = default: doc):\n";
    for (const auto& cmd : heisenheat::known_commands()) {
        s += "\n" + cmd + "\n";
        for (const auto& k : heisenheat::keys_for(cmd)) s += "  " + k.key + " = " + k.default_value + ": " + k.doc + "\n";
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forced semilinear heat equation on the Heisenberg group"};
    app.footer(command_help());
    std::string command, config, out = "out";
    int workers = 1;
    app.add_option("command", command, "verify | solve | capacity | critical | lifespan | sweep")
        ->required()
        ->check(CLI::IsMember(heisenheat::known_commands()));
    app.add_option("--config", config, "flat key=value file, or a manifest.json to rerun")->required();
    app.add_option("--out", out, "output directory");
    app.add_option("--workers", workers, "worker threads for sweep points")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return heisenheat::kExitConfigError;
    }
    try {
        const auto cfg = heisenheat::load_config(command, config);
        const auto r = heisenheat::run_experiment(cfg, out, workers);
        std::cout << command << ": " << r.summary << "\n";
        for (const auto& f : r.outputs) std::cout << "  wrote " << (std::filesystem::path(out) / f).string() << "\n";
        return r.exit_code;
    } catch (const heisenheat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return heisenheat::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return heisenheat::kExitCheckFailure;
    }
}
