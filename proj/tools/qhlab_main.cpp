#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qhlab/config.hpp"
#include "qhlab/parallel.hpp"
#include "qhlab/run.hpp"

int main(int argc, char** argv) {
    using namespace qhlab;
    CLI::App app{"qhlab: quasi-helix Gaussian processes, small balls and pathwise replication"};
    app.footer(config_help() +
               "\nExit codes: 0 success, 1 validation or domain error, 2 numeric failure.\n"
               "QHLAB_THREADS is used when --threads is absent.");
    std::string command, config_path, out = "runs";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    app.add_option("command", command,
                   "simulate | check-conditions | smallball | frac-check | replicate | lemma-divergence")
        ->required();
    app.add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed (overrides mc.seed)");
    app.add_option("--out", out, "output root directory")->capture_default_str();
    app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    auto cmd = parse_command(command);
    if (!cmd) {
        std::cerr << "unknown command '" << command << "'\n";
        return 1;
    }
    std::ifstream in(config_path);
    std::stringstream ss;
    ss << in.rdbuf();

    RunOptions o;
    o.command = *cmd;
    o.config_text = ss.str();
    o.config_path = config_path;
    o.seed = seed;
    o.out_root = out;
    try {
        o.threads = resolve_threads(threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    RunResult r = run(o);
    if (r.exit_code != 0) std::cerr << "error: " << r.error << "\n";
    return r.exit_code;
}
