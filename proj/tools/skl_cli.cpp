// Command-line front end: correctness demos, security-game runs, and state
// dumps with seeded, replayable JSON transcripts.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "skl/runner.hpp"

namespace {

void add_common_flags(CLI::App* cmd, skl::runner::RunConfig& cfg) {
    cmd->add_option("--scheme", cfg.scheme,
                    "scheme: skecd, skecrskl, pkecrskl, skfecrskl, abecrskl, abecr2skl, strawman");
    cmd->add_option("--lambda", cfg.lambda, "classical security parameter");
    cmd->add_option("--quantum-positions", cfg.n, "BB84 quantum positions per ciphertext");
    cmd->add_option("--hadamard", cfg.hadamard, "Hadamard weight h");
    cmd->add_option("--keys", cfg.keys, "leased keys per trial (q)");
    cmd->add_option("--slots", cfg.slots, "slot count budget for abecr2skl (k)");
    cmd->add_option("--trials", cfg.trials, "number of trials");
    cmd->add_option("--seed", cfg.seed, "master seed");
    cmd->add_option("--threads", cfg.threads, "worker threads");
    cmd->add_option("--json-out", cfg.json_out, "write the JSON transcript to this path");
}

int write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return 2;
    }
    out << j.dump(2) << "\n";
    return 0;
}

int run_and_report(const skl::runner::RunConfig& cfg) {
    skl::runner::RunResult res;
    try {
        res = skl::runner::run(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    const auto& tr = res.transcript;
    std::cout << tr.game << " / " << tr.scheme << "  trials=" << tr.trials << " seed=" << tr.seed << "\n";
    if (cfg.game == "roundtrip") {
        std::cout << "correctness " << tr.wins << "/" << tr.trials << "\n";
    } else {
        std::cout << "wins " << tr.wins << "/" << tr.trials << "  ci95=[" << tr.ci95[0] << ", "
                  << tr.ci95[1] << "]\n";
    }
    for (const auto& [name, rate] : tr.pass_rates) std::cout << "  " << name << " = " << rate << "\n";
    std::cout << res.summary;
    if (!cfg.json_out.empty()) {
        if (int rc = write_json(cfg.json_out, tr.to_json())) return rc;
    }
    return res.thresholds_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator and security-game harness for encryption with "
                 "collusion-resistant secure key leasing"};
    app.require_subcommand(1);

    skl::runner::RunConfig demo_cfg;
    CLI::App* demo = app.add_subcommand("demo", "run scheme correctness trials");
    add_common_flags(demo, demo_cfg);

    skl::runner::RunConfig game_cfg;
    CLI::App* game = app.add_subcommand("game", "run a security experiment");
    game->add_option("--game", game_cfg.game,
                     "game: ot-ind-kla, ind-kla, key-test, ind-cva-cd, collusion-demo");
    add_common_flags(game, game_cfg);

    skl::runner::RunConfig dump_cfg;
    CLI::App* dump = app.add_subcommand("dump-key", "generate one leased key and dump its state as JSON");
    add_common_flags(dump, dump_cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    if (demo->parsed()) {
        demo_cfg.game = "roundtrip";
        return run_and_report(demo_cfg);
    }
    if (game->parsed()) {
        return run_and_report(game_cfg);
    }
    // dump-key
    dump_cfg.game = "roundtrip";
    try {
        nlohmann::json j = skl::runner::dump_key(dump_cfg);
        if (!dump_cfg.json_out.empty()) return write_json(dump_cfg.json_out, j);
        std::cout << j.dump(2) << "\n";
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
