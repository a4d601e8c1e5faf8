#pragma once

#include <string>

#include "skl/games.hpp"

namespace skl::runner {

// Configuration shared by the CLI and the python bindings. Scheme and game
// names follow the command-line flags.
struct RunConfig {
    std::string scheme = "skecrskl";  // skecd, skecrskl, pkecrskl, skfecrskl,
                                      // abecrskl, abecr2skl, strawman
    std::string game = "roundtrip";   // roundtrip, ot-ind-kla, ind-kla, key-test,
                                      // ind-cva-cd, collusion-demo
    uint32_t lambda = 128;
    uint32_t n = 16;
    uint32_t hadamard = 8;
    uint32_t keys = 2;   // q
    uint32_t slots = 24;  // cr2 slot budget (k)
    uint32_t trials = 1000;
    uint64_t seed = 1;
    uint32_t threads = 1;
    std::string json_out;

    // throws std::invalid_argument with a user-facing message
    void validate() const;

    skecrskl::Params skecrskl_params() const;
    pkecrskl::Params pkecrskl_params() const;
    skecd::Params skecd_params() const;
    feskl::SkfeSklParams skfe_params() const;
    feskl::AbeSklParams abeskl_params() const;
    cr2::Params cr2_params() const;
};

struct RunResult {
    games::Transcript transcript;
    bool thresholds_ok = false;
    std::string summary;  // human-readable lines
};

RunResult run(const RunConfig& cfg);

// key/state dump for the dump-key command
nlohmann::json dump_key(const RunConfig& cfg);

}  // namespace skl::runner
